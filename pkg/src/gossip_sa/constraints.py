"""Convex feasible sets with exact Euclidean projections.

Besides projection, each set exposes its inequality constraints
``q_j(theta) <= 0`` through values and gradients, which is what the
active-set and first-order optimality helpers below consume.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.optimize

#: Hard cap on the number of halfspaces (projection enumerates active subsets).
MAX_HALFSPACES = 10


class InfeasiblePointError(ValueError):
    """A point lies outside the feasible set beyond the stated tolerance."""


class DependentGradientsWarning(UserWarning):
    """Active constraint gradients are numerically linearly dependent."""


def default_active_tolerance(theta) -> float:
    """Scale-aware tolerance for declaring a constraint active at ``theta``."""
    return 1e-8 * (1.0 + float(np.linalg.norm(theta)))


class ConstraintSet:
    """Closed convex subset of R^d described by inequality constraints."""

    dim: int

    def project(self, x: np.ndarray) -> np.ndarray:
        """Euclidean projection of ``x`` onto the set."""
        raise NotImplementedError

    def constraint_values(self, theta) -> np.ndarray:
        """Constraint values ``q_j(theta)``; feasibility means all <= 0."""
        raise NotImplementedError

    def constraint_gradients(self, theta) -> np.ndarray:
        """Gradients of the constraints at ``theta``, one row per constraint."""
        raise NotImplementedError

    @property
    def n_constraints(self) -> int:
        raise NotImplementedError

    def contains(self, theta, tol: float | None = None) -> bool:
        """Feasibility check within ``tol`` (scale-aware default)."""
        vals = self.constraint_values(theta)
        if vals.size == 0:
            return True
        if tol is None:
            tol = default_active_tolerance(theta)
        return bool(np.max(vals) <= tol)


class Unconstrained(ConstraintSet):
    """The whole space; projection is the identity."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = int(dim)

    def project(self, x):
        return np.asarray(x, dtype=float)

    def constraint_values(self, theta):
        return np.zeros(0)

    def constraint_gradients(self, theta):
        return np.zeros((0, self.dim))

    @property
    def n_constraints(self) -> int:
        return 0

    def __repr__(self) -> str:
        return f"Unconstrained(dim={self.dim})"


class Box(ConstraintSet):
    """Coordinatewise bounds ``lower <= theta <= upper`` (entries may be infinite)."""

    def __init__(self, lower, upper):
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-d arrays of equal length")
        if np.any(lower > upper):
            raise ValueError("box requires lower <= upper coordinatewise")
        self.lower = lower
        self.upper = upper
        self.dim = lower.size
        # Constraint rows exist only for finite bounds: uppers first, then lowers.
        self._upper_idx = np.flatnonzero(np.isfinite(upper))
        self._lower_idx = np.flatnonzero(np.isfinite(lower))

    def project(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def constraint_values(self, theta):
        theta = np.asarray(theta, dtype=float)
        up = theta[self._upper_idx] - self.upper[self._upper_idx]
        lo = self.lower[self._lower_idx] - theta[self._lower_idx]
        return np.concatenate([up, lo])

    def constraint_gradients(self, theta):
        rows = np.zeros((self.n_constraints, self.dim))
        for r, k in enumerate(self._upper_idx):
            rows[r, k] = 1.0
        off = self._upper_idx.size
        for r, k in enumerate(self._lower_idx):
            rows[off + r, k] = -1.0
        return rows

    @property
    def n_constraints(self) -> int:
        return int(self._upper_idx.size + self._lower_idx.size)

    def __repr__(self) -> str:
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"


def _project_capped_simplex(x: np.ndarray, budget: float) -> np.ndarray:
    """Projection onto ``{y >= 0, sum(y) <= budget}``.

    When clipping to the nonnegative orthant already satisfies the budget,
    that clip is the projection.  Otherwise the budget is tight and the
    classic sorted-threshold rule projects onto the budget face.
    """
    y = np.maximum(x, 0.0)
    if y.sum() <= budget:
        return y
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - budget
    idx = np.arange(1, x.size + 1)
    rho = idx[u > css / idx][-1]
    tau = css[rho - 1] / rho
    return np.maximum(x - tau, 0.0)


class BudgetSimplex(ConstraintSet):
    """Per-group capped simplices: coordinates nonnegative, group sums bounded.

    ``groups`` is a partition of ``range(dim)`` (0-based coordinate indices);
    each group ``g`` carries its own budget and the feasible set is
    ``{theta >= 0, sum(theta[g]) <= budget_g for every g}``.
    """

    def __init__(self, budgets, groups):
        budgets = np.atleast_1d(np.asarray(budgets, dtype=float))
        if np.any(budgets <= 0.0):
            raise ValueError("every group budget must be positive")
        groups = tuple(tuple(int(k) for k in g) for g in groups)
        if len(groups) != budgets.size:
            raise ValueError("need exactly one budget per group")
        flat = sorted(k for g in groups for k in g)
        dim = len(flat)
        if not groups or any(len(g) == 0 for g in groups):
            raise ValueError("groups must be nonempty")
        if flat != list(range(dim)):
            raise ValueError("groups must partition the coordinate indices 0..d-1")
        self.budgets = budgets
        self.groups = groups
        self.dim = dim

    def project(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        for g, budget in zip(self.groups, self.budgets):
            idx = list(g)
            out[idx] = _project_capped_simplex(x[idx], float(budget))
        return out

    def constraint_values(self, theta):
        theta = np.asarray(theta, dtype=float)
        sums = np.array([theta[list(g)].sum() for g in self.groups])
        return np.concatenate([-theta, sums - self.budgets])

    def constraint_gradients(self, theta):
        rows = np.zeros((self.n_constraints, self.dim))
        rows[: self.dim] = -np.eye(self.dim)
        for r, g in enumerate(self.groups):
            rows[self.dim + r, list(g)] = 1.0
        return rows

    @property
    def n_constraints(self) -> int:
        return self.dim + len(self.groups)

    @classmethod
    def per_user(cls, n_users: int, n_channels: int, budgets) -> "BudgetSimplex":
        """Stacked per-user allocations: user ``i`` owns a block of ``n_channels``."""
        groups = tuple(
            tuple(range(i * n_channels, (i + 1) * n_channels)) for i in range(n_users)
        )
        return cls(budgets=budgets, groups=groups)

    def __repr__(self) -> str:
        return f"BudgetSimplex(budgets={self.budgets.tolist()}, groups={self.groups})"


class Halfspaces(ConstraintSet):
    """Intersection of halfspaces ``normals @ theta <= offsets``.

    Projection enumerates subsets of potentially active constraints and
    keeps the KKT-consistent candidate, so the number of halfspaces is
    capped at ``MAX_HALFSPACES``.  Emptiness is rejected at construction
    with a feasibility linear program.
    """

    def __init__(self, normals, offsets):
        normals = np.atleast_2d(np.asarray(normals, dtype=float))
        offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
        if normals.ndim != 2 or offsets.ndim != 1 or normals.shape[0] != offsets.size:
            raise ValueError("need one offset per normal row")
        if normals.shape[0] > MAX_HALFSPACES:
            raise ValueError(f"at most {MAX_HALFSPACES} halfspaces are supported")
        if np.any(np.linalg.norm(normals, axis=1) == 0.0):
            raise ValueError("halfspace normals must be nonzero")
        feas = scipy.optimize.linprog(
            c=np.zeros(normals.shape[1]),
            A_ub=normals,
            b_ub=offsets,
            bounds=[(None, None)] * normals.shape[1],
            method="highs",
        )
        if not feas.success:
            raise ValueError("halfspace system has an empty feasible set")
        self.normals = normals
        self.offsets = offsets
        self.dim = normals.shape[1]

    def project(self, x):
        x = np.asarray(x, dtype=float)
        p = self.normals.shape[0]
        tol = 1e-9 * (1.0 + float(np.linalg.norm(x)) + float(np.linalg.norm(self.offsets)))
        best = None
        best_d2 = np.inf
        for size in range(p + 1):
            for subset in itertools.combinations(range(p), size):
                if subset:
                    a = self.normals[list(subset)]
                    try:
                        lam = np.linalg.solve(a @ a.T, a @ x - self.offsets[list(subset)])
                    except np.linalg.LinAlgError:
                        continue  # rank-deficient subset
                    if np.any(lam < -1e-12):
                        continue  # multiplier signs rule this subset out
                    y = x - a.T @ lam
                else:
                    y = x
                if np.max(self.normals @ y - self.offsets, initial=-np.inf) > tol:
                    continue
                d2 = float(np.dot(y - x, y - x))
                if d2 < best_d2:
                    best, best_d2 = y, d2
        if best is None:
            raise RuntimeError("projection enumeration found no feasible candidate")
        return best

    def constraint_values(self, theta):
        return self.normals @ np.asarray(theta, dtype=float) - self.offsets

    def constraint_gradients(self, theta):
        return self.normals.copy()

    @property
    def n_constraints(self) -> int:
        return int(self.normals.shape[0])

    def __repr__(self) -> str:
        return f"Halfspaces(normals={self.normals.tolist()}, offsets={self.offsets.tolist()})"


@dataclass(frozen=True)
class ActiveSet:
    """Indices (0-based) of constraints active at a point, with the tolerance used."""

    indices: tuple[int, ...]
    tolerance: float


def active_set(cs: ConstraintSet, theta, tol: float | None = None) -> ActiveSet:
    """Constraints with ``q_j(theta) >= -tol``; ``theta`` must be feasible within ``tol``."""
    theta = np.asarray(theta, dtype=float)
    if tol is None:
        tol = default_active_tolerance(theta)
    vals = cs.constraint_values(theta)
    if vals.size and float(np.max(vals)) > tol:
        worst = int(np.argmax(vals))
        raise InfeasiblePointError(
            f"point violates constraint {worst} by {float(vals[worst]):.3e} "
            f"(tolerance {tol:.3e})"
        )
    idx = np.flatnonzero(vals >= -tol)
    return ActiveSet(indices=tuple(int(k) for k in idx), tolerance=float(tol))


def kt_residual(cs: ConstraintSet, theta, grad, tol: float | None = None) -> float:
    """Distance from ``-grad`` to the cone spanned by active constraint gradients.

    Zero certifies first-order stationarity of ``theta`` for minimizing a
    function with gradient ``grad`` over the set.  With no active constraint
    the cone is ``{0}`` and the residual is simply ``|grad|``.  Nonnegative
    multipliers are found by nonnegative least squares, which is well posed
    when the active gradients are linearly independent; dependence triggers
    :class:`DependentGradientsWarning`.
    """
    grad = np.asarray(grad, dtype=float)
    act = active_set(cs, theta, tol)
    if not act.indices:
        return float(np.linalg.norm(grad))
    rows = cs.constraint_gradients(theta)[list(act.indices)]
    sv = np.linalg.svd(rows, compute_uv=False)
    if sv[-1] <= 1e-10 * max(float(sv[0]), 1.0):
        warnings.warn(
            "active constraint gradients are numerically dependent; "
            "the stationarity residual may be unreliable",
            DependentGradientsWarning,
            stacklevel=2,
        )
    _, resid = scipy.optimize.nnls(rows.T, -grad)
    return float(resid)


def projection_drift(cs: ConstraintSet, theta, y, gamma: float) -> np.ndarray:
    """Finite-step drift ``(P(theta + gamma*y) - theta) / gamma``.

    As ``gamma`` shrinks this tends to ``y`` at interior points; on a smooth
    boundary with unit outward normal ``e`` it tends to
    ``y - max(y.e, 0) e``, i.e. the outward component of ``y`` is removed.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    return (cs.project(theta + gamma * y) - theta) / gamma
