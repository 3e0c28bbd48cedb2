"""Observables of a distributed run.

Covers the network average and the disagreement norm, power-law fits of the
disagreement decay, and the asymptotic covariance of the normalized average
error: a continuous Lyapunov solve on the theory side and a filtered
replica ensemble on the empirical side.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover - typing only, avoids an import cycle
    from .core import StepSchedule


class InsufficientReplicasError(RuntimeError):
    """Too few replicas survive the convergence filter to estimate a covariance."""


@dataclass(frozen=True, eq=False)
class TraceRecord:
    """One recorded row of a run."""

    n: int
    gamma: float
    disagreement: float
    average: np.ndarray
    residual: float
    objective: float = float("nan")

    def __post_init__(self) -> None:
        if self.disagreement < 0.0 or self.residual < 0.0:
            raise ValueError("disagreement and residual are norms and cannot be negative")


def network_average(theta) -> np.ndarray:
    """Arithmetic mean of the per-agent blocks (rows of ``theta``)."""
    return np.asarray(theta, dtype=float).mean(axis=0)


def disagreement_norm(theta) -> float:
    """Euclidean norm of the stacked deviations from the network average."""
    theta = np.asarray(theta, dtype=float)
    return float(np.linalg.norm(theta - theta.mean(axis=0)))


def replica_mean_squared_disagreement(traces) -> tuple[np.ndarray, np.ndarray]:
    """Average the squared disagreement across replica traces, per iteration.

    All traces must share the same recording schedule.  Returns the common
    iteration indices and the mean of ``disagreement**2`` at each of them.
    """
    if not traces:
        raise ValueError("need at least one trace")
    ns = np.array([rec.n for rec in traces[0]], dtype=float)
    rows = []
    for trace in traces:
        if len(trace) != ns.size or any(rec.n != int(m) for rec, m in zip(trace, ns)):
            raise ValueError("traces were recorded on different schedules")
        rows.append([rec.disagreement ** 2 for rec in trace])
    return ns, np.asarray(rows, dtype=float).mean(axis=0)


def fit_decay_exponent(ns, values, tail_fraction: float = 0.5) -> float:
    """Estimated exponent ``b`` of a power-law tail ``values ~ n**-b``.

    Fits a least-squares line to ``log(values)`` against ``log(ns)`` over the
    trailing ``tail_fraction`` of the sequence and returns the negated slope.
    Returns ``nan`` when the tail contains no positive values (degenerate
    trace); requires at least 50 positive tail points otherwise.
    """
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if ns.shape != values.shape or ns.ndim != 1:
        raise ValueError("ns and values must be 1-d arrays of equal length")
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError("tail_fraction must lie in (0, 1]")
    start = int(round(ns.size * (1.0 - tail_fraction)))
    tail_n = ns[start:]
    tail_v = values[start:]
    positive = tail_v > 0.0
    if not positive.any():
        return float("nan")
    if int(positive.sum()) < 50:
        raise ValueError(
            f"need at least 50 positive tail points to fit a decay exponent, "
            f"got {int(positive.sum())}"
        )
    slope = np.polyfit(np.log(tail_n[positive]), np.log(tail_v[positive]), 1)[0]
    return float(-slope)


def solve_lyapunov(h, zeta: float, q) -> np.ndarray:
    """Solve ``(h + zeta I) S + S (h + zeta I)^T = -q`` for the covariance ``S``.

    Uses the dense Kronecker formulation of the d^2 x d^2 linear system,
    which is exact and adequate for the small dimensions used here (tens at
    most).  The shifted matrix must be stable so that the solution exists,
    is unique, and inherits symmetry and definiteness from ``q``.
    """
    h = np.atleast_2d(np.asarray(h, dtype=float))
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if h.shape[0] != h.shape[1] or h.shape != q.shape:
        raise ValueError("h and q must be square matrices of the same size")
    if zeta < 0.0:
        raise ValueError("zeta must be nonnegative")
    d = h.shape[0]
    a = h + zeta * np.eye(d)
    eigvals = np.linalg.eigvals(a)
    worst = eigvals[np.argmax(eigvals.real)]
    if worst.real >= 0.0:
        raise ValueError(
            f"shifted matrix is not stable: eigenvalue {worst} has nonnegative real part"
        )
    lhs = np.kron(np.eye(d), a) + np.kron(a, np.eye(d))
    sigma = np.linalg.solve(lhs, -q.reshape(-1, order="F")).reshape((d, d), order="F")
    return 0.5 * (sigma + sigma.T)


@dataclass(frozen=True, eq=False)
class CltSpec:
    """Ingredients of the normality check around a known limit point.

    ``drift_jacobian`` is the Jacobian at ``theta_star`` of the averaged
    drift (for agents minimizing ``f_i`` it is ``-(1/N) sum_i hess f_i``);
    ``noise_cov`` is the covariance of the across-agent average of the
    observation noise at consensus on ``theta_star``.
    """

    theta_star: np.ndarray
    drift_jacobian: np.ndarray
    noise_cov: np.ndarray

    def __post_init__(self) -> None:
        star = np.atleast_1d(np.asarray(self.theta_star, dtype=float))
        jac = np.atleast_2d(np.asarray(self.drift_jacobian, dtype=float))
        cov = np.atleast_2d(np.asarray(self.noise_cov, dtype=float))
        d = star.size
        if jac.shape != (d, d) or cov.shape != (d, d):
            raise ValueError("drift_jacobian and noise_cov must be d x d matrices")
        if np.max(np.linalg.eigvals(jac).real) >= 0.0:
            raise ValueError("drift_jacobian must be stable (eigenvalue real parts < 0)")
        if float(np.max(np.abs(cov - cov.T))) > 1e-10:
            raise ValueError("noise_cov must be symmetric")
        object.__setattr__(self, "theta_star", star)
        object.__setattr__(self, "drift_jacobian", jac)
        object.__setattr__(self, "noise_cov", cov)
        if self.degenerate:
            warnings.warn(
                "noise covariance is not positive definite; the normalized "
                "fluctuations are degenerate",
                UserWarning,
                stacklevel=2,
            )

    @property
    def dim(self) -> int:
        return int(self.theta_star.size)

    @property
    def decay_rate(self) -> float:
        """Stability margin: minus the largest eigenvalue real part of the drift."""
        return float(-np.max(np.linalg.eigvals(self.drift_jacobian).real))

    @property
    def degenerate(self) -> bool:
        scale = max(float(np.max(np.abs(self.noise_cov))), 1.0)
        return bool(np.min(np.linalg.eigvalsh(self.noise_cov)) <= 1e-15 * scale)


@dataclass(frozen=True, eq=False)
class CltEstimate:
    """Empirical versus predicted covariance of the normalized average error."""

    empirical_cov: np.ndarray
    theoretical_cov: np.ndarray
    n_replicas_used: int
    relative_error: float
    zeta: float
    scaled_disagreement: float
    degenerate: bool


def clt_check(
    final_states,
    clt_spec: CltSpec,
    schedule: "StepSchedule",
    n_tail: int,
    radius: float = 0.5,
) -> CltEstimate:
    """Compare replica fluctuations at iteration ``n_tail`` with the predicted law.

    ``final_states`` holds one ``(n_agents, dim)`` state per replica, taken
    at iteration ``n_tail``.  Replicas whose network average ended farther
    than ``radius`` from the limit point are dropped: they stand in for the
    trajectories that converged elsewhere, which the asymptotic statement
    conditions away.  The surviving averages are scaled by
    ``gamma(n_tail)**-1/2`` and their second moment about zero is compared,
    in relative Frobenius distance, with the Lyapunov-equation covariance
    (shift ``zeta = 0`` for step exponents below one, ``1/(2 gamma0)`` at
    exponent one).  Per-agent samples are scaled the same way and their
    residual disagreement is reported; it should be negligible, confirming
    that the limiting fluctuation is common to all agents.
    """
    finals = np.asarray(final_states, dtype=float)
    if finals.ndim != 3:
        raise ValueError("final_states must have shape (replicas, n_agents, dim)")
    n_replicas = finals.shape[0]
    if n_replicas < 100:
        raise ValueError(f"at least 100 replicas are required, got {n_replicas}")
    d = clt_spec.dim
    if finals.shape[2] != d:
        raise ValueError("state dimension does not match the limit-point dimension")
    if radius <= 0.0:
        raise ValueError("radius must be positive")

    averages = finals.mean(axis=1)
    deviations = averages - clt_spec.theta_star
    keep = np.linalg.norm(deviations, axis=1) <= radius
    n_used = int(keep.sum())
    if n_used < 30:
        raise InsufficientReplicasError(
            f"only {n_used} of {n_replicas} replicas ended within {radius} "
            "of the limit point"
        )

    gamma_tail = schedule.gamma(n_tail)
    scale = 1.0 / np.sqrt(gamma_tail)
    samples = scale * deviations[keep]
    empirical = samples.T @ samples / n_used

    zeta = 0.0 if schedule.xi < 1.0 else 1.0 / (2.0 * schedule.gamma0)
    theoretical = solve_lyapunov(clt_spec.drift_jacobian, zeta, clt_spec.noise_cov)

    theo_norm = float(np.linalg.norm(theoretical))
    degenerate = clt_spec.degenerate or theo_norm <= 1e-300
    if degenerate and theo_norm <= 1e-300:
        relative_error = float("nan")
    else:
        relative_error = float(np.linalg.norm(empirical - theoretical) / theo_norm)

    blocks = scale * (finals[keep] - clt_spec.theta_star)
    spread = np.linalg.norm(blocks - blocks.mean(axis=1, keepdims=True), axis=(1, 2))
    scaled_disagreement = float(spread.mean())

    return CltEstimate(
        empirical_cov=empirical,
        theoretical_cov=theoretical,
        n_replicas_used=n_used,
        relative_error=relative_error,
        zeta=float(zeta),
        scaled_disagreement=scaled_disagreement,
        degenerate=bool(degenerate),
    )
