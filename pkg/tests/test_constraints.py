import itertools

import numpy as np
import pytest

from gossip_sa.constraints import (
    Box,
    BudgetSimplex,
    DependentGradientsWarning,
    Halfspaces,
    InfeasiblePointError,
    Unconstrained,
    active_set,
    default_active_tolerance,
    kt_residual,
    projection_drift,
)


def brute_force_capped_simplex(x, budget):
    """Enumerate zero-patterns of the projection onto {y >= 0, sum y <= budget}.

    Case 1 (slack budget): clip to the orthant.  Case 2 (tight budget): for
    every candidate set of zeroed coordinates, shift the rest by a common
    threshold and keep the KKT-consistent candidate.  Independent of the
    production sorted-threshold rule.
    """
    x = np.asarray(x, dtype=float)
    clipped = np.maximum(x, 0.0)
    best, best_d2 = None, np.inf
    if clipped.sum() <= budget + 1e-12:
        best, best_d2 = clipped, float(np.sum((clipped - x) ** 2))
    d = x.size
    for zeros in itertools.product([False, True], repeat=d):
        free = [k for k in range(d) if not zeros[k]]
        if not free:
            continue
        tau = (x[free].sum() - budget) / len(free)
        y = np.zeros(d)
        y[free] = x[free] - tau
        if np.any(y[free] <= 0):
            continue
        if tau < -1e-12:  # budget multiplier must be nonnegative
            continue
        if any(x[k] - tau > 1e-12 for k in range(d) if zeros[k]):
            continue  # zeroed coordinate fails its sign condition
        d2 = float(np.sum((y - x) ** 2))
        if d2 < best_d2:
            best, best_d2 = y, d2
    assert best is not None
    return best


def random_sets(rng):
    dim = int(rng.integers(1, 5))
    box = Box(rng.uniform(-2, 0, size=dim), rng.uniform(0.5, 2, size=dim))
    simplex = BudgetSimplex(budgets=[float(rng.uniform(0.5, 3.0))], groups=[tuple(range(dim))])
    normals = rng.normal(size=(3, dim))
    offsets = normals @ rng.normal(size=dim) + rng.uniform(0.5, 1.5, size=3)
    half = Halfspaces(normals, offsets)  # feasible by construction
    return [Unconstrained(dim), box, simplex, half]


class TestProject:
    def test_unconstrained_identity(self):
        cs = Unconstrained(2)
        x = np.array([3.7, -2.0])
        assert np.array_equal(cs.project(x), x)

    def test_box_clamp(self):
        cs = Box([0.0, 0.0], [1.0, 1.0])
        assert np.array_equal(cs.project([1.5, -0.3]), [1.0, 0.0])

    def test_budget_simplex_symmetric_face_point(self):
        cs = BudgetSimplex(budgets=[1.0], groups=[(0, 1)])
        assert np.allclose(cs.project([0.9, 0.9]), [0.5, 0.5], atol=1e-12)

    def test_budget_simplex_interior_identity(self):
        cs = BudgetSimplex(budgets=[1.0], groups=[(0, 1)])
        x = np.array([0.2, 0.3])
        assert np.allclose(cs.project(x), x, atol=1e-15)

    def test_budget_simplex_matches_enumeration_oracle(self):
        rng = np.random.default_rng(10)
        for _ in range(300):
            d = int(rng.integers(1, 7))
            budget = float(rng.uniform(0.3, 2.5))
            cs = BudgetSimplex(budgets=[budget], groups=[tuple(range(d))])
            x = rng.uniform(-2, 2, size=d)
            assert np.allclose(cs.project(x), brute_force_capped_simplex(x, budget), atol=1e-8)

    def test_budget_simplex_grouped(self):
        cs = BudgetSimplex(budgets=[1.0, 2.0], groups=[(0, 1), (2, 3)])
        y = cs.project([0.9, 0.9, -1.0, 5.0])
        assert np.allclose(y[:2], [0.5, 0.5], atol=1e-12)
        assert np.allclose(y[2:], [0.0, 2.0], atol=1e-12)

    def test_halfspace_projection(self):
        cs = Halfspaces([[1.0, 0.0]], [1.0])  # x <= 1
        assert np.allclose(cs.project([2.0, 0.3]), [1.0, 0.3], atol=1e-12)
        assert np.allclose(cs.project([0.5, 0.3]), [0.5, 0.3], atol=1e-15)

    def test_halfspaces_corner(self):
        cs = Halfspaces([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
        assert np.allclose(cs.project([3.0, 2.0]), [1.0, 1.0], atol=1e-12)

    def test_empty_halfspace_system_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            Halfspaces([[1.0], [-1.0]], [-1.0, -1.0])  # x <= -1 and x >= 1

    def test_too_many_halfspaces_rejected(self):
        with pytest.raises(ValueError, match="at most"):
            Halfspaces(np.ones((11, 2)), np.ones(11))

    def test_box_requires_ordered_bounds(self):
        with pytest.raises(ValueError):
            Box([1.0], [0.0])


class TestProjectionProperties:
    @pytest.mark.parametrize("seed", [0, 1])
    def test_nonexpansive(self, seed):
        rng = np.random.default_rng(seed)
        for cs in random_sets(rng):
            for _ in range(250):
                x = rng.normal(scale=2.0, size=cs.dim)
                y = rng.normal(scale=2.0, size=cs.dim)
                dist_proj = np.linalg.norm(cs.project(x) - cs.project(y))
                assert dist_proj <= np.linalg.norm(x - y) + 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        for cs in random_sets(rng):
            for _ in range(250):
                x = rng.normal(scale=2.0, size=cs.dim)
                once = cs.project(x)
                assert np.allclose(cs.project(once), once, atol=1e-12)

    def test_variational_characterization(self):
        rng = np.random.default_rng(3)
        for cs in random_sets(rng):
            for _ in range(10):
                x = rng.normal(scale=2.0, size=cs.dim)
                px = cs.project(x)
                for _ in range(100):
                    z = cs.project(rng.normal(scale=2.0, size=cs.dim))
                    assert float(np.dot(x - px, z - px)) <= 1e-9


class TestActiveSet:
    def test_box_upper_bound_active(self):
        cs = Box([0.0], [1.0])
        act = active_set(cs, [1.0], tol=1e-9)
        assert act.indices == (0,)  # the single finite upper bound

    def test_budget_active_at_face(self):
        cs = BudgetSimplex(budgets=[1.0], groups=[(0, 1)])
        act = active_set(cs, [0.5, 0.5], tol=1e-9)
        assert act.indices == (2,)  # 0,1 are positivity rows, 2 is the budget

    def test_interior_empty(self):
        cs = Box([0.0, 0.0], [1.0, 1.0])
        assert active_set(cs, [0.4, 0.6], tol=1e-9).indices == ()

    def test_grossly_infeasible_rejected(self):
        cs = Box([0.0], [1.0])
        with pytest.raises(InfeasiblePointError):
            active_set(cs, [1.5], tol=1e-9)

    def test_default_tolerance_is_scale_aware(self):
        theta = np.array([1e6, 0.0])
        assert default_active_tolerance(theta) == pytest.approx(1e-8 * (1.0 + 1e6))


class TestKtResidual:
    def test_unconstrained_is_gradient_norm(self):
        cs = Unconstrained(2)
        assert kt_residual(cs, [0.0, 0.0], [1.0, 2.0]) == pytest.approx(np.sqrt(5.0))

    def test_zero_gradient_interior(self):
        cs = Box([0.0, 0.0], [1.0, 1.0])
        assert kt_residual(cs, [0.5, 0.5], [0.0, 0.0]) == 0.0

    def test_outward_gradient_absorbed_at_bound(self):
        # At the upper bound with -g pointing outward, -g = 3 * dq with dq = +1.
        cs = Box([0.0], [1.0])
        assert kt_residual(cs, [1.0], [-3.0]) <= 1e-12

    def test_equals_gradient_norm_when_inactive(self):
        rng = np.random.default_rng(4)
        cs = Box([-1.0, -1.0], [1.0, 1.0])
        for _ in range(100):
            theta = rng.uniform(-0.5, 0.5, size=2)
            g = rng.normal(size=2)
            assert kt_residual(cs, theta, g) == pytest.approx(np.linalg.norm(g))

    def test_dependent_gradients_warn(self):
        # Two coinciding halfspaces make the active gradients dependent.
        cs = Halfspaces([[1.0, 0.0], [2.0, 0.0]], [1.0, 2.0])
        with pytest.warns(DependentGradientsWarning):
            kt_residual(cs, [1.0, 0.0], [1.0, 1.0])

    def test_tangential_component_survives(self):
        cs = Box([0.0], [1.0])
        # -g points inward: nothing absorbable, residual is |g|.
        assert kt_residual(cs, [1.0], [2.0]) == pytest.approx(2.0)


def halfspace_drift_limit(normal, theta, y):
    """Closed-form small-step drift on the boundary of a single halfspace."""
    e = np.asarray(normal, float) / np.linalg.norm(normal)
    outward = max(float(np.dot(y, e)), 0.0)
    return np.asarray(y, float) - outward * e


class TestProjectionDrift:
    def test_interior_is_exact(self):
        # Identity projection: drift equals y up to the rounding of theta + gamma*y.
        cs = Box([0.0, 0.0], [1.0, 1.0])
        theta = np.array([0.5, 0.5])
        y = np.array([0.3, -0.2])
        drift = projection_drift(cs, theta, y, 1e-3)
        assert np.allclose(drift, y, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("gamma", [1e-2, 1e-4, 1e-6])
    def test_outward_component_removed_on_boundary(self, gamma):
        cs = Halfspaces([[1.0, 0.0]], [1.0])
        drift = projection_drift(cs, [1.0, 0.0], [2.0, 1.0], gamma)
        assert np.allclose(drift, [0.0, 1.0], atol=1e-9)

    def test_inward_direction_untouched(self):
        cs = Halfspaces([[1.0, 0.0]], [1.0])
        drift = projection_drift(cs, [1.0, 0.0], [-2.0, 1.0], 1e-6)
        assert np.allclose(drift, [-2.0, 1.0], atol=1e-9)

    def test_matches_closed_form_on_random_halfspaces(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            dim = int(rng.integers(2, 5))
            normal = rng.normal(size=dim)
            normal /= np.linalg.norm(normal)
            offset = float(rng.normal())
            cs = Halfspaces([normal], [offset])
            base = rng.normal(size=dim)
            theta = base + (offset - float(normal @ base)) * normal  # on the boundary
            y = rng.normal(size=dim) * 3.0
            drift = projection_drift(cs, theta, y, 1e-6)
            assert np.allclose(drift, halfspace_drift_limit(normal, theta, y), atol=1e-4)

    def test_rejects_nonpositive_gamma(self):
        with pytest.raises(ValueError):
            projection_drift(Unconstrained(1), [0.0], [1.0], 0.0)
