"""Multiuser power allocation over shared fading subchannels.

``n_users`` transmitter-receiver pairs share ``n_channels`` parallel
subchannels and interfere with each other.  The decision variable stacks
every user's per-channel powers into one vector, and each agent of the
distributed run keeps its own estimate of that full allocation.  The
objective is the weighted sum of ergodic rates; agents observe single
channel realizations, so their rate gradients are unbiased one-sample
estimates of the ergodic gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .constraints import BudgetSimplex, kt_residual
from .core import Problem
from .network import Graph


@dataclass(frozen=True, eq=False)
class PowerScenario:
    """Static parameters of the interference network."""

    n_users: int
    n_channels: int
    budgets: np.ndarray
    noise_vars: np.ndarray
    weights: np.ndarray
    channel_distribution: str | Callable = "exponential"

    def __post_init__(self) -> None:
        if self.n_users < 1 or self.n_channels < 1:
            raise ValueError("need at least one user and one subchannel")
        for name in ("budgets", "noise_vars", "weights"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if arr.shape != (self.n_users,):
                raise ValueError(f"{name} must have one entry per user")
            if np.any(arr <= 0.0):
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        """Length of the stacked allocation vector."""
        return self.n_users * self.n_channels

    def power_matrix(self, theta) -> np.ndarray:
        """Reshape a stacked allocation into (user, channel) form."""
        return np.asarray(theta, dtype=float).reshape(self.n_users, self.n_channels)

    def feasible_set(self) -> BudgetSimplex:
        """Nonnegative powers with one budget per user block."""
        return BudgetSimplex.per_user(self.n_users, self.n_channels, self.budgets)


def sample_channels(
    rng: np.random.Generator,
    n_users: int,
    n_channels: int,
    n_draws: int | None = None,
    distribution: str | Callable = "exponential",
) -> np.ndarray:
    """Draw i.i.d. channel power gains ``gains[j, i, k]`` (transmitter j,
    receiver i, subchannel k), optionally with a leading draw axis."""
    shape: tuple[int, ...] = (n_users, n_users, n_channels)
    if n_draws is not None:
        shape = (n_draws, *shape)
    if callable(distribution):
        gains = np.asarray(distribution(rng, shape), dtype=float)
        if gains.shape != shape:
            raise ValueError("channel sampler returned the wrong shape")
        return gains
    if distribution == "exponential":
        return rng.standard_exponential(shape)
    if distribution == "constant":
        return np.ones(shape)
    raise ValueError(f"unknown channel distribution {distribution!r}")


def _user_index(scenario: PowerScenario, user: int) -> int:
    if not 1 <= user <= scenario.n_users:
        raise ValueError(f"user index must lie in [1, {scenario.n_users}], got {user}")
    return user - 1


def _receiver_terms(scenario, theta, gains, i):
    """Per-channel signal and interference-plus-noise terms for receiver ``i``."""
    p = scenario.power_matrix(theta)
    incoming = gains[..., :, i, :]  # all transmitters toward receiver i
    own_gain = incoming[..., i, :]
    load = np.einsum("...jk,jk->...k", incoming, p)
    signal = own_gain * p[i]
    interference = load - signal
    return incoming, own_gain, signal, scenario.noise_vars[i] + interference


def rate(scenario: PowerScenario, theta, gains, user: int):
    """Achievable rate of ``user`` (natural log) for given gains.

    ``gains`` may carry leading batch axes, in which case an array of rates
    is returned.
    """
    i = _user_index(scenario, user)
    _, _, signal, floor = _receiver_terms(scenario, theta, gains, i)
    value = np.log1p(signal / floor).sum(axis=-1)
    return float(value) if np.ndim(value) == 0 else value


def rate_gradient(scenario: PowerScenario, theta, gains, user: int) -> np.ndarray:
    """Gradient of ``user``'s rate with respect to the full stacked allocation.

    The own-power components are ``gain / (floor + signal)`` per channel;
    the cross components are nonpositive, reflecting that other users'
    power only adds interference.  Supports leading batch axes on ``gains``.
    """
    i = _user_index(scenario, user)
    incoming, own_gain, signal, floor = _receiver_terms(scenario, theta, gains, i)
    total = floor + signal
    cross_factor = (signal / (floor * total))[..., None, :]
    grad = -incoming * cross_factor
    grad[..., i, :] = own_gain / total
    return grad.reshape(*gains.shape[:-3], scenario.dim)


def stochastic_oracle(
    scenario: PowerScenario, theta_blocks, rng: np.random.Generator
) -> np.ndarray:
    """Stacked ascent observations from one fresh channel realization.

    Agent ``i`` evaluates its weighted rate gradient at its own allocation
    estimate.  Conforms to the engine's oracle interface; the sign is an
    ascent direction, equivalent to descending the negated weighted ergodic
    sum rate.
    """
    theta_blocks = np.asarray(theta_blocks, dtype=float)
    if theta_blocks.shape != (scenario.n_users, scenario.dim):
        raise ValueError(
            f"expected blocks of shape {(scenario.n_users, scenario.dim)}, "
            f"got {theta_blocks.shape}"
        )
    gains = sample_channels(
        rng,
        scenario.n_users,
        scenario.n_channels,
        distribution=scenario.channel_distribution,
    )
    observations = np.empty_like(theta_blocks)
    for i in range(scenario.n_users):
        observations[i] = scenario.weights[i] * rate_gradient(
            scenario, theta_blocks[i], gains, i + 1
        )
    return observations


class ObjectiveEstimate(NamedTuple):
    value: float
    std_error: float


def estimate_objective(
    scenario: PowerScenario, theta, mc_trials: int, rng: np.random.Generator
) -> ObjectiveEstimate:
    """Monte-Carlo estimate of the weighted ergodic sum rate at ``theta``."""
    if mc_trials < 1:
        raise ValueError("mc_trials must be at least 1")
    gains = sample_channels(
        rng,
        scenario.n_users,
        scenario.n_channels,
        n_draws=mc_trials,
        distribution=scenario.channel_distribution,
    )
    totals = np.zeros(mc_trials)
    for i in range(scenario.n_users):
        totals += scenario.weights[i] * rate(scenario, theta, gains, i + 1)
    std_error = float(totals.std(ddof=1) / np.sqrt(mc_trials)) if mc_trials > 1 else 0.0
    return ObjectiveEstimate(value=float(totals.mean()), std_error=std_error)


def weighted_gradient_estimate(
    scenario: PowerScenario, theta, mc_trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Monte-Carlo estimate of the ascent gradient of the weighted ergodic sum rate."""
    if mc_trials < 1:
        raise ValueError("mc_trials must be at least 1")
    gains = sample_channels(
        rng,
        scenario.n_users,
        scenario.n_channels,
        n_draws=mc_trials,
        distribution=scenario.channel_distribution,
    )
    total = np.zeros(scenario.dim)
    for i in range(scenario.n_users):
        total += scenario.weights[i] * rate_gradient(scenario, theta, gains, i + 1).mean(axis=0)
    return total


#: Active-set tolerance for trace residuals of projected runs.  Iterates hover
#: an O(step size) distance off the boundary (own-power observations are
#: strictly positive, so projection is undone a little every round), which the
#: strict default tolerance would classify as "no constraint active".
RESIDUAL_ACTIVE_TOL = 1e-3


def build_power_problem(scenario: PowerScenario, mc_trials: int = 1000) -> Problem:
    """Wrap a scenario as an engine problem.

    The stationarity residual and the objective of trace records are
    Monte-Carlo estimates over fresh channel draws (the ergodic gradient has
    no closed form), evaluated with ``mc_trials`` samples each.
    """
    feasible = scenario.feasible_set()

    def oracle(blocks, rng):
        return stochastic_oracle(scenario, blocks, rng)

    def objective(average, rng):
        return estimate_objective(scenario, average, mc_trials, rng).value

    def residual(average, rng):
        ascent = weighted_gradient_estimate(scenario, average, mc_trials, rng)
        tol = RESIDUAL_ACTIVE_TOL * (1.0 + float(np.linalg.norm(average)))
        return kt_residual(feasible, average, -ascent, tol=tol)

    return Problem(
        dim=scenario.dim,
        n_agents=scenario.n_users,
        local_gradients=None,
        constraint=feasible,
        oracle=oracle,
        objective=objective,
        residual=residual,
    )


def random_feasible_start(
    scenario: PowerScenario, n_agents: int
) -> Callable[[np.random.Generator], np.ndarray]:
    """Sampler of stacked initial blocks, uniform on per-channel capped boxes.

    Each coordinate of user ``j`` is drawn from ``[0, budget_j / K]``, which
    keeps every user block inside its budget; projection is applied anyway
    as a guard.
    """
    caps = np.repeat(scenario.budgets / scenario.n_channels, scenario.n_channels)
    feasible = scenario.feasible_set()

    def sampler(rng: np.random.Generator) -> np.ndarray:
        blocks = rng.uniform(0.0, caps, size=(n_agents, scenario.dim))
        return np.stack([feasible.project(block) for block in blocks])

    return sampler


def four_user_scenario() -> PowerScenario:
    """Reference four-user network on two shared subchannels."""
    return PowerScenario(
        n_users=4,
        n_channels=2,
        budgets=np.ones(4),
        noise_vars=np.array([0.1, 0.05, 0.02, 0.1]),
        weights=np.array([0.3, 0.2, 0.3, 0.2]),
    )


def four_user_graph() -> Graph:
    """Communication topology matching the reference four-user network."""
    return Graph.from_edges(4, [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)])
