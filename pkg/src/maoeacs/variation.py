"""Reproduction operators and the exploitation-to-exploration switch.

Two offspring generators are used. The exploitative one perturbs corner
solutions with an annealed mutation whose step shrinks to zero as the
evaluation budget runs out. The explorative one applies SBX and polynomial
mutation over the whole population. A single probability ``delta`` picks the
generator once per generation; it flips to ``1 - delta`` the first time the
nadir estimate stops moving over a learning period.

Operators accept one vector or a stack of row vectors and always clamp their
output to the box.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from maoeacs.core import InvalidInputError, Population

if TYPE_CHECKING:
    from maoeacs.optimizer import AlgorithmConfig

Bounds = tuple[np.ndarray, np.ndarray]

NADIR_DENOMINATOR_FLOOR = 1e-12


def _check_in_bounds(X: np.ndarray, bounds: Bounds, what: str) -> None:
    lb, ub = bounds
    if np.any(X < lb) or np.any(X > ub):
        raise InvalidInputError(f"{what} outside box bounds")


# ---------------------------------------------------------------------------
# Explorative operators
# ---------------------------------------------------------------------------


def sbx_spread_factor(u, eta_c: float) -> np.ndarray:
    """SBX spread factor beta for uniform draws ``u``; beta(0.5) == 1."""
    u = np.asarray(u, dtype=float)
    e = 1.0 / (eta_c + 1.0)
    with np.errstate(divide="ignore"):
        return np.where(u <= 0.5, (2.0 * u) ** e, (2.0 - 2.0 * u) ** -e)


def sbx_crossover(p1, p2, eta_c: float, pc: float, bounds: Bounds, rng: np.random.Generator):
    """Simulated binary crossover.

    Each variable is recombined with probability 0.5, with a random sign on
    the spread so that the two children are symmetric about the parents'
    midpoint. A pair is left untouched when its trigger draw is >= ``pc``.

    Args:
        p1, p2: Parent vectors, or (n, D) stacks of parent pairs.
        eta_c: Distribution index, > 0.
        pc: Crossover probability per pair.
        bounds: (lb, ub) arrays of length D.
        rng: Random stream.

    Returns:
        Tuple of two children with the shape of the parents.
    """
    if eta_c <= 0:
        raise InvalidInputError(f"eta_c must be positive, got {eta_c}")
    a = np.asarray(p1, dtype=float)
    b = np.asarray(p2, dtype=float)
    single = a.ndim == 1
    a, b = np.atleast_2d(a), np.atleast_2d(b)
    if a.shape != b.shape:
        raise InvalidInputError("parents must have equal shape")
    _check_in_bounds(a, bounds, "parent")
    _check_in_bounds(b, bounds, "parent")
    n, d = a.shape

    beta = sbx_spread_factor(rng.random((n, d)), eta_c)
    beta = beta * np.where(rng.random((n, d)) < 0.5, -1.0, 1.0)
    # untouched variables copy the parents exactly instead of going through mid +- half
    keep = rng.random((n, d)) < 0.5
    keep |= (rng.random(n) >= pc)[:, None]

    mid = 0.5 * (a + b)
    half = 0.5 * (a - b)
    lb, ub = bounds
    c1 = np.clip(np.where(keep, a, mid + beta * half), lb, ub)
    c2 = np.clip(np.where(keep, b, mid - beta * half), lb, ub)
    if single:
        return c1[0], c2[0]
    return c1, c2


def polynomial_delta(u, x, lb, ub, eta_m: float) -> np.ndarray:
    """Normalized bounded polynomial perturbation for draws ``u``.

    With ``x`` at the lower bound and ``u < 0.5`` the perturbation is 0, and
    symmetrically at the upper bound, so mutants never leave the box.
    """
    u = np.asarray(u, dtype=float)
    span = ub - lb
    d1 = (x - lb) / span
    d2 = (ub - x) / span
    e = 1.0 / (eta_m + 1.0)
    low = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta_m + 1.0)) ** e - 1.0
    high = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta_m + 1.0)) ** e
    return np.where(u <= 0.5, low, high)


def polynomial_mutation(x, eta_m: float, pm: float, bounds: Bounds, rng: np.random.Generator) -> np.ndarray:
    """Bounded polynomial mutation, each variable mutated with probability ``pm``."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    lb, ub = bounds
    mask = rng.random(X.shape) < pm
    u = rng.random(X.shape)
    out = np.where(mask, X + polynomial_delta(u, X, lb, ub, eta_m) * (ub - lb), X)
    out = np.clip(out, lb, ub)
    return out[0] if single else out


# ---------------------------------------------------------------------------
# Exploitative operator
# ---------------------------------------------------------------------------


def annealing_exponent(fe: int, max_fe: int) -> float:
    return 0.7 * (-(1.0 - fe / max_fe))


def annealed_step(rand, fe: int, max_fe: int) -> np.ndarray:
    """Relative step 0.5*(rand-0.5)*(1-rand**alpha) of the exploitative mutation.

    ``alpha`` grows from -0.7 at the start of the budget to 0 at its end,
    where the step is exactly zero for every draw.
    """
    if max_fe <= 0:
        raise InvalidInputError(f"max_fe must be positive, got {max_fe}")
    if not 0 <= fe <= max_fe:
        raise InvalidInputError(f"fe={fe} outside [0, max_fe={max_fe}]")
    r = np.asarray(rand, dtype=float)
    alpha = annealing_exponent(fe, max_fe)
    with np.errstate(divide="ignore", over="ignore"):
        return 0.5 * (r - 0.5) * (1.0 - r**alpha)


def exploitative_mutate(x, fe: int, max_fe: int, pm: float, bounds: Bounds, rng: np.random.Generator) -> np.ndarray:
    """Annealed mutation around ``x``.

    Each component is mutated with probability ``pm`` by
    ``x_i + annealed_step(rand) * (ub_i - lb_i)`` and the result is clamped
    to the box. Accepts a vector or an (n, D) stack.
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    lb, ub = bounds
    mask = rng.random(X.shape) < pm
    step = annealed_step(rng.random(X.shape), fe, max_fe)
    with np.errstate(invalid="ignore"):
        moved = X + step * (ub - lb)
    out = np.clip(np.where(mask, moved, X), lb, ub)
    return out[0] if single else out


# ---------------------------------------------------------------------------
# Switch
# ---------------------------------------------------------------------------


@dataclass
class SwitchState:
    """Learning-period monitor for the nadir estimate.

    ``history`` keeps the last ``len + 1`` (iteration, nadir) pairs, enough
    to compare the newest estimate with the one ``len`` iterations earlier.
    """

    delta0: float
    threshold: float
    len: int
    delta: float = field(init=False)
    switched: bool = False
    switched_at: int | None = None
    last_change: float | None = None
    history: deque = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta0 <= 1.0:
            raise InvalidInputError(f"delta0 must be a probability, got {self.delta0}")
        if self.len < 1:
            raise InvalidInputError(f"learning period must be positive, got {self.len}")
        if self.threshold <= 0:
            raise InvalidInputError(f"switch threshold must be positive, got {self.threshold}")
        self.delta = self.delta0
        self.history = deque(maxlen=self.len + 1)


def nadir_change(current, previous) -> float:
    """Largest relative change between two nadir estimates."""
    cur = np.asarray(current, dtype=float)
    prev = np.asarray(previous, dtype=float)
    return float(np.max(np.abs(cur - prev) / np.maximum(np.abs(prev), NADIR_DENOMINATOR_FLOOR)))


def update_switch(state: SwitchState, t: int, current_nadir) -> SwitchState:
    """Record the nadir at iteration ``t`` and flip delta once it stagnates."""
    state.history.append((t, np.array(current_nadir, dtype=float)))
    if state.switched or len(state.history) <= state.len:
        return state
    t_old, old = state.history[0]
    if t - t_old != state.len:
        raise InvalidInputError(f"iterations must advance by one per call (window {t_old}..{t})")
    state.last_change = nadir_change(current_nadir, old)
    if state.last_change < state.threshold:
        state.delta = 1.0 - state.delta
        state.switched = True
        state.switched_at = t
    return state


# ---------------------------------------------------------------------------
# Reproduction
# ---------------------------------------------------------------------------


def exploitative_parents(n_corner: int, N: int) -> np.ndarray:
    """Parent schedule over the corner set producing exactly N offspring.

    Each corner member gets ``N // n_corner`` consecutive slots, then the
    remaining ``N % n_corner`` go round-robin from the first member.
    """
    if n_corner < 1:
        raise RuntimeError("exploitative reproduction needs a nonempty corner set")
    per = N // n_corner
    return np.concatenate([np.repeat(np.arange(n_corner), per), np.arange(N % n_corner)]).astype(np.intp)


def mating_pairs(n_parents: int, N: int, rng: np.random.Generator) -> np.ndarray:
    """(ceil(N/2), 2) parent indices from concatenated shuffles of the population."""
    n_pairs = -(-N // 2)
    need = 2 * n_pairs
    order = []
    while sum(len(o) for o in order) < need:
        order.append(rng.permutation(n_parents))
    return np.concatenate(order)[:need].reshape(n_pairs, 2)


def explorative_offspring(X: np.ndarray, N: int, config: AlgorithmConfig, bounds: Bounds, rng) -> np.ndarray:
    pairs = mating_pairs(len(X), N, rng)
    c1, c2 = sbx_crossover(X[pairs[:, 0]], X[pairs[:, 1]], config.eta_c, config.pc, bounds, rng)
    children = np.empty((2 * len(pairs), X.shape[1]))
    children[0::2] = c1
    children[1::2] = c2
    return polynomial_mutation(children[:N], config.eta_m, config.pm, bounds, rng)


def reproduce(
    P: Population,
    Pc: np.ndarray,
    state: SwitchState,
    fe: int,
    max_fe: int,
    config: AlgorithmConfig,
    rng: np.random.Generator,
    bounds: Bounds,
) -> tuple[np.ndarray, bool]:
    """Generate N = ``P.capacity`` offspring decision vectors.

    A single draw below ``state.delta`` selects the exploitative branch,
    which mutates the corner members ``Pc`` (indices into P); otherwise SBX
    and polynomial mutation run over all of P.

    Returns:
        (offspring decisions of shape (N, D), whether the exploitative branch ran)
    """
    N = P.capacity
    if rng.random() < state.delta:
        parents = P.decisions[np.asarray(Pc, dtype=np.intp)][exploitative_parents(len(Pc), N)]
        return exploitative_mutate(parents, min(fe, max_fe), max_fe, config.exploit_pm, bounds, rng), True
    return explorative_offspring(P.decisions, N, config, bounds, rng), False
