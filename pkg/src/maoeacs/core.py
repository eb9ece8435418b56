"""Domain types, Pareto dominance and the RNG contract.

Populations are stored column-wise: one ``(n, D)`` array of decision vectors
and one ``(n, m)`` array of objective vectors. A member's identity is its row
index, so selections are expressed as integer index arrays and subsets are
taken with :meth:`Population.take`.

Every stochastic routine in the package draws from an explicitly passed
:class:`numpy.random.Generator` built on PCG64 by :func:`rng_stream`.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an operation receives arguments outside its contract."""


class EvaluationError(RuntimeError):
    """Raised when an evaluator returns a malformed or non-finite result."""


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------

_SEED_MASK = (1 << 64) - 1


def rng_stream(seed: int) -> np.random.Generator:
    """Return a PCG64 generator seeded from a 64-bit integer.

    PCG64 and ``SeedSequence`` are bit-stable across platforms and numpy
    releases, so equal seeds give identical draw sequences everywhere.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & _SEED_MASK)))


def derive_seed(base_seed: int, index: int) -> int:
    """Derive the 64-bit seed of child stream ``index`` from ``base_seed``.

    The result depends only on ``(base_seed, index)``, never on the order in
    which children are requested.
    """
    if index < 0:
        raise InvalidInputError(f"stream index must be nonnegative, got {index}")
    seq = np.random.SeedSequence(int(base_seed) & _SEED_MASK, spawn_key=(int(index),))
    lo, hi = seq.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Solution:
    decision: np.ndarray
    objectives: np.ndarray
    birth_eval: int = 0


@dataclass
class Population:
    """Ordered multiset of solutions with a capacity target.

    Attributes:
        decisions: (n, D) decision vectors.
        objectives: (n, m) objective vectors.
        birth_evals: (n,) evaluation counter at creation of each member.
        capacity: target population size N.
    """

    decisions: np.ndarray
    objectives: np.ndarray
    birth_evals: np.ndarray
    capacity: int

    def __post_init__(self) -> None:
        self.decisions = np.atleast_2d(np.asarray(self.decisions, dtype=float))
        self.objectives = np.atleast_2d(np.asarray(self.objectives, dtype=float))
        self.birth_evals = np.asarray(self.birth_evals, dtype=np.int64).reshape(-1)
        n = len(self.objectives)
        if len(self.decisions) != n or len(self.birth_evals) != n:
            raise InvalidInputError("decisions, objectives and birth_evals must have equal length")
        if self.capacity <= 0:
            raise InvalidInputError(f"capacity must be positive, got {self.capacity}")

    @classmethod
    def from_objectives(cls, objectives, capacity: int | None = None) -> Population:
        """Wrap a bare objective cloud (decision vectors are empty)."""
        objs = np.atleast_2d(np.asarray(objectives, dtype=float))
        return cls(
            decisions=np.zeros((len(objs), 0)),
            objectives=objs,
            birth_evals=np.zeros(len(objs), dtype=np.int64),
            capacity=capacity or max(len(objs), 1),
        )

    def __len__(self) -> int:
        return len(self.objectives)

    def __getitem__(self, i: int) -> Solution:
        return Solution(self.decisions[i], self.objectives[i], int(self.birth_evals[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def m(self) -> int:
        return self.objectives.shape[1]

    def take(self, indices) -> Population:
        idx = np.asarray(indices, dtype=np.intp)
        return Population(self.decisions[idx], self.objectives[idx], self.birth_evals[idx], self.capacity)

    def merge(self, other: Population) -> Population:
        return Population(
            np.vstack([self.decisions, other.decisions]),
            np.vstack([self.objectives, other.objectives]),
            np.concatenate([self.birth_evals, other.birth_evals]),
            self.capacity,
        )


@dataclass(frozen=True)
class ProblemDefinition:
    """Evaluation contract for a box-constrained minimization problem.

    ``evaluator`` maps one decision vector to its objective vector. When
    ``batch_evaluator`` is given it must agree with ``evaluator`` row by row;
    it is used for speed only.
    """

    name: str
    m: int
    D: int
    lb: np.ndarray
    ub: np.ndarray
    evaluator: Callable[[np.ndarray], np.ndarray]
    batch_evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    pf_sampler: Callable[..., np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        lb = np.asarray(self.lb, dtype=float).reshape(-1)
        ub = np.asarray(self.ub, dtype=float).reshape(-1)
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)
        if len(lb) != self.D or len(ub) != self.D:
            raise InvalidInputError(f"bounds must have length D={self.D}")
        if not np.all(lb < ub):
            raise InvalidInputError("every lower bound must be strictly below its upper bound")
        if self.m < 1:
            raise InvalidInputError(f"objective count must be positive, got {self.m}")

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Evaluate a batch of decision vectors, checking shape and finiteness."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.batch_evaluator is not None:
            F = np.asarray(self.batch_evaluator(X), dtype=float)
        else:
            F = np.array([np.asarray(self.evaluator(x), dtype=float) for x in X]).reshape(len(X), -1)
        if F.shape != (len(X), self.m):
            raise EvaluationError(f"{self.name}: evaluator returned shape {F.shape}, expected {(len(X), self.m)}")
        if not np.all(np.isfinite(F)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(F), axis=1))[0])
            raise EvaluationError(f"{self.name}: non-finite objectives {F[bad].tolist()} at decision {X[bad].tolist()}")
        return F


# ---------------------------------------------------------------------------
# Dominance
# ---------------------------------------------------------------------------


def _objectives_of(pop) -> np.ndarray:
    F = pop.objectives if isinstance(pop, Population) else pop
    F = np.asarray(F, dtype=float)
    if F.ndim == 1:
        F = F.reshape(1, -1)
    if F.ndim != 2 or len(F) == 0:
        raise InvalidInputError("expected a nonempty (n, m) objective array")
    if not np.all(np.isfinite(F)):
        raise InvalidInputError("objective values must be finite")
    return F


def dominates(u: Sequence[float], v: Sequence[float]) -> bool:
    """Pareto dominance for minimization.

    Returns True iff ``u`` is no worse than ``v`` in every objective and
    strictly better in at least one. Equal vectors do not dominate each other.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise InvalidInputError(f"dominance needs two vectors of equal length, got {u.shape} and {v.shape}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise InvalidInputError("dominance is undefined for non-finite objectives")
    return bool(np.all(u <= v) and np.any(u < v))


def domination_matrix(F: np.ndarray) -> np.ndarray:
    """Boolean matrix ``D`` with ``D[i, j]`` true iff row i dominates row j."""
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def nondominated_mask(pop) -> np.ndarray:
    F = _objectives_of(pop)
    return ~domination_matrix(F).any(axis=0)


def nondominated_indices(pop) -> np.ndarray:
    """Indices (ascending) of members not dominated by any other member."""
    return np.flatnonzero(nondominated_mask(pop))


def nondominated_filter(pop):
    """Keep exactly the nondominated members, preserving order.

    Accepts a :class:`Population` (returns a Population) or an objective
    array (returns the filtered array). Duplicate objective vectors are all
    retained.
    """
    idx = nondominated_indices(pop)
    if isinstance(pop, Population):
        return pop.take(idx)
    return np.asarray(pop, dtype=float)[idx]


def nondominated_sort(pop) -> np.ndarray:
    """Pareto rank of every member, 0 for the first front.

    Rank r members are nondominated once all members of rank < r are removed.
    """
    F = _objectives_of(pop)
    dom = domination_matrix(F)
    counts = dom.sum(axis=0)
    ranks = np.full(len(F), -1, dtype=np.int64)
    front = np.flatnonzero(counts == 0)
    r = 0
    while front.size:
        ranks[front] = r
        counts = counts - dom[front].sum(axis=0)
        counts[ranks >= 0] = -1
        front = np.flatnonzero(counts == 0)
        r += 1
    return ranks
