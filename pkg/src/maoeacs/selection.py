"""Environmental selection by dominance, space division and angles.

The merged population is reduced to its nondominated subset, the corner
solutions of that subset fix a nadir estimate, and the estimate splits the
objective space into an inside box and the outside. Surplus inside members
are thinned by greedy maximin selection on angles between normalized
objective vectors, seeded with the corner solutions; shortfalls are filled
by the candidates closest to the ideal point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from maoeacs.core import InvalidInputError, _objectives_of, nondominated_indices
from maoeacs.corner import corner_search, estimate_nadir

DENOMINATOR_FLOOR = 1e-12
NORM_FLOOR = 1e-12


def estimate_ideal(R1) -> np.ndarray:
    return _objectives_of(R1).min(axis=0)


def normalize(F, ideal, nadir) -> np.ndarray:
    """Map objectives affinely so the ideal goes to 0 and the nadir to 1.

    A collapsed objective (nadir equal to ideal) uses a denominator of 1e-12.
    """
    F = np.asarray(F, dtype=float)
    z = np.asarray(ideal, dtype=float)
    span = np.asarray(nadir, dtype=float) - z
    span = np.where(np.abs(span) < DENOMINATOR_FLOOR, DENOMINATOR_FLOOR, span)
    return (F - z) / span


def denormalize(Fn, ideal, nadir) -> np.ndarray:
    z = np.asarray(ideal, dtype=float)
    span = np.asarray(nadir, dtype=float) - z
    span = np.where(np.abs(span) < DENOMINATOR_FLOOR, DENOMINATOR_FLOOR, span)
    return np.asarray(Fn, dtype=float) * span + z


def _unit_rows(A: np.ndarray) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    norms = np.maximum(np.linalg.norm(A, axis=1, keepdims=True), NORM_FLOOR)
    return A / norms


def angle(a, b) -> float:
    """Angle in radians between two (normalized) objective vectors."""
    ua, ub = _unit_rows(a)[0], _unit_rows(b)[0]
    return float(np.arccos(np.clip(ua @ ub, -1.0, 1.0)))


def angle_matrix(A, B) -> np.ndarray:
    """Pairwise angles between rows of A and rows of B."""
    return np.arccos(np.clip(_unit_rows(A) @ _unit_rows(B).T, -1.0, 1.0))


def abs_select(Q, Pc, ideal, nadir, N: int) -> np.ndarray:
    """Greedy maximin angle selection.

    Starting from the corner members ``Pc`` (indices into Q), repeatedly adds
    the member of Q whose smallest angle to the already selected members is
    largest, until N members are selected. Ties go to the lowest index.

    Returns:
        Indices into Q in selection order: the corner members first, then
        each greedy pick.
    """
    F = _objectives_of(Q)
    pc = [int(i) for i in dict.fromkeys(np.asarray(Pc, dtype=np.intp).tolist())]
    if len(pc) > N:
        raise InvalidInputError(f"corner set of size {len(pc)} exceeds N={N}")
    if N > len(F):
        raise InvalidInputError(f"cannot select {N} of {len(F)} members")

    U = _unit_rows(normalize(F, ideal, nadir))
    selected = list(pc)
    remaining = np.ones(len(F), dtype=bool)
    remaining[pc] = False
    if len(selected) >= N:
        return np.asarray(selected[:N], dtype=np.intp)

    if selected:
        theta = np.arccos(np.clip(U @ U[selected].T, -1.0, 1.0)).min(axis=1)
    else:
        # min over an empty set: every member ties at +inf
        theta = np.full(len(F), np.inf)
    theta[~remaining] = -np.inf
    while len(selected) < N:
        k = int(np.argmax(theta))
        selected.append(k)
        remaining[k] = False
        theta[k] = -np.inf
        new = np.arccos(np.clip(U @ U[k], -1.0, 1.0))
        theta = np.where(remaining, np.minimum(theta, new), -np.inf)
    return np.asarray(selected, dtype=np.intp)


def partition_inside_outside(R1, nadir) -> tuple[np.ndarray, np.ndarray]:
    """Split indices into members inside the nadir box and those outside it.

    A member is outside when some objective strictly exceeds the nadir.
    """
    F = _objectives_of(R1)
    outside = np.any(F > np.asarray(nadir, dtype=float), axis=1)
    return np.flatnonzero(~outside), np.flatnonzero(outside)


def closest_to_ideal_fill(candidates, ideal, k: int) -> np.ndarray:
    """Indices of the ``k`` candidates nearest to the ideal point (Euclidean, raw units)."""
    F = _objectives_of(candidates)
    if k > len(F):
        raise InvalidInputError(f"asked for {k} of {len(F)} candidates")
    if k < 0:
        raise InvalidInputError("k must be nonnegative")
    dist = np.linalg.norm(F - np.asarray(ideal, dtype=float), axis=1)
    return np.argsort(dist, kind="stable")[:k]


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one environmental selection.

    Attributes:
        selected: indices into R of the N survivors.
        corners: indices into R of the corner solutions.
        ideal: ideal estimate used (running minimum if one was passed in).
        nadir: nadir estimate from the corner solutions.
        case: which branch produced the survivors.
    """

    selected: np.ndarray
    corners: np.ndarray
    ideal: np.ndarray
    nadir: np.ndarray
    case: str

    def corner_positions(self) -> np.ndarray:
        """Positions of the corner solutions inside ``selected`` (those that survived)."""
        pos = {int(s): i for i, s in enumerate(self.selected)}
        return np.asarray([pos[int(c)] for c in self.corners if int(c) in pos], dtype=np.intp)


def dsa_select(R, N: int, ideal=None, axis_origin_ideal: bool = False) -> SelectionResult:
    """Select N survivors from the merged population R (|R| > N).

    Args:
        R: Population or (n, m) objective array.
        N: Number of survivors.
        ideal: Previous ideal estimate. When given, the ideal is the running
            componentwise minimum of it and the current nondominated set.
        axis_origin_ideal: Measure axis distances in corner search from the
            ideal point instead of the origin. Off by default.
    """
    F = _objectives_of(R)
    if len(F) <= N:
        raise InvalidInputError(f"merged population of size {len(F)} must exceed N={N}")

    R1 = nondominated_indices(F)
    F1 = F[R1]
    z = estimate_ideal(F1)
    if ideal is not None:
        z = np.minimum(z, np.asarray(ideal, dtype=float))

    corners_local = corner_search(F1, origin=z if axis_origin_ideal else None)
    znad = estimate_nadir(F1[corners_local])
    corners = R1[corners_local]

    if len(R1) > N:
        inside_local, outside_local = partition_inside_outside(F1, znad)
        inside = R1[inside_local]
        if len(inside) > N:
            pc_local = _positions(inside, corners)
            if len(pc_local) > N:
                warnings.warn(f"{len(pc_local)} corner solutions exceed N={N}; keeping the first {N}", stacklevel=2)
                pc_local = pc_local[:N]
            chosen = inside[abs_select(F[inside], pc_local, z, znad, N)]
            case = "angle"
        elif len(inside) < N:
            outside = R1[outside_local]
            fill = outside[closest_to_ideal_fill(F[outside], z, N - len(inside))]
            chosen = np.concatenate([inside, fill])
            case = "fill-outside"
        else:
            chosen = inside
            case = "inside"
    elif len(R1) < N:
        rest = np.setdiff1d(np.arange(len(F)), R1)
        fill = rest[closest_to_ideal_fill(F[rest], z, N - len(R1))]
        chosen = np.concatenate([R1, fill])
        case = "fill-dominated"
    else:
        chosen = R1
        case = "exact"
    return SelectionResult(np.asarray(chosen, dtype=np.intp), corners, z, znad, case)


def _positions(members: np.ndarray, subset: np.ndarray) -> np.ndarray:
    pos = {int(v): i for i, v in enumerate(members)}
    return np.asarray([pos[int(s)] for s in subset if int(s) in pos], dtype=np.intp)
