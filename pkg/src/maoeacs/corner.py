"""Corner solutions of a nondominated set and the nadir estimate built on them.

A set of corner solutions combines two selections over a nondominated set:
the members closest (perpendicular distance) to each coordinate axis, and
the per-objective minimizers. Members of the second group are kept only when
they extend beyond the nadir estimate implied by the first.

All selections return integer indices into the input so that callers can
reason about membership by identity rather than by objective value.
"""

from __future__ import annotations

import numpy as np

from maoeacs.core import InvalidInputError, _objectives_of


def validate_direction(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float).reshape(-1)
    if np.any(lam < 0) or not np.any(lam > 0):
        raise InvalidInputError(f"direction vector must be nonnegative and nonzero, got {lam.tolist()}")
    return lam


def axis_vector(i: int, m: int) -> np.ndarray:
    """Unit direction along objective axis ``i`` (0-based)."""
    e = np.zeros(m)
    e[i] = 1.0
    return e


def corner_directions(m: int) -> tuple[np.ndarray, np.ndarray]:
    """The two groups of corner direction vectors as (m, m) arrays.

    Row i of the first array has a zero at position i and ones elsewhere;
    row i of the second is the axis vector e^i.
    """
    return 1.0 - np.eye(m), np.eye(m)


def weighted_sum(objectives, lam) -> float:
    f = np.asarray(objectives, dtype=float).reshape(-1)
    w = np.asarray(lam, dtype=float).reshape(-1)
    if f.shape != w.shape:
        raise InvalidInputError(f"length mismatch: {len(f)} objectives, {len(w)} weights")
    return float(f @ w)


def perpendicular_distance(a, b) -> float:
    """Euclidean distance from point ``a`` to the line spanned by ``b``."""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise InvalidInputError("length mismatch")
    bb = float(b @ b)
    if bb <= 0.0:
        raise InvalidInputError("direction vector has zero norm")
    return float(np.linalg.norm(a - (a @ b) / bb * b))


def axis_distances(F: np.ndarray) -> np.ndarray:
    """(n, m) perpendicular distances of every row of F to every axis.

    The distance to axis i is the norm of the row with component i removed.
    """
    F2 = F * F
    m = F.shape[1]
    # summing the remaining squares avoids cancellation in |a|^2 - a_i^2
    return np.column_stack([np.sqrt(np.delete(F2, i, axis=1).sum(axis=1)) for i in range(m)])


def _unique_in_order(idx) -> np.ndarray:
    seen: dict[int, None] = {}
    for i in idx:
        seen.setdefault(int(i), None)
    return np.fromiter(seen, dtype=np.intp, count=len(seen))


def corner_axis_set(P, origin=None) -> np.ndarray:
    """Indices of the members closest to each coordinate axis.

    One argmin per axis, in axis order, with duplicates removed. Ties go to
    the lowest index.

    Args:
        P: Population or (n, m) objective array; assumed nondominated.
        origin: Optional point subtracted before measuring distances. The
            default measures on raw objective values.
    """
    F = _objectives_of(P)
    if origin is not None:
        F = F - np.asarray(origin, dtype=float)
    return _unique_in_order(np.argmin(axis_distances(F), axis=0))


def corner_min_set(P) -> np.ndarray:
    """Indices of the per-objective minimizers, in objective order, deduplicated."""
    F = _objectives_of(P)
    return _unique_in_order(np.argmin(F, axis=0))


def estimate_nadir(Pc) -> np.ndarray:
    """Componentwise maximum over a (corner) set."""
    return _objectives_of(Pc).max(axis=0)


def corner_search(P, origin=None) -> np.ndarray:
    """Corner solutions of a nondominated set.

    Starts from :func:`corner_axis_set`, estimates the nadir point from it,
    then adds each per-objective minimizer that exceeds that estimate in some
    objective. The result has at most 2m indices and is ordered axis-set
    first.
    """
    F = _objectives_of(P)
    axis_idx = corner_axis_set(F, origin=origin)
    znad = F[axis_idx].max(axis=0)
    chosen = list(axis_idx)
    for i in corner_min_set(F):
        if i not in chosen and np.any(F[i] > znad):
            chosen.append(int(i))
    return np.asarray(chosen, dtype=np.intp)
