"""Quality indicators: IGD and hypervolume (exact for m <= 3, Monte Carlo otherwise)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from maoeacs.core import InvalidInputError

MC_DEFAULT_SAMPLES = 1_000_000
_MC_CHUNK = 65_536
RANGE_FLOOR = 1e-12


def _points(S, what: str) -> np.ndarray:
    A = np.atleast_2d(np.asarray(S, dtype=float))
    if A.size == 0 or len(A) == 0:
        raise InvalidInputError(f"{what} is empty")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{what} has non-finite values")
    return A


def igd(S, reference) -> float:
    """Mean distance from each reference point to its nearest member of S."""
    A = _points(S, "solution set")
    R = _points(reference, "reference front")
    if A.shape[1] != R.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {A.shape[1]} vs {R.shape[1]}")
    nearest = np.empty(len(R))
    step = max(1, 4_000_000 // max(len(A), 1))
    sq_a = np.sum(A * A, axis=1)
    for start in range(0, len(R), step):
        block = R[start : start + step]
        d2 = np.sum(block * block, axis=1)[:, None] + sq_a[None, :] - 2.0 * block @ A.T
        # exact recomputation on the argmin keeps the result free of expansion error
        j = np.argmin(d2, axis=1)
        nearest[start : start + step] = np.linalg.norm(block - A[j], axis=1)
    return float(nearest.mean())


def _inside_box(S: np.ndarray, r: np.ndarray) -> np.ndarray:
    outside = np.any(S > r, axis=1)
    if outside.any():
        warnings.warn(f"{int(outside.sum())} point(s) outside the reference box ignored", stacklevel=3)
    return S[~outside]


def _hv2d(S: np.ndarray, r: np.ndarray) -> float:
    order = np.lexsort((S[:, 1], S[:, 0]))
    total = 0.0
    best_f2 = r[1]
    for x1, x2 in S[order]:
        if x2 < best_f2:
            total += (r[0] - x1) * (best_f2 - x2)
            best_f2 = x2
    return float(total)


def _hv3d(S: np.ndarray, r: np.ndarray) -> float:
    order = np.argsort(S[:, 2], kind="stable")
    S = S[order]
    levels = np.append(S[:, 2], r[2])
    total = 0.0
    for i in range(len(S)):
        height = levels[i + 1] - levels[i]
        if height > 0:
            total += _hv2d(S[: i + 1, :2], r[:2]) * height
    return float(total)


def hv_exact(S, ref) -> float:
    """Exact dominated hypervolume for 2 or 3 objectives.

    Points outside the box bounded by ``ref`` are dropped with a warning.
    """
    A = _points(S, "solution set")
    r = np.asarray(ref, dtype=float).reshape(-1)
    if A.shape[1] != len(r):
        raise InvalidInputError("reference point dimension mismatch")
    if A.shape[1] not in (2, 3):
        raise InvalidInputError(f"exact hypervolume supports m in (2, 3), got m={A.shape[1]}; use hv_monte_carlo")
    A = _inside_box(A, r)
    if len(A) == 0:
        return 0.0
    return _hv2d(A, r) if A.shape[1] == 2 else _hv3d(A, r)


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    n_samples: int

    def __float__(self) -> float:
        return self.value


def hv_monte_carlo(S, ref, n_samples: int = MC_DEFAULT_SAMPLES, rng: np.random.Generator | None = None) -> MonteCarloEstimate:
    """Monte Carlo hypervolume estimate with its standard error.

    Samples are uniform in the box spanned by the componentwise minimum of S
    and ``ref``; a sample hits when some point of S weakly dominates it.
    Sampling runs in fixed-size chunks so the estimate depends only on the
    generator state.
    """
    if n_samples <= 0:
        raise InvalidInputError(f"n_samples must be positive, got {n_samples}")
    if rng is None:
        raise InvalidInputError("hv_monte_carlo needs an explicit random stream")
    A = _points(S, "solution set")
    r = np.asarray(ref, dtype=float).reshape(-1)
    if A.shape[1] != len(r):
        raise InvalidInputError("reference point dimension mismatch")
    A = _inside_box(A, r)
    if len(A) == 0:
        return MonteCarloEstimate(0.0, 0.0, n_samples)
    lo = A.min(axis=0)
    volume = float(np.prod(r - lo))
    if volume <= 0.0:
        return MonteCarloEstimate(0.0, 0.0, n_samples)
    hits = 0
    rows_per_chunk = max(1, _MC_CHUNK // max(1, len(A) // 8 + 1))
    done = 0
    while done < n_samples:
        size = min(rows_per_chunk, n_samples - done)
        X = lo + rng.random((size, len(r))) * (r - lo)
        covered = np.zeros(size, dtype=bool)
        for p in A:
            covered |= np.all(p <= X, axis=1)
        hits += int(covered.sum())
        done += size
    p_hat = hits / n_samples
    return MonteCarloEstimate(p_hat * volume, float(np.sqrt(p_hat * (1.0 - p_hat) / n_samples)) * volume, n_samples)


def normalize_for_hv(S, reference) -> tuple[np.ndarray, np.ndarray]:
    """Scale S by the reference front's per-objective range; reference point 1.1."""
    A = _points(S, "solution set")
    R = _points(reference, "reference front")
    lo = R.min(axis=0)
    span = R.max(axis=0) - lo
    span = np.where(span < RANGE_FLOOR, RANGE_FLOOR, span)
    return (A - lo) / span, np.full(A.shape[1], 1.1)


def hypervolume(S, reference, n_samples: int = MC_DEFAULT_SAMPLES, rng: np.random.Generator | None = None) -> float:
    """Normalized hypervolume of S against a reference front.

    Exact for m <= 3, Monte Carlo (``n_samples`` draws from ``rng``) otherwise.
    """
    A, r = normalize_for_hv(S, reference)
    if A.shape[1] <= 3:
        return hv_exact(A, r)
    return hv_monte_carlo(A, r, n_samples, rng).value
