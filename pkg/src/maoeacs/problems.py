"""Scalable box-constrained test problems and their analytic fronts.

Families:

    DTLZ1           linear front, sum(f) = 0.5, multimodal distance function
    DTLZ2           concave front, |f| = 1
    inverted-DTLZ2  inverted front, f = (1 + g) - DTLZ2(x), front 1 - |s| = 1
    scaled-DTLZ2    DTLZ2 with objective i multiplied by scale[i] (2**i by default)
    DTLZ5           degenerate front, a curve on the unit sphere
    DTLZ7           disconnected front, 2**(m-1) regions
    tabular         a fixed point cloud read from a text file

Decision variables of the DTLZ families live in [0, 1]^D with
D = m - 1 + k, where k counts the distance variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations
from pathlib import Path

import numpy as np

from maoeacs.core import InvalidInputError, ProblemDefinition, rng_stream


class UnsupportedError(InvalidInputError):
    """Raised when a family lacks the requested capability."""


class TabularLoadError(InvalidInputError):
    """Raised when a tabular point file cannot be parsed."""


FAMILIES = ("DTLZ1", "DTLZ2", "inverted-DTLZ2", "scaled-DTLZ2", "DTLZ5", "DTLZ7", "tabular")
_CANONICAL = {name.lower(): name for name in FAMILIES}
DEFAULT_K = {"DTLZ7": 20}


def canonical_family(name: str) -> str:
    try:
        return _CANONICAL[name.strip().lower()]
    except KeyError:
        raise InvalidInputError(f"unknown problem family {name!r}; choose from {', '.join(FAMILIES)}") from None


@dataclass(frozen=True)
class ProblemSpec:
    family: str
    m: int
    k: int | None = None
    scale: tuple[float, ...] | None = None
    table: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        family = canonical_family(self.family)
        object.__setattr__(self, "family", family)
        if self.m < 2:
            raise InvalidInputError(f"need at least 2 objectives, got m={self.m}")
        if family == "tabular":
            if self.table is None:
                raise InvalidInputError("tabular problems need a table; use load_tabular_problem")
            return
        k = DEFAULT_K.get(family, 5) if self.k is None else self.k
        if k < 1:
            raise InvalidInputError(f"k must be positive, got {k}")
        object.__setattr__(self, "k", int(k))
        if family == "scaled-DTLZ2":
            scale = tuple(2.0**i for i in range(self.m)) if self.scale is None else tuple(map(float, self.scale))
            if len(scale) != self.m or min(scale) <= 0:
                raise InvalidInputError("scale must hold m positive factors")
            object.__setattr__(self, "scale", scale)

    @property
    def D(self) -> int:
        if self.family == "tabular":
            return 1
        return self.m - 1 + self.k

    @property
    def label(self) -> str:
        return f"{self.family}-m{self.m}"


# ---------------------------------------------------------------------------
# Objective functions, vectorized over rows
# ---------------------------------------------------------------------------


def _spherical(theta: np.ndarray, radius: np.ndarray) -> np.ndarray:
    """Points on a sphere of the given radii from (n, m-1) angles."""
    n, mm1 = theta.shape
    m = mm1 + 1
    cos = np.cos(theta)
    sin = np.sin(theta)
    F = np.empty((n, m))
    for i in range(m):
        f = radius.copy()
        f *= np.prod(cos[:, : m - 1 - i], axis=1)
        if i > 0:
            f *= sin[:, m - 1 - i]
        F[:, i] = f
    return F


def _dtlz1(X: np.ndarray, m: int) -> np.ndarray:
    xm = X[:, m - 1 :]
    g = 100.0 * (xm.shape[1] + np.sum((xm - 0.5) ** 2 - np.cos(20.0 * np.pi * (xm - 0.5)), axis=1))
    F = np.empty((len(X), m))
    for i in range(m):
        f = 0.5 * (1.0 + g) * np.prod(X[:, : m - 1 - i], axis=1)
        if i > 0:
            f *= 1.0 - X[:, m - 1 - i]
        F[:, i] = f
    return F


def _dtlz2_g(X: np.ndarray, m: int) -> np.ndarray:
    return np.sum((X[:, m - 1 :] - 0.5) ** 2, axis=1)


def _dtlz2(X: np.ndarray, m: int) -> np.ndarray:
    return _spherical(X[:, : m - 1] * (np.pi / 2), 1.0 + _dtlz2_g(X, m))


def _inverted_dtlz2(X: np.ndarray, m: int) -> np.ndarray:
    r = 1.0 + _dtlz2_g(X, m)
    return r[:, None] - _spherical(X[:, : m - 1] * (np.pi / 2), r)


def _scaled_dtlz2(X: np.ndarray, m: int, scale: tuple[float, ...]) -> np.ndarray:
    return _dtlz2(X, m) * np.asarray(scale)


def _dtlz5(X: np.ndarray, m: int) -> np.ndarray:
    g = _dtlz2_g(X, m)
    theta = np.empty((len(X), m - 1))
    theta[:, 0] = X[:, 0] * (np.pi / 2)
    if m > 2:
        theta[:, 1:] = (np.pi / (4.0 * (1.0 + g)))[:, None] * (1.0 + 2.0 * g[:, None] * X[:, 1 : m - 1])
    return _spherical(theta, 1.0 + g)


def _psi(t: np.ndarray) -> np.ndarray:
    return t * (1.0 + np.sin(3.0 * np.pi * t))


def _dtlz7(X: np.ndarray, m: int) -> np.ndarray:
    k = X.shape[1] - m + 1
    g = 1.0 + 9.0 / k * np.sum(X[:, m - 1 :], axis=1)
    F = np.empty((len(X), m))
    F[:, : m - 1] = X[:, : m - 1]
    h = m - np.sum(X[:, : m - 1] / (1.0 + g)[:, None] * (1.0 + np.sin(3.0 * np.pi * X[:, : m - 1])), axis=1)
    F[:, m - 1] = (1.0 + g) * h
    return F


def _tabular(X: np.ndarray, table: np.ndarray) -> np.ndarray:
    rows = np.minimum((X[:, 0] * len(table)).astype(np.intp), len(table) - 1)
    return table[rows]


def _batch_function(spec: ProblemSpec):
    fam = spec.family
    if fam == "DTLZ1":
        return partial(_dtlz1, m=spec.m)
    if fam == "DTLZ2":
        return partial(_dtlz2, m=spec.m)
    if fam == "inverted-DTLZ2":
        return partial(_inverted_dtlz2, m=spec.m)
    if fam == "scaled-DTLZ2":
        return partial(_scaled_dtlz2, m=spec.m, scale=spec.scale)
    if fam == "DTLZ5":
        return partial(_dtlz5, m=spec.m)
    if fam == "DTLZ7":
        return partial(_dtlz7, m=spec.m)
    return partial(_tabular, table=spec.table)


def evaluate(spec: ProblemSpec, x) -> np.ndarray:
    """Objective vector of one decision vector (or rows of a 2-D array)."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != spec.D:
        raise InvalidInputError(f"{spec.label} expects {spec.D} variables, got {X.shape[1]}")
    if np.any(X < 0.0) or np.any(X > 1.0):
        raise InvalidInputError(f"{spec.label}: decision vector outside [0, 1]^{spec.D}")
    F = _batch_function(spec)(X)
    return F[0] if single else F


def make_problem(spec: ProblemSpec) -> ProblemDefinition:
    """Evaluation contract for ``spec`` (bounds [0, 1]^D)."""
    fn = _batch_function(spec)
    sampler = None if spec.family == "tabular" else partial(true_pf_sample, spec)
    return ProblemDefinition(
        name=spec.label,
        m=spec.m,
        D=spec.D,
        lb=np.zeros(spec.D),
        ub=np.ones(spec.D),
        evaluator=lambda x, fn=fn: fn(np.atleast_2d(np.asarray(x, dtype=float)))[0],
        batch_evaluator=fn,
        pf_sampler=sampler,
    )


# ---------------------------------------------------------------------------
# Analytic fronts
# ---------------------------------------------------------------------------


def simplex_lattice(H: int, m: int) -> np.ndarray:
    """All points of {w >= 0, sum(w) = 1} with coordinates in multiples of 1/H."""
    rows = []
    for bars in combinations(range(H + m - 1), m - 1):
        edges = np.array((-1,) + bars + (H + m - 1,))
        rows.append(np.diff(edges) - 1)
    return np.asarray(rows, dtype=float) / H


def _lattice_at_most(n: int, m: int) -> np.ndarray:
    H = 1
    while math.comb(H + 1 + m - 1, m - 1) <= n:
        H += 1
    if math.comb(H + m - 1, m - 1) > n:
        return np.empty((0, m))
    return simplex_lattice(H, m)


def _random_simplex(n: int, m: int, rng) -> np.ndarray:
    return rng.dirichlet(np.ones(m), size=n)


def _random_sphere(n: int, m: int, rng) -> np.ndarray:
    Z = np.abs(rng.standard_normal((n, m)))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def _sphere_sample(n: int, m: int, rng) -> np.ndarray:
    W = _lattice_at_most(n, m)
    W = W / np.linalg.norm(W, axis=1, keepdims=True)
    if len(W) < n:
        W = np.vstack([W, _random_sphere(n - len(W), m, rng)])
    return W


def _dtlz7_coordinate_quantiles(q: np.ndarray, resolution: int = 100_001) -> np.ndarray:
    """Map fractions q in [0, 1] onto the optimal set of one DTLZ7 position variable.

    With g at its minimum the last objective is 2m - sum(psi(f_i)), which
    is separable, so f is optimal iff every f_i is a strict running record
    of psi on [0, f_i].
    """
    t = np.linspace(0.0, 1.0, resolution)
    p = _psi(t)
    prev_max = np.concatenate([[-np.inf], np.maximum.accumulate(p)[:-1]])
    admissible = t[p > prev_max]
    return admissible[np.round(q * (len(admissible) - 1)).astype(np.intp)]


def _dtlz7_front(n: int, m: int) -> np.ndarray:
    r = max(2, math.ceil(n ** (1.0 / (m - 1))))
    axis = _dtlz7_coordinate_quantiles(np.linspace(0.0, 1.0, r))
    grid = np.stack(np.meshgrid(*([axis] * (m - 1)), indexing="ij"), axis=-1).reshape(-1, m - 1)
    pick = np.unique(np.round(np.linspace(0, len(grid) - 1, n)).astype(np.intp))
    T = grid[pick]
    last = 2.0 * m - np.sum(_psi(T), axis=1)
    return np.column_stack([T, last])


def true_pf_sample(spec: ProblemSpec, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """n points on the analytic Pareto front of ``spec``.

    Front surfaces (DTLZ1, DTLZ2 and its variants) use the largest simplex
    lattice with at most n points, topped up with uniform random points on
    the same surface to reach exactly n. DTLZ5 and DTLZ7 use deterministic
    grids on their parameterizations.
    """
    if spec.family == "tabular":
        raise UnsupportedError("tabular problems have no analytic front")
    if n < 1:
        raise InvalidInputError("n must be positive")
    rng = rng_stream(0) if rng is None else rng
    m = spec.m
    fam = spec.family
    if fam == "DTLZ1":
        W = _lattice_at_most(n, m)
        if len(W) < n:
            W = np.vstack([W, _random_simplex(n - len(W), m, rng)])
        return 0.5 * W
    if fam == "DTLZ2":
        return _sphere_sample(n, m, rng)
    if fam == "inverted-DTLZ2":
        return 1.0 - _sphere_sample(n, m, rng)
    if fam == "scaled-DTLZ2":
        return _sphere_sample(n, m, rng) * np.asarray(spec.scale)
    if fam == "DTLZ5":
        theta = np.full((n, m - 1), np.pi / 4)
        theta[:, 0] = np.linspace(0.0, np.pi / 2, n)
        return _spherical(theta, np.ones(n))
    return _dtlz7_front(n, m)


# ---------------------------------------------------------------------------
# Tabular point files
# ---------------------------------------------------------------------------


def read_point_file(path) -> np.ndarray:
    """Parse a whitespace-separated point file.

    Lines starting with ``#`` are comments; a ``# m=<int>`` header pins the
    expected column count. Every data row must have the same length and hold
    finite numbers.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise TabularLoadError(f"{path}: cannot read ({exc.strerror})") from exc
    declared_m = None
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].replace(" ", "")
            if body.startswith("m="):
                try:
                    declared_m = int(body[2:])
                except ValueError:
                    raise TabularLoadError(f"{path}:{lineno}: bad header {raw!r}") from None
            continue
        try:
            values = [float(tok) for tok in line.split()]
        except ValueError:
            raise TabularLoadError(f"{path}:{lineno}: non-numeric value in {raw!r}") from None
        if not all(math.isfinite(v) for v in values):
            raise TabularLoadError(f"{path}:{lineno}: non-finite value")
        if rows and len(values) != len(rows[0]):
            raise TabularLoadError(f"{path}:{lineno}: expected {len(rows[0])} columns, got {len(values)}")
        rows.append(values)
    if not rows:
        raise TabularLoadError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=float)
    if declared_m is not None and declared_m != table.shape[1]:
        raise TabularLoadError(f"{path}: header declares m={declared_m} but rows have {table.shape[1]} columns")
    return table


def write_point_file(path, points, comment: str | None = None) -> Path:
    """Write points in the format read by :func:`read_point_file`."""
    path = Path(path)
    P = np.atleast_2d(np.asarray(points, dtype=float))
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"# m={P.shape[1]}")
    lines.extend(" ".join(repr(float(v)) for v in row) for row in P)
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def load_tabular_problem(path) -> ProblemSpec:
    table = read_point_file(path)
    if table.shape[1] < 2:
        raise TabularLoadError(f"{path}: need at least 2 objective columns")
    return ProblemSpec("tabular", m=table.shape[1], table=table)
