"""Replicated runs, metrics and per-cell statistics.

A cell is one (problem, switch threshold, len) combination. Every cell runs
the full replication count; replication i of every cell uses the seed
``derive_seed(base_seed, i)``, so a cell's numbers do not depend on which
other cells run or in what order. Results are always ordered by
(cell, replication), never by completion order.
"""

from __future__ import annotations

import logging
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from maoeacs.core import derive_seed, nondominated_indices, rng_stream
from maoeacs.harness.config import ExperimentConfig
from maoeacs.metrics import hypervolume, igd
from maoeacs.optimizer import AlgorithmConfig, run
from maoeacs.problems import ProblemSpec, make_problem, true_pf_sample

logger = logging.getLogger(__name__)

HV_STREAM = 1


@dataclass(frozen=True)
class Cell:
    index: int
    spec: ProblemSpec
    algorithm: AlgorithmConfig
    threshold: float
    len: int

    @property
    def label(self) -> str:
        return self.spec.label


@dataclass
class ReplicationResult:
    cell: int
    replication: int
    seed: int
    problem: str
    m: int
    threshold: float
    len: int
    fe: int | None = None
    igd: float | None = None
    hv: float | None = None
    switched_at: int | None = None
    wall_time: float = 0.0
    error: str | None = None
    trace: list[dict] | None = None
    final_objectives: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class CellSummary:
    cell: int
    problem: str
    m: int
    threshold: float
    len: int
    n_ok: int
    n_failed: int
    igd_mean: float | None
    igd_std: float | None
    hv_mean: float | None
    hv_std: float | None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list[Cell]
    runs: list[ReplicationResult]
    summaries: list[CellSummary]

    @property
    def n_failed(self) -> int:
        return sum(not r.ok for r in self.runs)


def mean_std(values) -> tuple[float | None, float | None]:
    """Mean and sample standard deviation; std is 0 for a single value."""
    v = np.asarray([x for x in values if x is not None], dtype=float)
    if len(v) == 0:
        return None, None
    std = float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
    return float(np.mean(v)), std


def build_cells(config: ExperimentConfig, sweep: bool = False) -> list[Cell]:
    """Cells of a plain run (one per problem) or of the sensitivity grid."""
    cells = []
    for spec in config.problems:
        problem = make_problem(spec)
        if sweep:
            grid = config.sweep.cells()
        else:
            resolved = config.algorithm.resolve(problem)
            grid = [(resolved.switch_threshold, resolved.len)]
        for threshold, length in grid:
            algorithm = replace(config.algorithm, switch_threshold=threshold, len=length)
            cells.append(Cell(len(cells), spec, algorithm, float(threshold), int(length)))
    return cells


@dataclass(frozen=True)
class _Task:
    cell: Cell
    replication: int
    seed: int
    reference: np.ndarray | None
    want_igd: bool
    want_hv: bool
    hv_samples: int
    keep_trace: bool


def _run_task(task: _Task) -> ReplicationResult:
    cell = task.cell
    result = ReplicationResult(
        cell=cell.index,
        replication=task.replication,
        seed=task.seed,
        problem=cell.label,
        m=cell.spec.m,
        threshold=cell.threshold,
        len=cell.len,
    )
    start = time.perf_counter()
    try:
        problem = make_problem(cell.spec)
        outcome = run(problem, replace(cell.algorithm, seed=task.seed))
        F = outcome.final_population.objectives
        result.fe = outcome.total_fe
        result.switched_at = outcome.switched_at
        result.final_objectives = F
        if task.reference is not None:
            if task.want_igd:
                result.igd = igd(F, task.reference)
            if task.want_hv:
                front = F[nondominated_indices(F)]
                hv_rng = rng_stream(derive_seed(task.seed, HV_STREAM))
                result.hv = hypervolume(front, task.reference, task.hv_samples, hv_rng)
        if task.keep_trace:
            result.trace = [record.to_dict() for record in outcome.trace]
    except Exception as exc:  # recorded per replication, the experiment goes on
        result.error = f"{type(exc).__name__}: {exc}"
        logger.debug("replication %d of cell %d failed\n%s", task.replication, cell.index, traceback.format_exc())
    result.wall_time = time.perf_counter() - start
    return result


def _reference_fronts(config: ExperimentConfig, cells: list[Cell]) -> dict[int, np.ndarray | None]:
    fronts: dict[ProblemSpec, np.ndarray | None] = {}
    for cell in cells:
        if cell.spec not in fronts:
            if cell.spec.family == "tabular":
                fronts[cell.spec] = None
            else:
                fronts[cell.spec] = true_pf_sample(cell.spec, config.reference_size)
    return {cell.index: fronts[cell.spec] for cell in cells}


def summarize(cells: list[Cell], runs: list[ReplicationResult]) -> list[CellSummary]:
    out = []
    for cell in cells:
        mine = [r for r in runs if r.cell == cell.index]
        ok = [r for r in mine if r.ok]
        igd_mean, igd_std = mean_std(r.igd for r in ok)
        hv_mean, hv_std = mean_std(r.hv for r in ok)
        out.append(
            CellSummary(
                cell=cell.index,
                problem=cell.label,
                m=cell.spec.m,
                threshold=cell.threshold,
                len=cell.len,
                n_ok=len(ok),
                n_failed=len(mine) - len(ok),
                igd_mean=igd_mean,
                igd_std=igd_std,
                hv_mean=hv_mean,
                hv_std=hv_std,
            )
        )
    return out


def run_experiment(config: ExperimentConfig, sweep: bool = False) -> ExperimentResult:
    """Execute every replication of every cell and aggregate the metrics.

    With ``config.jobs > 1`` replications run in worker processes; the
    returned runs are still ordered by (cell, replication). Tabular problems
    have no analytic front, so their metrics are left empty.
    """
    cells = build_cells(config, sweep=sweep)
    references = _reference_fronts(config, cells)
    tasks = [
        _Task(
            cell=cell,
            replication=i,
            seed=derive_seed(config.seed, i),
            reference=references[cell.index],
            want_igd=config.wants_igd,
            want_hv=config.wants_hv,
            hv_samples=config.hv_samples,
            keep_trace=config.trace,
        )
        for cell in cells
        for i in range(config.replications)
    ]
    logger.info("running %d replications over %d cells", len(tasks), len(cells))
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(config.jobs, len(tasks))) as pool:
            runs = list(pool.map(_run_task, tasks))
    else:
        runs = [_run_task(task) for task in tasks]
    for r in runs:
        if not r.ok:
            logger.warning("cell %d replication %d failed: %s", r.cell, r.replication, r.error)
    return ExperimentResult(config, cells, runs, summarize(cells, runs))
