"""The MaOEA-CS main loop: initialization, generation steps, and trace capture."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from maoeacs.core import InvalidInputError, Population, ProblemDefinition, nondominated_indices, rng_stream
from maoeacs.corner import corner_search, estimate_nadir
from maoeacs.metrics import igd
from maoeacs.selection import dsa_select, estimate_ideal
from maoeacs.variation import SwitchState, reproduce, update_switch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlgorithmConfig:
    """Parameters of one run. ``None`` fields are resolved against the problem.

    Defaults: N = 25*m, delta0 = 0.9, switch threshold = 0.001*m, len = 50,
    pc = 1, eta_c = 20, pm = 1/D, eta_m = 20, max_fe = max(100000, 10000*D).

    ``switch_threshold`` overrides the per-objective threshold with an
    absolute value. ``exploit_pm`` is the per-component probability of the
    exploitative mutation (1/D by default). ``ideal_mode`` is ``"running"``
    (componentwise minimum across generations) or ``"recompute"``.
    ``axis_origin_ideal`` measures corner axis distances from the ideal point;
    it is an extension and off by default.
    """

    N: int | None = None
    delta0: float = 0.9
    switch_threshold_per_objective: float = 0.001
    switch_threshold: float | None = None
    len: int = 50
    pc: float = 1.0
    eta_c: float = 20.0
    pm: float | None = None
    eta_m: float = 20.0
    exploit_pm: float | None = None
    max_fe: int | None = None
    seed: int = 0
    ideal_mode: str = "running"
    axis_origin_ideal: bool = False

    def resolve(self, problem: ProblemDefinition) -> AlgorithmConfig:
        m, D = problem.m, problem.D
        cfg = replace(
            self,
            N=25 * m if self.N is None else self.N,
            switch_threshold=self.switch_threshold_per_objective * m if self.switch_threshold is None else self.switch_threshold,
            pm=1.0 / D if self.pm is None else self.pm,
            exploit_pm=1.0 / D if self.exploit_pm is None else self.exploit_pm,
            max_fe=max(100_000, 10_000 * D) if self.max_fe is None else self.max_fe,
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.N is not None and self.N <= 0:
            raise InvalidInputError(f"N must be positive, got {self.N}")
        if not 0.0 <= self.delta0 <= 1.0:
            raise InvalidInputError(f"delta0 must lie in [0, 1], got {self.delta0}")
        if self.len < 1:
            raise InvalidInputError(f"len must be positive, got {self.len}")
        for name in ("pc", "pm", "exploit_pm"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise InvalidInputError(f"{name} must lie in [0, 1], got {v}")
        if self.eta_c <= 0 or self.eta_m <= 0:
            raise InvalidInputError("distribution indices must be positive")
        if self.switch_threshold is not None and self.switch_threshold <= 0:
            raise InvalidInputError("switch threshold must be positive")
        if self.switch_threshold_per_objective <= 0:
            raise InvalidInputError("switch threshold must be positive")
        if self.max_fe is not None and self.max_fe <= 0:
            raise InvalidInputError(f"max_fe must be positive, got {self.max_fe}")
        if self.ideal_mode not in ("running", "recompute"):
            raise InvalidInputError(f"ideal_mode must be 'running' or 'recompute', got {self.ideal_mode!r}")


@dataclass(frozen=True)
class GenerationRecord:
    iteration: int
    fe: int
    ideal: tuple[float, ...]
    nadir: tuple[float, ...]
    delta: float
    n_corners: int
    exploitative: bool | None
    igd: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    final_population: Population
    corners: np.ndarray
    trace: list[GenerationRecord]
    seed: int
    total_fe: int
    config: AlgorithmConfig
    switched_at: int | None = None


@dataclass
class OptimizerState:
    """Mutable state of a run between generations."""

    problem: ProblemDefinition
    config: AlgorithmConfig
    rng: np.random.Generator
    population: Population
    corners: np.ndarray
    switch: SwitchState
    ideal: np.ndarray
    nadir: np.ndarray
    fe: int
    t: int = 0
    trace: list[GenerationRecord] = field(default_factory=list)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.problem.lb, self.problem.ub

    @property
    def terminated(self) -> bool:
        return self.fe >= self.config.max_fe


def _record(state: OptimizerState, exploitative: bool | None, reference: np.ndarray | None) -> None:
    value = None if reference is None else igd(state.population.objectives, reference)
    state.trace.append(
        GenerationRecord(
            iteration=state.t,
            fe=state.fe,
            ideal=tuple(float(v) for v in state.ideal),
            nadir=tuple(float(v) for v in state.nadir),
            delta=float(state.switch.delta),
            n_corners=len(state.corners),
            exploitative=exploitative,
            igd=value,
        )
    )


def initialize(
    problem: ProblemDefinition,
    config: AlgorithmConfig,
    rng: np.random.Generator,
    reference: np.ndarray | None = None,
) -> OptimizerState:
    """Random population, reduced to its nondominated members, plus its corner set.

    ``config`` must already be resolved. The returned population may hold
    fewer than N members; its capacity stays N.
    """
    N = config.N
    X = problem.lb + rng.random((N, problem.D)) * (problem.ub - problem.lb)
    F = problem.evaluate(X)
    full = Population(X, F, np.arange(1, N + 1), capacity=N)
    P = full.take(nondominated_indices(F))
    Pc = corner_search(P.objectives, origin=P.objectives.min(axis=0) if config.axis_origin_ideal else None)
    switch = SwitchState(delta0=config.delta0, threshold=config.switch_threshold, len=config.len)
    nadir = estimate_nadir(P.objectives[Pc])
    state = OptimizerState(
        problem=problem,
        config=config,
        rng=rng,
        population=P,
        corners=Pc,
        switch=switch,
        ideal=estimate_ideal(P.objectives),
        nadir=nadir,
        fe=N,
    )
    update_switch(switch, 0, nadir)
    _record(state, None, reference)
    return state


def step(state: OptimizerState, reference: np.ndarray | None = None) -> OptimizerState:
    """One generation: reproduce, evaluate, select, update the switch."""
    if state.terminated:
        raise InvalidInputError("run already reached its evaluation budget")
    cfg = state.config
    P = state.population
    X, exploitative = reproduce(P, state.corners, state.switch, state.fe, cfg.max_fe, cfg, state.rng, state.bounds)
    F = state.problem.evaluate(X)
    Q = Population(X, F, state.fe + np.arange(1, len(X) + 1), capacity=cfg.N)
    state.fe += len(X)

    R = P.merge(Q)
    prior = state.ideal if cfg.ideal_mode == "running" else None
    sel = dsa_select(R.objectives, cfg.N, ideal=prior, axis_origin_ideal=cfg.axis_origin_ideal)
    state.population = R.take(sel.selected)
    state.corners = sel.corner_positions()
    state.ideal = sel.ideal
    state.nadir = sel.nadir
    state.t += 1
    was_switched = state.switch.switched
    update_switch(state.switch, state.t, sel.nadir)
    if state.switch.switched and not was_switched:
        logger.debug("delta switched to %.3f at iteration %d (fe=%d)", state.switch.delta, state.t, state.fe)
    _record(state, exploitative, reference)
    return state


def run(
    problem: ProblemDefinition,
    config: AlgorithmConfig,
    rng: np.random.Generator | None = None,
    reference: np.ndarray | None = None,
) -> RunResult:
    """Run until the evaluation budget is spent.

    Args:
        problem: Problem to minimize.
        config: Parameters; unresolved fields get their defaults.
        rng: Random stream; defaults to ``rng_stream(config.seed)``.
        reference: Optional reference front; when given, IGD is recorded in
            every trace entry.
    """
    cfg = config.resolve(problem)
    rng = rng_stream(cfg.seed) if rng is None else rng
    state = initialize(problem, cfg, rng, reference)
    while not state.terminated:
        step(state, reference)
    return RunResult(
        final_population=state.population,
        corners=state.corners,
        trace=state.trace,
        seed=cfg.seed,
        total_fe=state.fe,
        config=cfg,
        switched_at=state.switch.switched_at,
    )


def random_search(problem: ProblemDefinition, max_fe: int, rng: np.random.Generator, batch: int = 1000) -> np.ndarray:
    """Nondominated objectives of ``max_fe`` uniform random samples (baseline)."""
    front = np.empty((0, problem.m))
    done = 0
    while done < max_fe:
        size = min(batch, max_fe - done)
        X = problem.lb + rng.random((size, problem.D)) * (problem.ub - problem.lb)
        cand = np.vstack([front, problem.evaluate(X)])
        front = cand[nondominated_indices(cand)]
        done += size
    return front
