"""Experiment configuration files.

The format is an INI file read with :mod:`configparser`. Keys are
case-insensitive, values are typed by key, and list-valued keys take
comma-separated items. Recognized sections and keys::

    [problem]
    family = DTLZ2              ; one or more families (required)
    m = 3                       ; one or more objective counts (required)
    k = 5                       ; distance variables, family default if absent
    scale = 1, 2, 4             ; scaled-DTLZ2 factors, 2**i if absent
    table = cloud.txt           ; point file, tabular family only

    [algorithm]
    N, delta0, switch_threshold_per_objective, switch_threshold, len,
    pc, eta_c, pm, eta_m, exploit_pm, max_fe, ideal_mode, axis_origin_ideal

    [experiment]
    replications = 1
    seed = 0
    metric = igd                ; igd, hv or both
    reference_size = 5000
    hv_samples = 1000000
    jobs = 1
    trace = false
    out = results               ; relative to the config file

    [sweep]
    thresholds = 1, 0.1, 0.01, 0.001, 0.0001, 0.00001
    lens = 10, 30, 50, 70, 90

Several families or objective counts give one cell per combination. The
sweep thresholds are absolute values of the switch threshold. Every error
names the file and, when it concerns a key, the line that holds it.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from maoeacs.core import InvalidInputError
from maoeacs.metrics import MC_DEFAULT_SAMPLES
from maoeacs.optimizer import AlgorithmConfig
from maoeacs.problems import ProblemSpec, canonical_family, load_tabular_problem

DEFAULT_THRESHOLDS = (1.0, 0.1, 0.01, 0.001, 0.0001, 0.00001)
DEFAULT_LENS = (10, 30, 50, 70, 90)
METRICS = ("igd", "hv", "both")


class ConfigError(InvalidInputError):
    """Raised for unreadable, malformed or invalid configuration files."""


@dataclass(frozen=True)
class SweepGrid:
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    lens: tuple[int, ...] = DEFAULT_LENS

    def cells(self) -> list[tuple[float, int]]:
        return [(t, n) for t in self.thresholds for n in self.lens]


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment.

    Attributes:
        problems: problem specs, one cell (or one grid) per entry.
        algorithm: algorithm parameters shared by every run; its ``seed``
            field is replaced by each replication's derived seed.
        replications: runs per cell.
        seed: base seed; replication i uses ``derive_seed(seed, i)``.
        metric: ``"igd"``, ``"hv"`` or ``"both"``.
        reference_size: points in the analytic reference front.
        hv_samples: Monte Carlo samples for hypervolume with m > 3.
        jobs: worker processes (1 runs in-process).
        trace: include per-generation traces in the JSON export.
        out: output directory.
        sweep: threshold/len grid for sweep mode.
        source: file the config was read from, if any.
    """

    problems: tuple[ProblemSpec, ...]
    algorithm: AlgorithmConfig = field(default_factory=AlgorithmConfig)
    replications: int = 1
    seed: int = 0
    metric: str = "igd"
    reference_size: int = 5000
    hv_samples: int = MC_DEFAULT_SAMPLES
    jobs: int = 1
    trace: bool = False
    out: Path = Path("results")
    sweep: SweepGrid = field(default_factory=SweepGrid)
    source: Path | None = None

    def __post_init__(self) -> None:
        if not self.problems:
            raise InvalidInputError("at least one problem is required")
        if self.replications < 1:
            raise InvalidInputError(f"replications must be at least 1, got {self.replications}")
        if self.metric not in METRICS:
            raise InvalidInputError(f"metric must be one of {', '.join(METRICS)}, got {self.metric!r}")
        if self.reference_size < 1:
            raise InvalidInputError("reference_size must be positive")
        if self.hv_samples < 1:
            raise InvalidInputError("hv_samples must be positive")
        if self.jobs < 1:
            raise InvalidInputError("jobs must be positive")
        if not self.sweep.thresholds or not self.sweep.lens:
            raise InvalidInputError("sweep grid needs at least one threshold and one len")
        if min(self.sweep.thresholds) <= 0 or min(self.sweep.lens) < 1:
            raise InvalidInputError("sweep thresholds must be positive and lens at least 1")
        self.algorithm.validate()

    @property
    def wants_igd(self) -> bool:
        return self.metric in ("igd", "both")

    @property
    def wants_hv(self) -> bool:
        return self.metric in ("hv", "both")

    def with_overrides(self, **changes) -> ExperimentConfig:
        """Copy with the non-None keyword values replaced (CLI overrides)."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _as_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _as_int(text: str) -> int:
    return int(text.strip().replace("_", ""))


def _as_list(convert):
    def parse(text: str) -> tuple:
        items = [item.strip() for item in text.split(",") if item.strip()]
        if not items:
            raise ValueError("expected at least one value")
        return tuple(convert(item) for item in items)

    return parse


_ALGORITHM_TYPES = {
    "n": ("N", _as_int),
    "delta0": ("delta0", float),
    "switch_threshold_per_objective": ("switch_threshold_per_objective", float),
    "switch_threshold": ("switch_threshold", float),
    "len": ("len", _as_int),
    "pc": ("pc", float),
    "eta_c": ("eta_c", float),
    "pm": ("pm", float),
    "eta_m": ("eta_m", float),
    "exploit_pm": ("exploit_pm", float),
    "max_fe": ("max_fe", _as_int),
    "ideal_mode": ("ideal_mode", str),
    "axis_origin_ideal": ("axis_origin_ideal", _as_bool),
}
assert {name for name, _ in _ALGORITHM_TYPES.values()} == {f.name for f in fields(AlgorithmConfig)} - {"seed"}

_SCHEMA = {
    "problem": {
        "family": _as_list(str),
        "m": _as_list(_as_int),
        "k": _as_int,
        "scale": _as_list(float),
        "table": str,
    },
    "algorithm": {key: conv for key, (_, conv) in _ALGORITHM_TYPES.items()},
    "experiment": {
        "replications": _as_int,
        "seed": _as_int,
        "metric": lambda s: s.strip().lower(),
        "reference_size": _as_int,
        "hv_samples": _as_int,
        "jobs": _as_int,
        "trace": _as_bool,
        "out": str,
    },
    "sweep": {
        "thresholds": _as_list(float),
        "lens": _as_list(_as_int),
    },
}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^([^\s#;=:][^=:]*?)\s*[=:]")


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    """Line number of every ``key = value`` line, keyed by (section, key)."""
    lines: dict[tuple[str, str], int] = {}
    section = None
    for number, line in enumerate(text.splitlines(), start=1):
        if m := _SECTION_RE.match(line):
            section = m.group(1).strip().lower()
            lines[(section, "")] = number
        elif section is not None and (m := _KEY_RE.match(line)):
            lines[(section, m.group(1).strip().lower())] = number
    return lines


class _Reader:
    def __init__(self, path: Path, text: str):
        self.path = path
        self.lines = _key_lines(text)

    def error(self, message: str, section: str | None = None, key: str | None = None) -> ConfigError:
        line = self.lines.get((section, key or "")) if section else None
        where = f"{self.path}:{line}" if line else str(self.path)
        label = f"[{section}] {key}: " if key else (f"[{section}]: " if section else "")
        return ConfigError(f"{where}: {label}{message}")


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read and validate an experiment configuration file.

    Raises:
        ConfigError: on I/O failure, syntax errors, unknown sections or keys,
            type errors and constraint violations, with the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror or exc}") from None
    reader = _Reader(path, text)

    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None, strict=True)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {' '.join(str(exc).split())}") from None

    values: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        name = section.strip().lower()
        if name not in _SCHEMA:
            raise reader.error(f"unknown section; expected one of {', '.join(_SCHEMA)}", name)
        schema = _SCHEMA[name]
        values[name] = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise reader.error(f"unknown key; expected one of {', '.join(schema)}", name, key)
            try:
                values[name][key] = schema[key](raw)
            except ValueError as exc:
                raise reader.error(f"invalid value {raw!r} ({exc})", name, key) from None

    problem = values.get("problem", {})
    for key in ("family", "m"):
        if key not in problem:
            raise reader.error(f"missing required key {key!r}", "problem")

    base = path.parent
    specs = []
    for family in problem["family"]:
        try:
            family = canonical_family(family)
        except InvalidInputError as exc:
            raise reader.error(str(exc), "problem", "family") from None
        if family == "tabular":
            if "table" not in problem:
                raise reader.error("tabular family needs a 'table' key", "problem", "family")
            try:
                specs.append(load_tabular_problem(base / str(problem["table"])))
            except InvalidInputError as exc:
                raise reader.error(str(exc), "problem", "table") from None
            continue
        for m in problem["m"]:
            scale = problem.get("scale")
            try:
                specs.append(
                    ProblemSpec(
                        family,
                        m,
                        k=problem.get("k"),
                        scale=scale if family == "scaled-DTLZ2" else None,
                    )
                )
            except InvalidInputError as exc:
                key = "scale" if scale is not None and "scale" in str(exc) else ("k" if "k must" in str(exc) else "m")
                raise reader.error(str(exc), "problem", key) from None

    algo_values = {_ALGORITHM_TYPES[key][0]: v for key, v in values.get("algorithm", {}).items()}
    try:
        algorithm = AlgorithmConfig(**algo_values)
        algorithm.validate()
    except InvalidInputError as exc:
        raise reader.error(str(exc), "algorithm", _offending_key(str(exc), values.get("algorithm", {}))) from None

    experiment = dict(values.get("experiment", {}))
    if "out" in experiment:
        experiment["out"] = base / str(experiment["out"])
    else:
        experiment["out"] = base / "results"
    sweep_values = values.get("sweep", {})
    sweep = SweepGrid(
        thresholds=tuple(sweep_values.get("thresholds", DEFAULT_THRESHOLDS)),
        lens=tuple(sweep_values.get("lens", DEFAULT_LENS)),
    )
    try:
        return ExperimentConfig(
            problems=tuple(specs), algorithm=algorithm, sweep=sweep, source=path, **experiment
        )
    except InvalidInputError as exc:
        message = str(exc)
        section = "sweep" if "sweep" in message else "experiment"
        key = _offending_key(message, values.get(section, {}))
        raise reader.error(message, section, key) from None


def _offending_key(message: str, section_values: dict) -> str | None:
    """The first key of the section that the validation message names."""
    for key in section_values:
        name = _ALGORITHM_TYPES[key][0] if key in _ALGORITHM_TYPES else key
        if re.search(rf"\b{re.escape(name)}\b", message):
            return key
    return None
