"""CSV, JSON and point-file export of experiment results.

``runs.csv`` has one row per replication with the fixed header
:data:`RUN_COLUMNS`; ``cells.csv`` has one row per cell with
:data:`CELL_COLUMNS`. Floats are written with ``repr`` so they read back
bit for bit, and missing values are empty fields. Wall-clock times vary
between executions, so they live only in ``summary.json``; this keeps the
CSV files byte-identical across runs with equal configuration and seed.
Final populations go to ``fronts/`` in the tabular point format.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

from maoeacs import __version__
from maoeacs.harness.experiment import ExperimentResult
from maoeacs.problems import write_point_file

RUN_COLUMNS = (
    "cell",
    "problem",
    "m",
    "threshold",
    "len",
    "replication",
    "seed",
    "fe",
    "igd",
    "hv",
    "switched_at",
    "status",
)
CELL_COLUMNS = (
    "cell",
    "problem",
    "m",
    "threshold",
    "len",
    "n_ok",
    "n_failed",
    "igd_mean",
    "igd_std",
    "hv_mean",
    "hv_std",
)


def _field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_field(row[c]) for c in columns])


def front_path(out: Path, cell: int, replication: int) -> Path:
    return out / "fronts" / f"cell{cell:03d}_rep{replication:03d}.txt"


def export(result: ExperimentResult, out: str | Path) -> dict[str, Path]:
    """Write runs.csv, cells.csv, summary.json and the final fronts under ``out``.

    Returns:
        Mapping from artifact name to written path.

    Raises:
        OSError: when a file cannot be written; the message names the path.
    """
    out = Path(out)
    paths = {
        "runs": out / "runs.csv",
        "cells": out / "cells.csv",
        "summary": out / "summary.json",
    }
    try:
        (out / "fronts").mkdir(parents=True, exist_ok=True)
        run_rows = []
        for r in result.runs:
            row = {c: getattr(r, c, None) for c in RUN_COLUMNS}
            row["status"] = "ok" if r.ok else "failed"
            run_rows.append(row)
        _write_csv(paths["runs"], RUN_COLUMNS, run_rows)
        _write_csv(paths["cells"], CELL_COLUMNS, [asdict(s) for s in result.summaries])

        for r in result.runs:
            if r.final_objectives is not None:
                write_point_file(
                    front_path(out, r.cell, r.replication),
                    r.final_objectives,
                    comment=f"{r.problem} cell {r.cell} replication {r.replication} seed {r.seed}",
                )

        summary = {
            "version": __version__,
            "config": _config_dict(result),
            "failures": result.n_failed,
            "cells": [asdict(s) for s in result.summaries],
            "runs": [_run_dict(r, result.config.trace) for r in result.runs],
        }
        paths["summary"].write_text(json.dumps(summary, indent=2) + "\n")
    except OSError as exc:
        target = exc.filename or out
        raise OSError(exc.errno, f"cannot write results to {target}: {exc.strerror}") from None
    return paths


def _run_dict(r, with_trace: bool) -> dict:
    d = {
        "cell": r.cell,
        "replication": r.replication,
        "seed": r.seed,
        "problem": r.problem,
        "fe": r.fe,
        "igd": r.igd,
        "hv": r.hv,
        "switched_at": r.switched_at,
        "wall_time": r.wall_time,
        "error": r.error,
    }
    if with_trace:
        d["trace"] = r.trace
    return d


def _config_dict(result: ExperimentResult) -> dict:
    cfg = result.config
    return {
        "problems": [{"family": s.family, "m": s.m, "k": s.k, "D": s.D, "scale": s.scale} for s in cfg.problems],
        "algorithm": asdict(cfg.algorithm),
        "replications": cfg.replications,
        "seed": cfg.seed,
        "metric": cfg.metric,
        "reference_size": cfg.reference_size,
        "hv_samples": cfg.hv_samples,
        "jobs": cfg.jobs,
        "source": None if cfg.source is None else str(cfg.source),
    }


def read_runs_csv(path: str | Path) -> list[dict]:
    """Read ``runs.csv`` back with numeric columns converted."""
    ints = {"cell", "m", "len", "replication", "seed", "fe", "switched_at"}
    floats = {"threshold", "igd", "hv"}
    rows = []
    with Path(path).open(newline="") as fh:
        for raw in csv.DictReader(fh):
            row: dict = {}
            for key, value in raw.items():
                if value == "":
                    row[key] = None
                elif key in ints:
                    row[key] = int(value)
                elif key in floats:
                    row[key] = float(value)
                else:
                    row[key] = value
            rows.append(row)
    return rows
