"""CSV result tables with a JSON metadata sidecar."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from . import __version__
from .analysis import MseReport
from .experiments import ExperimentResult, ResultRow, ratio_trend

HEADER = ("k", "n", "s", "estimator", "mse", "std_error", "trials", "seed")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def format_rows(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow([_fmt(r.k), _fmt(r.n), _fmt(r.s), r.estimator, _fmt(float(r.mse)),
                    _fmt(None if r.std_error is None else float(r.std_error)),
                    _fmt(r.trials), _fmt(r.seed)])
    return buf.getvalue()


def metadata(result: ExperimentResult) -> dict:
    from .config import config_hash

    meta = {
        "library": "minimax_ope",
        "version": __version__,
        "config_hash": config_hash(result.config),
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in result.config.as_dict().items() if k != "output_path"},
        "slopes": {name: {"slope": f.slope, "stderr": f.stderr, "points": f.points}
                   for name, f in result.slopes.items()},
    }
    if result.config.experiment == "competitive-ratio":
        meta["trend"] = ratio_trend(result)
    return meta


def write_result(result: ExperimentResult, path) -> Path:
    """Write ``path`` and ``path.meta.json``; returns the sidecar path."""
    path = Path(path)
    path.write_text(format_rows(result.rows))
    side = path.with_name(path.name + ".meta.json")
    side.write_text(json.dumps(metadata(result), indent=1, sort_keys=True) + "\n")
    return side


def _opt(raw: str, cast):
    return None if raw == "" else cast(raw)


def read_rows(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != HEADER:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        return [ResultRow(row["estimator"], float(row["mse"]), _opt(row["std_error"], float),
                          _opt(row["trials"], int), _opt(row["seed"], int),
                          _opt(row["k"], int), _opt(row["n"], float), _opt(row["s"], int))
                for row in reader]


def read_reports(path) -> list[MseReport]:
    """The per-estimator MSE rows of a result CSV (slope and ratio rows skipped)."""
    return [MseReport(r.mse, r.std_error, r.trials, r.estimator, r.n, r.k, r.seed)
            for r in read_rows(path)
            if r.k is not None and r.trials is not None and r.estimator != "competitive_ratio"]
