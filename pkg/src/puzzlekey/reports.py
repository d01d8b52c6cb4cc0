"""Plot-ready CSV tables and JSON summaries for experiment results."""

from __future__ import annotations

import json
import math
from pathlib import Path

from . import __version__
from .experiments import ExperimentResult


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(float(v))
    return str(v)


def header_block(result: ExperimentResult, table: str) -> str:
    cfg = result.config
    lines = [
        f"puzzlekey {__version__}",
        f"experiment: {result.name}",
        f"table: {table}",
        f"config_digest: {cfg.digest()}",
        "effective config:",
    ]
    lines += ["  " + ln for ln in cfg.to_yaml().splitlines()]
    return "".join(f"# {ln}\n" for ln in lines)


def table_csv(result: ExperimentResult, table: str) -> str:
    rows = result.tables[table]
    cols = list(rows[0]) if rows else []
    out = [header_block(result, table), ",".join(cols) + "\n"]
    for r in rows:
        out.append(",".join(_fmt(r[c]) for c in cols) + "\n")
    return "".join(out)


def _jsonable(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def summary_json(result: ExperimentResult) -> str:
    doc = {
        "experiment": result.name,
        "version": __version__,
        "config_digest": result.config.digest(),
        "config": result.config.to_dict(),
        "reports": {k: r.to_dict() for k, r in result.reports.items()},
        "extra": result.extra,
    }
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def write_result(result: ExperimentResult, out_dir: str | Path) -> list[Path]:
    """Write one CSV per table, a JSON summary and the effective config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for table in sorted(result.tables):
        p = out / f"{table}.csv"
        p.write_text(table_csv(result, table))
        written.append(p)
    p = out / f"{result.name}_summary.json"
    p.write_text(summary_json(result))
    written.append(p)
    p = out / "effective_config.yaml"
    p.write_text(result.config.to_yaml())
    written.append(p)
    return written
