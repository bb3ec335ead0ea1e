"""Deterministic CSV/JSON emission with versioned schemas.

Every file starts with a header block echoing the run configuration and the
tool version; numbers are always full-precision decimal strings so outputs
compare bytewise across runs and round-trip across languages.
"""
from __future__ import annotations

import json
from pathlib import Path


def config_echo(config) -> list:
    keys = ["q", "a", "precision_bits", "n_max", "gram_N", "convention",
            "theta_grid", "lambda_steps", "seed", "output_format", "threads"]
    return [f"#{k}={getattr(config, k)}" for k in keys]


def write_table(path: Path, schema: str, version: int, config, columns: list,
                rows: list, fmt: str, tool_version: str) -> Path:
    """Write rows (dicts keyed by the column names, values already strings)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        out = path.with_suffix(".csv")
        lines = [f"#schema={schema}/{version}", f"#tool=podles {tool_version}"]
        lines += config_echo(config)
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(str(row[c]) for c in columns))
        out.write_text("\n".join(lines) + "\n", encoding="ascii")
        return out
    if fmt == "json":
        out = path.with_suffix(".json")
        payload = {
            "schema": f"{schema}/{version}",
            "tool": f"podles {tool_version}",
            "config": {k.lstrip("#").split("=")[0]: k.split("=", 1)[1]
                       for k in config_echo(config)},
            "columns": columns,
            "rows": [{c: str(row[c]) for c in columns} for row in rows],
        }
        out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n",
                       encoding="ascii")
        return out
    raise ValueError(f"unknown output format {fmt!r}")


def failure_summary(failures: list) -> str:
    """Machine-readable summary printed when a command fails its invariants."""
    return json.dumps({"status": "fail", "failures": failures}, sort_keys=True)
