"""Deterministic CSV/JSON emission.

Data files carry no timestamps; wall-clock metadata goes to a separate
run_meta.json so that identical inputs yield byte-identical data files.
Floats are written with repr (shortest round-trip form).
"""

from __future__ import annotations

import json
import os


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_csv(path, columns: list[str], rows) -> None:
    """Write rows under a single '#'-prefixed header naming the columns."""
    lines = ["# " + ",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(cell) for cell in row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def write_run_meta(out_dir, argv, started_iso: str, duration_s: float) -> None:
    write_json(
        os.path.join(out_dir, "run_meta.json"),
        {"argv": list(argv), "started": started_iso, "duration_s": duration_s},
    )
