"""CSV/JSON writers for histograms, count distributions and scalars.

Every file starts with the configuration that produced it, so identical
configurations give byte-identical files. Floats carry 12 significant digits.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

from .localstats import CountDistribution, Histogram

Format = Literal["csv", "json"]


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return float(fmt_float(v)) if math.isfinite(v) else fmt_float(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    if isinstance(v, Mapping):
        return {str(k): _json_value(x) for k, x in v.items()}
    return v


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: list[tuple]


def histogram_table(hist: Histogram) -> Table:
    e = hist.edges
    ref = hist.exponential_reference()
    rows = [(e[i], e[i + 1], hist.masses[i], ref[i]) for i in range(hist.num_bins)]
    return Table(("bin_lo", "bin_hi", "mass", "reference"), rows)


def distribution_table(dist: CountDistribution, k_max: int | None = None) -> Table:
    top = dist.masses.size - 1 if k_max is None else k_max
    return Table(("k", "mass", "stderr"), [(k, dist.mass(k), dist.err(k)) for k in range(top + 1)])


def scalar_table(values: Iterable[tuple[str, float, float]]) -> Table:
    return Table(("name", "value", "stderr"), list(values))


def _cell(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def render(table: Table, config: Mapping[str, object], fmt: Format = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        for key in sorted(config):
            buf.write(f"# {key}={config[key]}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "config": {str(k): _json_value(v) for k, v in sorted(config.items())},
            "columns": list(table.columns),
            "rows": [[_json_value(v) for v in row] for row in table.rows],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_table(path: Path, table: Table, config: Mapping[str, object], fmt: Format = "csv") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(table, config, fmt))
    return path


def write_json(path: Path, payload: Mapping, config: Mapping[str, object]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"config": _json_value(dict(config)), **_json_value(dict(payload))}
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return path


def read_csv(path: Path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Inverse of the CSV writer: (config, header, rows) as strings."""
    config: dict[str, str] = {}
    lines = Path(path).read_text().splitlines()
    body: Sequence[str] = []
    for i, line in enumerate(lines):
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            config[key] = value
        else:
            body = lines[i:]
            break
    rows = list(csv.reader(body))
    return config, rows[0], rows[1:]
