"""Panel and result-table file formats.

Panels travel as wide CSV: optional ``#``-prefixed metadata lines (target
name, horizon), then a header ``t,y,f1,...,fK`` and one row per time point.
All cells must parse as finite decimals and ``t`` must be strictly
increasing.  Serialization uses round-trip-exact float formatting so a
write/parse/write cycle is byte-identical.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from .core import ForecastPanel
from .errors import MissingDataError, SchemaError
from .harness import ResultTable


def _fmt(value: float) -> str:
    return repr(float(value))


def write_panel(panel: ForecastPanel, target: str | Path | IO[str]) -> None:
    """Write a panel in the wide CSV schema."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            write_panel(panel, fh)
        return
    fh = target
    if panel.target is not None:
        fh.write(f"# target: {panel.target}\n")
    if panel.horizon_label is not None:
        fh.write(f"# horizon: {panel.horizon_label}\n")
    names = panel.names
    fh.write(",".join(["t", "y"] + names) + "\n")
    for i in range(panel.n_times):
        cells = [str(int(panel.times[i])), _fmt(panel.y[i])]
        cells += [_fmt(panel.forecasts[name][i]) for name in names]
        fh.write(",".join(cells) + "\n")


def _parse_cell(raw: str, row: int, column: str) -> float:
    if raw.strip() == "":
        raise MissingDataError(f"empty cell at data row {row}, column {column!r}")
    try:
        value = float(raw)
    except ValueError:
        raise SchemaError(f"cell at data row {row}, column {column!r} is not a decimal: {raw!r}") from None
    if not np.isfinite(value):
        raise MissingDataError(f"non-finite cell at data row {row}, column {column!r}: {raw!r}")
    return value


def parse_panel(source: str | Path | IO[str]) -> ForecastPanel:
    """Read a panel from the wide CSV schema, validating as it goes."""
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as fh:
            return parse_panel(fh)
    lines = source.read().splitlines()
    meta: dict[str, str] = {}
    body_start = 0
    for line in lines:
        if not line.startswith("#"):
            break
        body_start += 1
        stripped = line.lstrip("#").strip()
        if ":" in stripped:
            key, _, value = stripped.partition(":")
            meta[key.strip().lower()] = value.strip()
    body = lines[body_start:]
    body = [line for line in body if line.strip() != ""]
    if not body:
        raise SchemaError("panel file has no header row")
    header = next(csv.reader([body[0]]))
    if len(header) < 3 or header[0] != "t" or header[1] != "y":
        raise SchemaError(f"header must be t,y,f1,...,fK with K >= 1, got {header!r}")
    names = header[2:]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate forecast column names")

    times: list[int] = []
    ys: list[float] = []
    fc: dict[str, list[float]] = {name: [] for name in names}
    for r, line in enumerate(body[1:], start=1):
        cells = next(csv.reader([line]))
        if len(cells) != len(header):
            raise SchemaError(f"data row {r} has {len(cells)} cells, expected {len(header)}")
        t_val = _parse_cell(cells[0], r, "t")
        if t_val != int(t_val):
            raise SchemaError(f"time index at data row {r} is not an integer: {cells[0]!r}")
        times.append(int(t_val))
        ys.append(_parse_cell(cells[1], r, "y"))
        for name, raw in zip(names, cells[2:]):
            fc[name].append(_parse_cell(raw, r, name))
    if not times:
        raise SchemaError("panel file has no data rows")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise SchemaError("time index must be strictly increasing")

    horizon = None
    if "horizon" in meta:
        try:
            horizon = int(meta["horizon"])
        except ValueError:
            raise SchemaError(f"horizon metadata is not an integer: {meta['horizon']!r}") from None
    return ForecastPanel(
        times=np.asarray(times),
        y=np.asarray(ys),
        forecasts={name: np.asarray(v) for name, v in fc.items()},
        horizon_label=horizon,
        target=meta.get("target"),
    )


def write_result_table(table: ResultTable, target: str | Path | IO[str]) -> None:
    """Write a result table as CSV with ``#`` metadata lines up front."""
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            write_result_table(table, fh)
        return
    fh = target
    for key, value in table.metadata.items():
        fh.write(f"# {key}: {value}\n")
    fh.write("scenario,grid,method,point,se,n_reps\n")
    for row in table.rows:
        fh.write(
            ",".join(
                [row.scenario, row.grid, row.method, _fmt(row.point), _fmt(row.se), str(row.n_reps)]
            )
            + "\n"
        )


def result_table_to_string(table: ResultTable) -> str:
    buf = io.StringIO()
    write_result_table(table, buf)
    return buf.getvalue()
