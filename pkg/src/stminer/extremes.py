"""Turn gridded observation series into extreme-event instances.

Per variable, observations at or below the low empirical quantile become
``Low-<var>`` events and those strictly above the high quantile become
``High-<var>`` events (a variable whose two quantiles coincide has no
extremes), located at the grid cell and timestamped with the
observation time (days since 1970-01-01 for calendar dates).
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import EmbeddingSpace, EventDataset, EventInstance
from .io import DataError

EPOCH = dt.date(1970, 1, 1)


@dataclass(frozen=True)
class CellSeries:
    variable: str
    location: tuple[float, ...]
    times: Sequence[float]
    values: Sequence[float]


def empirical_quantile(values: Sequence[float], q: float) -> float:
    """Order statistic at rank ceil(q * n) (1-based, clamped to [1, n])."""
    v = np.sort(np.asarray(values, dtype=float))
    if len(v) == 0:
        raise ValueError("empty series")
    k = min(max(math.ceil(q * len(v)), 1), len(v))
    return float(v[k - 1])


def extract_extremes(
    series: Iterable[CellSeries],
    q_lo: float = 0.01,
    q_hi: float = 0.99,
    omit: Iterable[str] = (),
    space: EmbeddingSpace | None = None,
) -> EventDataset:
    if not 0 < q_lo < q_hi < 1:
        raise ValueError("need 0 < q_lo < q_hi < 1")
    omit = set(omit)
    by_var: dict[str, list[CellSeries]] = {}
    for s in series:
        by_var.setdefault(s.variable, []).append(s)
    if not by_var:
        raise ValueError("empty series")

    instances: list[EventInstance] = []
    spatial_dim = None
    for var in sorted(by_var):
        cells = by_var[var]
        pooled = np.concatenate([np.asarray(c.values, dtype=float) for c in cells])
        pooled = pooled[~np.isnan(pooled)]
        if len(pooled) == 0:
            raise ValueError(f"empty series for {var!r}")
        lo, hi = empirical_quantile(pooled, q_lo), empirical_quantile(pooled, q_hi)
        low_type, high_type = f"Low-{var}", f"High-{var}"
        for cell in cells:
            spatial_dim = len(cell.location)
            for t, v in zip(cell.times, cell.values):
                if math.isnan(v):
                    continue
                if v > hi and high_type not in omit:
                    kind = high_type
                elif v <= lo < hi and low_type not in omit:
                    kind = low_type
                else:
                    continue
                instances.append(EventInstance(f"{kind}-{len(instances)}", kind, cell.location, t))
    types = {f"{k}-{v}" for v in by_var for k in ("Low", "High")} - omit
    return EventDataset.from_instances(instances, space=space, event_types=types,
                                       spatial_dim=spatial_dim)


def parse_time(text: str) -> float:
    """Numbers pass through; ISO dates become days since 1970-01-01."""
    try:
        return float(text)
    except ValueError:
        return float((dt.date.fromisoformat(text.strip()) - EPOCH).days)


def read_series(path) -> list[CellSeries]:
    """Read long-format observations ``variable,x[,y],t,value``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header == ["variable", "x", "t", "value"]:
            S = 1
        elif header == ["variable", "x", "y", "t", "value"]:
            S = 2
        else:
            raise DataError(f"{path}:1: unknown header {header!r}, expected variable,x[,y],t,value")
        acc: dict[tuple, tuple[list, list]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                loc = tuple(float(v) for v in row[1:1 + S])
                t = parse_time(row[1 + S])
                value = float(row[2 + S]) if row[2 + S].strip() else math.nan
            except (ValueError, IndexError):
                raise DataError(f"{path}:{lineno}: malformed row {row!r}") from None
            times, values = acc.setdefault((row[0], loc), ([], []))
            times.append(t)
            values.append(value)
    return [CellSeries(var, loc, times, values) for (var, loc), (times, values) in acc.items()]
