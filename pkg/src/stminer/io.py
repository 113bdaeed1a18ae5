"""Dataset CSV reading and writing (``id,type,x[,y],t``)."""

from __future__ import annotations

import csv
import math

from .core import EmbeddingSpace, EventDataset, EventInstance

HEADERS = {1: ["id", "type", "x", "t"], 2: ["id", "type", "x", "y", "t"]}


class DataError(ValueError):
    """Malformed input data (bad header, unparsable or non-finite values)."""


def read_dataset(path, space: EmbeddingSpace | None = None) -> EventDataset:
    """Parse a dataset CSV; the embedding space defaults to the bounding box."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        header = [h.strip() for h in header] if header else header
        if header == HEADERS[1]:
            S = 1
        elif header == HEADERS[2]:
            S = 2
        else:
            raise DataError(f"{path}:1: unknown header {header!r}, expected id,type,x[,y],t")
        instances = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != S + 3:
                raise DataError(f"{path}:{lineno}: expected {S + 3} fields, got {len(row)}")
            try:
                coords = [float(v) for v in row[2:]]
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric coordinate in {row!r}") from None
            if not all(math.isfinite(c) for c in coords):
                raise DataError(f"{path}:{lineno}: non-finite coordinate in {row!r}")
            instances.append(EventInstance(row[0], row[1], tuple(coords[:S]), coords[S]))
    try:
        return EventDataset.from_instances(instances, space=space, spatial_dim=S)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_dataset(dataset: EventDataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADERS[dataset.spatial_dim])
        for e in dataset.instances:
            w.writerow([e.id, e.event_type, *(repr(c) for c in e.location), repr(e.time)])


def parse_space(text: str) -> EmbeddingSpace:
    """``x_lo,x_hi[,y_lo,y_hi],t_lo,t_hi`` -> EmbeddingSpace."""
    vals = [float(v) for v in text.split(",")]
    if len(vals) not in (4, 6):
        raise ValueError("space needs 4 (1-D) or 6 (2-D) comma-separated numbers")
    pairs = [(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]
    return EmbeddingSpace(tuple(pairs[:-1]), pairs[-1])
