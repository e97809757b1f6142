"""Busemann-Selberg values on the diagonal plane diag(e^s, e^t, e^(-s-t)), as CSV."""
import csv
import logging
import math
from typing import IO, Iterator, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from dsdomain.core.busemann import BusemannSpec, busemann_value
from dsdomain.core.matcore import SpacePoint, SymMatrix
from dsdomain.errors import GridConfigError

logger = logging.getLogger(__name__)


class SliceGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    s_range: Tuple[float, float] = (-3.0, 3.0)
    t_range: Tuple[float, float] = (-3.0, 3.0)
    resolution: Tuple[int, int] = (101, 101)

    @model_validator(mode="after")
    def _check(self) -> "SliceGrid":
        for name, (lo, hi) in (("s", self.s_range), ("t", self.t_range)):
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
                raise GridConfigError(f"{name} range must be finite and increasing, got ({lo}, {hi})")
        if min(self.resolution) < 2:
            raise GridConfigError(f"resolution must be at least 2 per axis, got {self.resolution}")
        return self

    def points(self) -> Iterator[Tuple[float, float]]:
        for s in np.linspace(*self.s_range, self.resolution[0]):
            for t in np.linspace(*self.t_range, self.resolution[1]):
                yield float(s), float(t)


def slice_point(s: float, t: float) -> SpacePoint:
    diag = np.array([math.exp(s), math.exp(t), math.exp(-s - t)])
    return SpacePoint.normalize(SymMatrix(np.diag(diag).astype(object)))


def slice_values(spec: BusemannSpec, grid: SliceGrid) -> Iterator[Tuple[float, float, float]]:
    if spec.n != 3:
        raise GridConfigError("the diagonal slice is defined for n = 3")
    for s, t in grid.points():
        yield s, t, float(busemann_value(spec, slice_point(s, t)))


def emit_slice(spec: BusemannSpec, levels: Sequence[float], grid: SliceGrid, out: IO[str]) -> int:
    """Write s, t, value and one membership column per level; returns the row count"""
    levels: List[float] = [float(r) for r in levels]
    if any(r <= 0 for r in levels):
        raise GridConfigError("horoball levels must be positive")
    writer = csv.writer(out)
    writer.writerow(["s", "t", "value"] + [f"in_{r:g}" for r in levels])
    rows = 0
    for s, t, value in slice_values(spec, grid):
        writer.writerow([f"{s:.6f}", f"{t:.6f}", f"{value:.12g}"] + [int(value <= r) for r in levels])
        rows += 1
    logger.info("Wrote %d slice rows", rows)
    return rows
