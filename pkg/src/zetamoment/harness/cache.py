"""On-disk grid of zeta samples along a vertical line.

File layout::

    # zeta-cache v1 sigma=0.5 t0=0.0 dt=0.05 n=7601
    0,-1.4603545088095868,0
    ...

Values are written with 17 significant digits, which round-trips IEEE
doubles exactly.  Writes go to a temporary file that is then renamed over
the target, so readers never observe a half-written cache.
"""
from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import make_interp_spline

from ..errors import DomainError, IncompatibleCache
from ..zeta import zeta

MAGIC = "zeta-cache v1"
_HEADER = re.compile(
    r"^#\s*zeta-cache v1\s+sigma=(?P<sigma>\S+)\s+t0=(?P<t0>\S+)\s+dt=(?P<dt>\S+)\s+n=(?P<n>\d+)\s*$"
)
SPLINE_DEGREE = 5

# Number of grids computed (as opposed to loaded) in this process.
computed_grids = 0


@dataclass(frozen=True)
class CacheGrid:
    sigma: float
    t_start: float
    dt: float
    count: int
    samples: np.ndarray = field(repr=False, compare=False)
    loaded: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if self.count != len(self.samples):
            raise DomainError("count must equal the number of samples")

    @property
    def t_values(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.count)

    @property
    def t_range(self):
        return self.t_start, self.t_start + self.dt * (self.count - 1)

    def header(self) -> str:
        return f"# {MAGIC} sigma={self.sigma!r} t0={self.t_start!r} dt={self.dt!r} n={self.count}"

    def matches(self, sigma, t_start, dt, count) -> bool:
        return (self.sigma, self.t_start, self.dt, self.count) == (float(sigma), float(t_start),
                                                                   float(dt), int(count))

    @cached_property
    def _spline(self):
        if self.count <= SPLINE_DEGREE:
            raise DomainError(f"need more than {SPLINE_DEGREE} samples to interpolate")
        return make_interp_spline(self.t_values, self.samples, k=SPLINE_DEGREE)

    def interpolator(self):
        """Quintic spline t -> zeta(sigma + i t) through the samples."""
        return self._spline


def compute_grid(sigma: float, t_start: float, dt: float, count: int) -> CacheGrid:
    global computed_grids
    if count < 1:
        raise DomainError("count must be >= 1")
    if not dt > 0:
        raise DomainError("dt must be positive")
    t = float(t_start) + float(dt) * np.arange(int(count))
    samples = np.asarray(zeta(float(sigma) + 1j * t), dtype=complex)
    computed_grids += 1
    return CacheGrid(float(sigma), float(t_start), float(dt), int(count), samples)


def write_cache(grid: CacheGrid, path) -> None:
    path = os.fspath(path)
    lines = [grid.header()]
    for t, z in zip(grid.t_values, grid.samples):
        lines.append(f"{t:.17g},{z.real:.17g},{z.imag:.17g}")
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".zeta-cache-", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cache(path) -> CacheGrid:
    with open(path) as fh:
        first = fh.readline().strip()
        m = _HEADER.match(first)
        if not m:
            raise IncompatibleCache(f"{path}: not a {MAGIC} file")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    sigma, t0, dt, n = float(m["sigma"]), float(m["t0"]), float(m["dt"]), int(m["n"])
    if data.shape != (n, 3):
        raise IncompatibleCache(f"{path}: header says {n} rows, found {data.shape[0]}")
    samples = data[:, 1] + 1j * data[:, 2]
    return CacheGrid(sigma, t0, dt, n, samples, loaded=True)


def cache_warm(sigma: float, t_start: float, dt: float, count: int, path) -> CacheGrid:
    """Load the grid at ``path`` if it matches the request, else compute and persist it.

    A file whose header disagrees with the request raises
    :class:`IncompatibleCache` instead of being silently overwritten.
    """
    if os.path.exists(path):
        grid = read_cache(path)
        if not grid.matches(sigma, t_start, dt, count):
            raise IncompatibleCache(
                f"{path} holds sigma={grid.sigma} t0={grid.t_start} dt={grid.dt} n={grid.count}, "
                f"requested sigma={sigma} t0={t_start} dt={dt} n={count}")
        return grid
    grid = compute_grid(sigma, t_start, dt, count)
    write_cache(grid, path)
    return grid
