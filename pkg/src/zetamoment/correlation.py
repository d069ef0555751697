"""Interval statistics of zeta-derived signals and shifted-segment correlation.

Means are integral means, E(h) = (1/(L2 - L1)) * integral of h over
[L1, L2], computed with the adaptive quadrature of
:mod:`zetamoment.quadrature` on unit panels.  Variance, covariance and the
correlation coefficient follow from E in the usual way.
"""
from __future__ import annotations

import enum
import math
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateSegment, DomainError
from .quadrature import integrate_intervals
from .zeta import T_MAX, zeta

DEFAULT_SEG_LEN = 126.0
DEFAULT_RHO_STEP = 0.1
MODERATE_CORRELATION = 0.5
MIN_VARIANCE = 1e-14
DEFAULT_TOL = 1e-9


class SignalComponent(str, enum.Enum):
    ABS = "abs"
    ABS_SQ = "abs_sq"
    RE = "re"
    IM = "im"


def _component(z, comp: SignalComponent):
    if comp is SignalComponent.ABS:
        return np.abs(z)
    if comp is SignalComponent.ABS_SQ:
        return z.real * z.real + z.imag * z.imag
    if comp is SignalComponent.RE:
        return z.real.copy()
    return z.imag.copy()


@dataclass(frozen=True)
class SegmentCorrReport:
    sigma: Optional[float]
    component: Optional[str]
    L1: float
    L2: float
    rho: float
    e_f: float
    e_g: float
    var_f: float
    var_g: float
    cov: float
    cor: float


class _Memo:
    """Remember f on the last few node arrays; quadrature revisits them."""

    def __init__(self, f, size=8):
        self.f = f
        self.size = size
        self.store: OrderedDict = OrderedDict()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        key = (x.shape, hash(x.tobytes()))
        hit = self.store.get(key)
        if hit is not None and np.array_equal(hit[0], x):
            return hit[1]
        y = np.asarray(self.f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape).astype(float)
        self.store[key] = (x.copy(), y)
        if len(self.store) > self.size:
            self.store.popitem(last=False)
        return y


def _panels(L1, L2):
    if not L2 > L1:
        raise DomainError("need L2 > L1")
    count = max(1, int(math.ceil(L2 - L1 - 1e-12)))
    edges = np.linspace(L1, L2, count + 1)
    return edges[:-1], edges[1:]


def _integral(h, L1, L2, tol):
    a, b = _panels(L1, L2)
    vals, errs = integrate_intervals(h, a, b, tol / a.size)
    # ascending panel order keeps the total reproducible
    return vals.sum(), errs.sum()


def expectation(f: Callable, L1: float, L2: float, tol: float = DEFAULT_TOL) -> float:
    """Integral mean of ``f`` over [L1, L2]; the integral is accurate to ``tol``."""
    val, _ = _integral(_Memo(f), L1, L2, tol)
    return float(np.real(val)) / (L2 - L1)


def correlate(f: Callable, g: Callable, L1: float, L2: float, tol: float = DEFAULT_TOL,
              *, sigma=None, component=None, rho: float = 0.0) -> SegmentCorrReport:
    """Expectations, variances, covariance and correlation of f and g on [L1, L2]."""
    fm, gm = (f, g) if isinstance(f, _Memo) and isinstance(g, _Memo) else (_Memo(f), _Memo(g))
    width = L2 - L1
    first, _ = _integral(lambda x: fm(x) + 1j * gm(x), L1, L2, tol)
    second, _ = _integral(lambda x: fm(x) ** 2 + 1j * gm(x) ** 2, L1, L2, tol)
    cross, _ = _integral(lambda x: fm(x) * gm(x), L1, L2, tol)
    e_f, e_g = first.real / width, first.imag / width
    var_f = max(second.real / width - e_f * e_f, 0.0)
    var_g = max(second.imag / width - e_g * e_g, 0.0)
    cov = float(np.real(cross)) / width - e_f * e_g
    if var_f < MIN_VARIANCE or var_g < MIN_VARIANCE:
        raise DegenerateSegment(
            f"variance below {MIN_VARIANCE:g} on [{L1}, {L2}] (var_f={var_f:.3g}, var_g={var_g:.3g})")
    cor = float(np.clip(cov / math.sqrt(var_f * var_g), -1.0, 1.0))
    comp = component.value if isinstance(component, SignalComponent) else component
    return SegmentCorrReport(sigma, comp, float(L1), float(L2), float(rho), float(e_f), float(e_g),
                             float(var_f), float(var_g), float(cov), cor)


class ZetaSignal:
    """t -> component of zeta(sigma + i t), optionally read from a cache grid.

    With a cache the real and imaginary parts are interpolated by a quintic
    spline through the stored samples; this is only ever used for the
    correlation signals, never for quadrature of the moment integrals.
    """

    def __init__(self, sigma: float, component="abs", cache=None):
        self.sigma = float(sigma)
        self.component = SignalComponent(component)
        self.cache = cache
        self._spline = None
        if cache is not None:
            if cache.sigma != self.sigma:
                raise DomainError(f"cache is for sigma={cache.sigma}, not {self.sigma}")
            self._spline = cache.interpolator()

    def complex_values(self, t):
        t = np.asarray(t, dtype=float)
        if self._spline is not None:
            lo, hi = self.cache.t_range
            inside = (t >= lo) & (t <= hi)
            if inside.all():
                return self._spline(t)
            out = np.empty(t.shape, dtype=complex)
            out[inside] = self._spline(t[inside])
            out[~inside] = zeta(self.sigma + 1j * t[~inside])
            return out
        return zeta(self.sigma + 1j * t)

    def __call__(self, t):
        return _component(np.asarray(self.complex_values(t)), self.component)

    def shifted(self, rho: float):
        return lambda t: self(np.asarray(t, dtype=float) + rho)


def _check_window(sigma, L1, seg_len, rho):
    if L1 < 0 or seg_len <= 0 or rho < 0:
        raise DomainError("need L1 >= 0, seg_len > 0 and rho >= 0")
    if L1 + seg_len + rho > T_MAX:
        raise DomainError(f"shifted segment leaves the zeta domain |t| <= {T_MAX}")


def shifted_correlation(sigma: float, component="abs", L1: float = 0.0,
                        seg_len: float = DEFAULT_SEG_LEN, rho: float = 0.0,
                        tol: float = DEFAULT_TOL, cache=None) -> SegmentCorrReport:
    """Correlation of f(t) and f(t + rho) over [L1, L1 + seg_len], f a zeta component."""
    _check_window(sigma, L1, seg_len, rho)
    sig = ZetaSignal(sigma, component, cache)
    return correlate(_Memo(sig), _Memo(sig.shifted(rho)), L1, L1 + seg_len, tol,
                     sigma=sigma, component=sig.component, rho=rho)


class Peak(NamedTuple):
    rho: float
    cor: float


@dataclass(frozen=True)
class RhoScan:
    reports: tuple
    peaks: tuple

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)

    @property
    def rhos(self):
        return np.array([r.rho for r in self.reports])

    @property
    def cors(self):
        return np.array([r.cor for r in self.reports])


def find_peaks(rhos: Sequence[float], cors: Sequence[float],
               threshold: float = MODERATE_CORRELATION) -> list:
    """Interior local maxima above ``threshold``, refined by a 3-point parabola."""
    x = np.asarray(rhos, dtype=float)
    y = np.asarray(cors, dtype=float)
    out = []
    for i in range(1, y.size - 1):
        if y[i] > threshold and y[i] >= y[i - 1] and y[i] > y[i + 1]:
            y0, y1, y2 = y[i - 1], y[i], y[i + 1]
            denom = y0 - 2.0 * y1 + y2
            p = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
            h = 0.5 * (x[i + 1] - x[i - 1])
            out.append(Peak(float(x[i] + p * h), float(y1 - 0.25 * (y0 - y2) * p)))
    return out


def rho_grid(rho_from: float, rho_to: float, rho_step: float) -> np.ndarray:
    if not rho_step > 0:
        raise DomainError("rho_step must be positive")
    if rho_to < rho_from:
        raise DomainError("need rho_to >= rho_from")
    count = int(math.floor((rho_to - rho_from) / rho_step + 1e-9)) + 1
    return rho_from + rho_step * np.arange(count)


def scan_shifts(f: Callable, L1: float, seg_len: float, rhos: Sequence[float],
                tol: float = DEFAULT_TOL, threshold: float = MODERATE_CORRELATION,
                sigma=None, component=None) -> RhoScan:
    """Correlation of f(t) with f(t + rho) on [L1, L1 + seg_len] for each rho."""
    base = _Memo(f, size=64)
    reports = []
    for rho in rhos:
        shifted = _Memo(lambda t, _r=float(rho): f(np.asarray(t, dtype=float) + _r))
        reports.append(correlate(base, shifted, L1, L1 + seg_len, tol,
                                 sigma=sigma, component=component, rho=float(rho)))
    peaks = find_peaks([r.rho for r in reports], [r.cor for r in reports], threshold)
    return RhoScan(tuple(reports), tuple(peaks))


def _scan_chunk(sigma, component, L1, seg_len, rhos, tol, cache):
    sig = ZetaSignal(sigma, component, cache)
    return scan_shifts(sig, L1, seg_len, rhos, tol, sigma=sigma, component=sig.component).reports


def rho_scan(sigma: float, component="abs", L1: float = 0.0, seg_len: float = DEFAULT_SEG_LEN,
             rho_from: float = 120.0, rho_to: float = 145.0, rho_step: float = DEFAULT_RHO_STEP,
             tol: float = DEFAULT_TOL, cache=None, workers: int = 1,
             threshold: float = MODERATE_CORRELATION) -> RhoScan:
    """Shifted correlation over an ascending rho grid, with peaks above ``threshold``."""
    rhos = rho_grid(rho_from, rho_to, rho_step)
    _check_window(sigma, L1, seg_len, float(rhos[-1]))
    comp = SignalComponent(component)
    if workers > 1 and rhos.size > 1:
        parts = np.array_split(rhos, min(workers, rhos.size))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_scan_chunk, *zip(*[(sigma, comp, L1, seg_len, p, tol, cache)
                                                       for p in parts])))
        reports = tuple(r for c in chunks for r in c)
    else:
        reports = _scan_chunk(sigma, comp, L1, seg_len, rhos, tol, cache)
    peaks = find_peaks([r.rho for r in reports], [r.cor for r in reports], threshold)
    return RhoScan(tuple(reports), tuple(peaks))
