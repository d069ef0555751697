"""Cesaro (C,1) regularisation of unit-panel integrals and trace diagnostics.

The pipeline is elements h_j -> partial integrals H_k -> running means of
the H_k.  The diagnostics (growth classification, asymptote crossings,
closest approach, quasi-period) all operate on the resulting
:class:`CesaroTrace`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError, InsufficientCrossings

# Growth-classification thresholds.
SLOPE_OVER_RESIDUAL = 10.0
MIN_DIVERGENT_SLOPE = 1e-3
MAX_CONVERGED_SLOPE = 1e-4
CONVERGED_REL_OSCILLATION = 0.01
CONVERGED_ABS_OSCILLATION = 0.05


@dataclass(frozen=True)
class CesaroTrace:
    elements: np.ndarray
    partial: np.ndarray
    means: np.ndarray
    t_grid: np.ndarray
    order: int = 1

    def __len__(self):
        return self.elements.size

    @property
    def final_mean(self) -> float:
        return float(self.means[-1])


def _element_array(elements) -> np.ndarray:
    vals = [getattr(e, "value", e) for e in elements]
    arr = np.asarray(vals)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("accumulate needs a non-empty 1-D sequence of elements")
    return arr


def accumulate(elements, order: int = 1, t_grid: Optional[Sequence[float]] = None) -> CesaroTrace:
    """Partial sums and running Cesaro means of a sequence of unit elements.

    ``elements`` may be numbers or :class:`~zetamoment.quadrature.UnitElement`.
    With ``order=1`` the averaged sequence is the partial integrals
    themselves; each extra order inserts one more cumulative summation before
    averaging (``order=2`` is the literal double sum).  ``t_grid`` defaults to
    the upper limits 1, 2, ..., n of the partial integrals.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    h = _element_array(elements)
    partial = np.cumsum(h)
    p = partial
    for _ in range(order - 1):
        p = np.cumsum(p)
    n = np.arange(1, h.size + 1)
    means = np.cumsum(p) / n
    if t_grid is None:
        starts = [getattr(e, "t_start", None) for e in elements]
        if all(s is not None for s in starts):
            t_grid = np.asarray(starts, dtype=float) + 1.0
        else:
            t_grid = n.astype(float)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.shape != h.shape:
        raise DomainError("t_grid must match the number of elements")
    return CesaroTrace(h, partial, means, t_grid, order)


class Verdict(str, enum.Enum):
    CONVERGED = "ConvergedTo"
    LINEAR_DIVERGENCE = "LinearDivergence"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class GrowthClassification:
    verdict: Verdict
    value: Optional[float]      # limit for ConvergedTo, None otherwise
    slope: float                # fitted slope of the means over the window
    fit_window: tuple           # (first index, last index + 1)
    fit_residual: float         # RMS residual of the line fit / window span
    oscillation: float          # peak-to-peak spread of the means in the last decile
    partial_slope: float        # fitted slope of the partial sums over the same window

    def __str__(self):
        if self.verdict is Verdict.CONVERGED:
            return f"ConvergedTo({self.value:.6g})"
        if self.verdict is Verdict.LINEAR_DIVERGENCE:
            return f"LinearDivergence(slope={self.slope:.6g})"
        return "Inconclusive"


def _line_fit(x, y):
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid ** 2)))


def classify_growth(trace: CesaroTrace, asymptote: Optional[float] = None) -> GrowthClassification:
    """Decide whether the Cesaro means settle, grow linearly, or neither.

    A straight line is fitted to the means over the last half of the trace.
    The RMS residual is divided by the span of the window so that it is a
    slope, comparable with the fitted one.  LinearDivergence needs
    |slope| > 10x that residual and > 1e-3.
    ConvergedTo needs |slope| < 1e-4 and a last-decile spread of the means
    below 1% of |asymptote| (0.05 absolute when the asymptote is 0).  When
    no asymptote is supplied the final mean stands in for it.
    """
    n = len(trace)
    if n < 200:
        raise DomainError("classify_growth needs at least 200 elements")
    lo = n // 2
    x = trace.t_grid[lo:]
    slope, _, rms = _line_fit(x, trace.means[lo:])
    resid = rms / max(x[-1] - x[0], 1.0)
    partial_slope, _, _ = _line_fit(x, trace.partial[lo:])
    tail = trace.means[n - max(1, n // 10):]
    spread = float(tail.max() - tail.min())
    ref = trace.final_mean if asymptote is None else asymptote
    band = CONVERGED_ABS_OSCILLATION if ref == 0 else CONVERGED_REL_OSCILLATION * abs(ref)

    if abs(slope) > SLOPE_OVER_RESIDUAL * resid and abs(slope) > MIN_DIVERGENT_SLOPE:
        verdict, value = Verdict.LINEAR_DIVERGENCE, None
    elif abs(slope) < MAX_CONVERGED_SLOPE and spread < band:
        verdict, value = Verdict.CONVERGED, trace.final_mean
    else:
        verdict, value = Verdict.INCONCLUSIVE, None
    return GrowthClassification(verdict, value, slope, (lo, n), resid, spread, partial_slope)


class Crossing(NamedTuple):
    T: float
    direction: int   # +1 upward through the asymptote, -1 downward


def crossing_events(trace: CesaroTrace, asymptote: float, series: str = "partial") -> list:
    """Linearly interpolated crossings of ``series`` through ``asymptote`` with direction."""
    y = trace.partial if series == "partial" else trace.means
    t = trace.t_grid
    d = y - asymptote
    above = d >= 0
    idx = np.nonzero(above[1:] != above[:-1])[0]
    out = []
    for k in idx:
        d0, d1 = d[k], d[k + 1]
        frac = 0.0 if d0 == d1 else d0 / (d0 - d1)
        out.append(Crossing(float(t[k] + frac * (t[k + 1] - t[k])), 1 if d1 > d0 else -1))
    return out


def crossings(trace: CesaroTrace, asymptote: float, series: str = "partial") -> list:
    """Abscissae where the partial sums (or means) cross ``asymptote``, ascending."""
    return [c.T for c in crossing_events(trace, asymptote, series)]


def debounce(events: Sequence[Crossing], min_gap: float) -> list:
    """Collapse bursts of crossings closer than ``min_gap`` into their net effect.

    A burst with an odd number of crossings is a single genuine crossing in
    the direction of its first member, placed at its middle member; an even
    burst is a graze and is dropped.
    """
    out = []
    i = 0
    events = list(events)
    while i < len(events):
        j = i
        while j + 1 < len(events) and events[j + 1].T - events[j].T < min_gap:
            j += 1
        burst = events[i:j + 1]
        if len(burst) % 2 == 1:
            out.append(Crossing(burst[len(burst) // 2].T, burst[0].direction))
        i = j + 1
    return out


class Approach(NamedTuple):
    T: float
    distance: float   # signed: positive when the means lie above the asymptote


def closest_approach(trace: CesaroTrace, asymptote: float) -> list:
    """Local minima of |means - asymptote|, refined by a 3-point parabola."""
    if len(trace) < 3:
        raise DomainError("closest_approach needs at least 3 elements")
    d = trace.means - asymptote
    ad = np.abs(d)
    t = trace.t_grid
    out = []
    for i in range(1, d.size - 1):
        if not (ad[i] <= ad[i - 1] and ad[i] <= ad[i + 1]):
            continue
        y0, y1, y2 = d[i - 1], d[i], d[i + 1]
        h = t[i + 1] - t[i]
        if (y0 > 0) == (y1 > 0) == (y2 > 0) and not (y0 == y1 == y2 == 0):
            denom = y0 - 2.0 * y1 + y2
            p = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
            p = min(max(p, -1.0), 1.0)
            out.append(Approach(float(t[i] + p * h), float(y1 - 0.25 * (y0 - y2) * p)))
        else:
            # the means themselves cross the asymptote here
            if y1 == 0 or y0 == y1 == y2:
                out.append(Approach(float(t[i]), 0.0))
            else:
                j = i - 1 if (y0 > 0) != (y1 > 0) else i
                frac = d[j] / (d[j] - d[j + 1])
                out.append(Approach(float(t[j] + frac * (t[j + 1] - t[j])), 0.0))
    return out


def principal_minima(approaches: Sequence[Approach], period: float, start: float = 0.0) -> list:
    """Closest approaches that are the deepest within +/- period/2 of themselves.

    Minima before ``start`` (typically the first asymptote crossing of the
    partial sums) are treated as start-up transient and ignored.
    """
    pool = [a for a in approaches if a.T >= start]
    keep = []
    for a in pool:
        rivals = [b for b in pool if b is not a and abs(b.T - a.T) <= 0.5 * period]
        if all(abs(a.distance) <= abs(b.distance) for b in rivals):
            if not keep or a.T - keep[-1].T > 0.5 * period:
                keep.append(a)
    return keep


class PeriodEstimate(NamedTuple):
    period: float
    phase_drift: float
    crossings: tuple        # debounced same-direction crossing abscissae used
    spacings: tuple


def period_estimate(trace: CesaroTrace, asymptote: float, min_gap: Optional[float] = None,
                    direction: int = 0) -> PeriodEstimate:
    """Quasi-period of the partial sums from same-direction asymptote crossings.

    Crossing bursts shorter than ``min_gap`` are collapsed first (see
    :func:`debounce`).  ``direction`` picks upward (+1) or downward (-1)
    crossings; 0 uses whichever direction occurs more often.  The period is
    the mean spacing; ``phase_drift`` is the slope of the spacings against
    their index.
    """
    events = crossing_events(trace, asymptote)
    if min_gap:
        events = debounce(events, min_gap)
    if direction == 0:
        ups = sum(1 for e in events if e.direction > 0)
        direction = 1 if ups >= len(events) - ups else -1
    same = [e.T for e in events if e.direction == direction]
    if len(events) < 4 or len(same) < 3:
        raise InsufficientCrossings(
            f"need at least 4 crossings (3 in one direction), found {len(events)}")
    spacing = np.diff(same)
    period = float(spacing.mean())
    if spacing.size >= 2:
        drift, _, _ = _line_fit(np.arange(spacing.size, dtype=float), spacing - period)
    else:
        drift = 0.0
    return PeriodEstimate(period, drift, tuple(same), tuple(float(s) for s in spacing))


def base_period(r: float) -> float:
    """2 pi / |ln r|, the period of the r^{it} factor."""
    if r <= 0 or r == 1:
        raise DomainError("base period needs r > 0, r != 1")
    return 2.0 * math.pi / abs(math.log(r))


def integer_ratio_residuals(spacings: Sequence[float], unit: float) -> np.ndarray:
    """Distance of spacing/unit to the nearest integer, as a fraction of ``unit``."""
    q = np.asarray(spacings, dtype=float) / unit
    return np.abs(q - np.round(q))
