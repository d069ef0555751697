"""Riemann zeta function and its first two derivatives for complex arguments.

Euler-Maclaurin summation is used throughout the strip -1 <= Re(s) <= 4,
|Im(s)| <= 5000.  For Re(s) < 0 the value of zeta itself is obtained from
the functional equation (derivatives stay on Euler-Maclaurin, which remains
a valid continuation there).

All entry points accept a scalar or an array.  Points are grouped by their
series length N, so the value returned for a given s never depends on what
else was in the batch; this keeps downstream sums bitwise reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import bernoulli

from .errors import DomainError, NonFiniteResult, PoleAtOne
from .gamma import log_sin, loggamma

SIGMA_MIN, SIGMA_MAX = -1.0, 4.0
T_MAX = 5000.0
POLE_GUARD = 1e-12
REFLECT_MIN_ABS = 0.25

_LOG2 = math.log(2.0)
_LOGPI = math.log(math.pi)


@dataclass(frozen=True)
class ZetaEvalParams:
    """Accuracy knobs for Euler-Maclaurin.

    ``min_terms`` is the floor on N; the height-dependent part
    ceil(|t|/pi) + ``extra_terms`` is always enforced on top of it.
    """

    min_terms: int = 30
    extra_terms: int = 10
    bernoulli_order: int = 30

    def __post_init__(self):
        if self.min_terms < 1 or self.extra_terms < 0:
            raise ValueError("series length parameters must be positive")
        if self.bernoulli_order < 2:
            raise ValueError("bernoulli_order must be >= 2")

    def series_terms(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        n = np.ceil(t / math.pi).astype(np.int64) + self.extra_terms
        return np.maximum(n, self.min_terms)


DEFAULT_PARAMS = ZetaEvalParams()

_B = bernoulli(2 * 64)
# c_k = B_{2k} / (2k)!, k = 1..64
_BERN_COEF = np.array([_B[2 * k] / math.factorial(2 * k) for k in range(1, 65)])

# Rows x terms per exp() block; bounds temporary memory to ~50 MB.
_BLOCK_ELEMS = 1 << 21


def _check_domain(s):
    if not np.all(np.isfinite(s)):
        raise DomainError("zeta argument must be finite")
    bad = (s.real < SIGMA_MIN) | (s.real > SIGMA_MAX) | (np.abs(s.imag) > T_MAX)
    if bad.any():
        raise DomainError(
            f"zeta argument {complex(s[bad][0])} outside the supported "
            f"rectangle {SIGMA_MIN} <= Re(s) <= {SIGMA_MAX}, |Im(s)| <= {T_MAX}"
        )
    if (np.abs(s - 1.0) < POLE_GUARD).any():
        raise PoleAtOne("zeta has a pole at s = 1")


def _em_block(s, n_terms, order, n_bern):
    """Derivatives 0..order of zeta at the points ``s`` using N = n_terms."""
    out = np.zeros((order + 1, s.size), dtype=complex)
    logj = np.log(np.arange(1, n_terms, dtype=float))
    rows = max(1, _BLOCK_ELEMS // max(1, n_terms))
    for lo in range(0, s.size, rows):
        sb = s[lo:lo + rows]
        e = np.exp(-np.outer(sb, logj))
        out[0, lo:lo + rows] = e.sum(axis=1)
        w = e
        for k in range(1, order + 1):
            w = w * (-logj)
            out[k, lo:lo + rows] = w.sum(axis=1)

    big_n = float(n_terms)
    log_n = math.log(big_n)
    x = np.exp(-s * log_n)  # N^{-s}
    sm1 = s - 1.0

    # N^{1-s}/(s-1) and its s-derivatives.
    f = big_n * x / sm1
    u = log_n + 1.0 / sm1
    tail = [f + 0.5 * x]
    if order >= 1:
        tail.append(-f * u + 0.5 * x * (-log_n))
    if order >= 2:
        tail.append(f * (u * u + 1.0 / (sm1 * sm1)) + 0.5 * x * log_n * log_n)

    # Bernoulli corrections: sum_k c_k Q_k(s) N^{-s}, Q_k = s(s+1)...(s+2k-2) / N^{2k-1}.
    q = [s / big_n, np.ones_like(s) / big_n, np.zeros_like(s)]
    acc = [np.zeros_like(s) for _ in range(3)]
    n2 = big_n * big_n
    for k in range(1, n_bern + 1):
        c = _BERN_COEF[k - 1]
        for i in range(3):
            acc[i] = acc[i] + c * q[i]
        a = (s + (2 * k - 1)) * (s + 2 * k) / n2
        da = (2.0 * s + (4 * k - 1)) / n2
        dda = 2.0 / n2
        q = [q[0] * a, q[1] * a + q[0] * da, q[2] * a + 2.0 * q[1] * da + q[0] * dda]

    binom = ((1,), (1, 1), (1, 2, 1))
    for m in range(order + 1):
        corr = np.zeros_like(s)
        for i in range(m + 1):
            corr = corr + binom[m][i] * acc[i] * (-log_n) ** (m - i)
        out[m] += tail[m] + x * corr
    return out


def _zeta_em(s, order=0, params=DEFAULT_PARAMS):
    """Euler-Maclaurin derivatives 0..order at an array of points."""
    s = np.asarray(s, dtype=complex).ravel()
    out = np.empty((order + 1, s.size), dtype=complex)
    n_of = params.series_terms(s.imag)
    uniq, inverse = np.unique(n_of, return_inverse=True)
    for g, n_terms in enumerate(uniq):
        idx = np.nonzero(inverse == g)[0]
        out[:, idx] = _em_block(s[idx], int(n_terms), order, params.bernoulli_order)
    return out


def _zeta_functional(s, params=DEFAULT_PARAMS):
    """zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s), evaluated in log space."""
    one_minus = 1.0 - s
    reflected = _zeta_em(one_minus, 0, params)[0]
    log_factor = s * _LOG2 + (s - 1.0) * _LOGPI + log_sin(0.5 * np.pi * s) + loggamma(one_minus)
    return np.exp(log_factor) * reflected


def _finish(values, scalar, what):
    if not np.all(np.isfinite(values)):
        raise NonFiniteResult(f"{what} overflowed or produced NaN")
    return complex(values[0]) if scalar else values


def zeta(s, params: ZetaEvalParams = DEFAULT_PARAMS):
    """Riemann zeta function at complex ``s`` (scalar or array)."""
    scalar = np.ndim(s) == 0
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    shape = arr.shape
    flat = arr.ravel()
    _check_domain(flat)
    out = np.empty_like(flat)
    # near s = 0 the reflection 1 - s loses precision; the series is valid there
    left = (flat.real < 0.0) & (np.abs(flat) >= REFLECT_MIN_ABS)
    if left.any():
        out[left] = _zeta_functional(flat[left], params)
    right = ~left
    if right.any():
        out[right] = _zeta_em(flat[right], 0, params)[0]
    return _finish(out.reshape(shape), scalar, "zeta")


def zeta_derivative(s, m: int = 1, params: ZetaEvalParams = DEFAULT_PARAMS):
    """m-th derivative of zeta (m in {0, 1, 2}) by differentiated Euler-Maclaurin."""
    if m not in (0, 1, 2):
        raise DomainError(f"derivative order must be 0, 1 or 2, got {m}")
    if m == 0:
        return zeta(s, params)
    scalar = np.ndim(s) == 0
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    flat = arr.ravel()
    _check_domain(flat)
    out = _zeta_em(flat, m, params)[m]
    return _finish(out.reshape(arr.shape), scalar, "zeta derivative")


class ZetaComponents(NamedTuple):
    zeta_R: float
    zeta_I: float
    abs: float
    abs_sq: float
    arg: float


def zeta_components(sigma, t):
    """Real part, imaginary part, modulus, squared modulus and argument of zeta(sigma + it).

    Vectorised over ``t``; fields are floats for scalar input and arrays otherwise.
    """
    z = zeta(np.asarray(sigma, dtype=float) + 1j * np.asarray(t, dtype=float))
    z_arr = np.asarray(z)
    re, im = z_arr.real, z_arr.imag
    a = np.hypot(re, im)
    # arg in (-pi, pi]: atan2 returns -pi for (-x, -0.0)
    arg = np.arctan2(im, re)
    arg = np.where(arg == -np.pi, np.pi, arg)
    if np.ndim(z) == 0:
        return ZetaComponents(float(re), float(im), float(a), float(a * a), float(arg))
    return ZetaComponents(re, im, a, a * a, arg)
