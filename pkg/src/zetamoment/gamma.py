"""Complex log-gamma via the Lanczos approximation.

Only used by the functional-equation branch of :mod:`zetamoment.zeta`, where
Gamma(1 - s) is needed at heights |t| up to several thousand.  Working with
the logarithm keeps the huge/tiny factors of the functional equation finite.
"""
from __future__ import annotations

import numpy as np

# Godfrey's coefficients, g = 7, n = 9.
_G = 7.0
_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
_LOG_PI = np.log(np.pi)


def log_sin(w):
    """log(sin(w)) for complex ``w``, without overflow at large |Im w|.

    The branch of the logarithm is arbitrary; callers only exponentiate.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    up = w.imag > 0
    down = w.imag < 0
    flat = ~(up | down)
    if up.any():
        wu = w[up]
        out[up] = -1j * wu + np.log((np.exp(2j * wu) - 1.0) / 2j)
    if down.any():
        wd = w[down]
        out[down] = 1j * wd + np.log((1.0 - np.exp(-2j * wd)) / 2j)
    if flat.any():
        out[flat] = np.log(np.sin(w[flat]).astype(complex))
    return out


def _loggamma_right(z):
    # Valid for Re(z) >= 1/2.
    w = z - 1.0
    a = np.full_like(w, _P[0])
    for k in range(1, len(_P)):
        a = a + _P[k] / (w + k)
    t = w + _G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * np.log(t) - t + np.log(a)


def loggamma(z):
    """Principal-ish log Gamma(z) for complex z (branch not normalised).

    ``exp(loggamma(z))`` equals Gamma(z) to about 1e-14 relative error for
    moderate |z|; the error grows like |z| * eps from the phase term.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty_like(z)
    right = z.real >= 0.5
    if right.any():
        out[right] = _loggamma_right(z[right])
    left = ~right
    if left.any():
        zl = z[left]
        out[left] = _LOG_PI - log_sin(np.pi * zl) - _loggamma_right(1.0 - zl)
    return complex(out[0]) if scalar else out


def gamma(z):
    """Complex Gamma function (exp of :func:`loggamma`)."""
    scalar = np.ndim(z) == 0
    val = np.exp(np.atleast_1d(loggamma(np.atleast_1d(z))))
    return complex(val[0]) if scalar else val
