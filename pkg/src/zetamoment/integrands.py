"""Declarative descriptions of the oscillatory integrands under study.

An :class:`IntegrandSpec` is a small frozen value that knows how to evaluate
its integrand on an array of real abscissae.  Everything here is picklable so
panel batches can be shipped to worker processes.
"""
from __future__ import annotations

import enum
import math
from collections import OrderedDict
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .zeta import zeta_derivative


class Kernel(str, enum.Enum):
    MOMENT_OVER_S = "MomentOverS"            # zeta(s) r^s / s
    PLAIN_MOMENT = "PlainMoment"             # zeta^(m)(s) r^s
    INVERSE_SQUARE = "InverseSquare"         # zeta(s) r^s / s^2
    DERIVATIVE_OVER_S = "DerivativeOverS"    # zeta'(s) r^s / s
    DERIVATIVE_RESIDUAL = "DerivativeResidual"  # zeta'(s) r^s / s - zeta(s) r^s / s^2
    MASTER_F = "MasterF"                     # F(t) of the master-theorem pairing
    SIN_KERNEL = "SinKernel"                 # t sin(a t) / (sigma^2 + t^2), a = ln r
    COS_KERNEL = "CosKernel"                 # cos(a t) / (sigma^2 + t^2), a = ln r


class Component(str, enum.Enum):
    REAL = "real"
    IMAG = "imag"
    FULL = "full"


class Domain(str, enum.Enum):
    HALF = "half"   # integrate over [0, T]
    LINE = "line"   # integrate over [-T, T], folded onto [0, T]


ZETA_KERNELS = frozenset({
    Kernel.MOMENT_OVER_S, Kernel.PLAIN_MOMENT, Kernel.INVERSE_SQUARE,
    Kernel.DERIVATIVE_OVER_S, Kernel.DERIVATIVE_RESIDUAL, Kernel.MASTER_F,
})


def _coerce(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    for member in enum_cls:
        if value in (member.value, member.name) or str(value).lower() == member.value.lower():
            return member
    raise ValueError(f"unknown {enum_cls.__name__}: {value!r}")


# ---------------------------------------------------------------------------
# zeta values at quadrature nodes, memoised per (sigma, order, node array).
# Experiments that differ only in r reuse the same nodes, so this removes most
# of the cost of an r-sweep without changing a single bit of the result.

_ZETA_MEMO: OrderedDict = OrderedDict()
_ZETA_MEMO_SIZE = 24


def zeta_on_line(sigma: float, t: np.ndarray, m: int = 0) -> np.ndarray:
    """zeta^(m)(sigma + i t) for real array ``t``, using conj symmetry for t < 0."""
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    key = (float(sigma), int(m), at.shape, hash(at.tobytes()))
    hit = _ZETA_MEMO.get(key)
    if hit is not None and np.array_equal(hit[0], at):
        _ZETA_MEMO.move_to_end(key)
        z = hit[1]
    else:
        z = np.asarray(zeta_derivative(sigma + 1j * at, m))
        _ZETA_MEMO[key] = (at.copy(), z)
        if len(_ZETA_MEMO) > _ZETA_MEMO_SIZE:
            _ZETA_MEMO.popitem(last=False)
    return np.where(t < 0, np.conj(z), z)


def clear_zeta_memo():
    _ZETA_MEMO.clear()


def master_f(tau, r: float):
    """F(tau) for complex ``tau``: the sigma = 1/2 moment minus its sigma = 3/2 mirror."""
    from .zeta import zeta

    tau = np.asarray(tau, dtype=complex)
    s1 = 0.5 + 1j * tau
    s2 = 1.5 - 1j * tau
    log_r = math.log(r)
    return zeta(s1) * np.exp(s1 * log_r) / s1 - zeta(s2) * np.exp(s2 * log_r) / s2


@dataclass(frozen=True)
class IntegrandSpec:
    kernel: Kernel
    sigma: float
    r: float
    m: int = 0
    component: Component = Component.REAL
    domain: Domain = Domain.HALF

    def __post_init__(self):
        object.__setattr__(self, "kernel", _coerce(Kernel, self.kernel))
        object.__setattr__(self, "component", _coerce(Component, self.component))
        object.__setattr__(self, "domain", _coerce(Domain, self.domain))
        if not self.r > 0:
            raise DomainError(f"r must be positive, got {self.r}")
        if self.m < 0:
            raise DomainError("derivative order must be non-negative")

    @property
    def omega(self) -> float:
        """Angular frequency |ln r| of the r^{it} factor."""
        return abs(math.log(self.r))

    def with_(self, **changes) -> "IntegrandSpec":
        return replace(self, **changes)

    def _complex(self, t):
        k = self.kernel
        sig = self.sigma
        if k is Kernel.SIN_KERNEL:
            a = math.log(self.r)
            return t * np.sin(a * t) / (sig * sig + t * t)
        if k is Kernel.COS_KERNEL:
            a = math.log(self.r)
            return np.cos(a * t) / (sig * sig + t * t)
        log_r = math.log(self.r)
        if k is Kernel.MASTER_F:
            s1 = 0.5 + 1j * t
            s2 = 1.5 - 1j * t
            z1 = zeta_on_line(0.5, t)
            z2 = np.conj(zeta_on_line(1.5, t))
            return z1 * np.exp(s1 * log_r) / s1 - z2 * np.exp(s2 * log_r) / s2
        s = sig + 1j * t
        rs = np.exp(s * log_r)
        if k is Kernel.MOMENT_OVER_S:
            return zeta_on_line(sig, t, self.m) * rs / s
        if k is Kernel.PLAIN_MOMENT:
            return zeta_on_line(sig, t, self.m) * rs
        if k is Kernel.INVERSE_SQUARE:
            return zeta_on_line(sig, t, self.m) * rs / (s * s)
        if k is Kernel.DERIVATIVE_OVER_S:
            return zeta_on_line(sig, t, 1) * rs / s
        if k is Kernel.DERIVATIVE_RESIDUAL:
            return (zeta_on_line(sig, t, 1) - zeta_on_line(sig, t, 0) / s) * rs / s
        raise AssertionError(k)

    def _project(self, v):
        if self.component is Component.REAL:
            return np.real(v).astype(float)
        if self.component is Component.IMAG:
            return np.imag(v).astype(float)
        return np.asarray(v, dtype=complex)

    def pointwise(self, t):
        """Integrand value at ``t`` (no folding)."""
        t = np.asarray(t, dtype=float)
        return self._project(self._complex(t))

    def __call__(self, t):
        """Value actually integrated on [0, T]: folded g(t) + g(-t) for LINE domains."""
        t = np.asarray(t, dtype=float)
        if self.domain is Domain.LINE:
            return self._project(self._complex(t) + self._complex(-t))
        return self._project(self._complex(t))

    def local_cycles(self, t) -> np.ndarray:
        """Oscillation cycles per unit length near height ``t``."""
        t = np.abs(np.asarray(t, dtype=float))
        zeta_freq = np.log(np.maximum(t, 1.0)) if self.kernel in ZETA_KERNELS else 0.0
        return (self.omega + zeta_freq) / (2.0 * math.pi)

    def crosses_sigma_one_pole(self) -> bool:
        return self.kernel in ZETA_KERNELS and self.sigma == 1.0 and self.kernel is not Kernel.MASTER_F
