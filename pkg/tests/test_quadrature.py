from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetamoment.errors import DomainError, NonConvergence
from zetamoment.integrands import Component, Domain, IntegrandSpec, master_f
from zetamoment.quadrature import (integrate_intervals, integrate_panel, node_budget,
                                   unit_elements)


class TestIntegratePanel:
    def test_cos(self):
        v, _ = integrate_panel(np.cos, 0.0, math.pi / 2, 1e-12)
        assert v == pytest.approx(1.0, abs=1e-12)

    def test_t_sin_10t(self):
        v, _ = integrate_panel(lambda t: t * np.sin(10 * t), 0.0, 1.0, 1e-10)
        exact = (math.sin(10) - 10 * math.cos(10)) / 100
        assert abs(v - exact) < 1e-10

    def test_zero(self):
        v, e = integrate_panel(lambda t: np.zeros_like(t), 0.0, 1.0)
        assert v == 0.0 and e == 0.0

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            integrate_panel(np.cos, 1.0, 1.0)

    def test_nonconvergence_reports_panel(self):
        f = lambda t: np.where(t < 1.0, np.cos(t), np.sign(np.sin(1e6 * t)))
        with pytest.raises(NonConvergence) as exc:
            integrate_intervals(f, [0.0, 1.0], [1.0, 2.0], 1e-12, max_depth=6)
        assert exc.value.panel_index == 1

    @pytest.mark.parametrize("degree", range(0, 42))
    def test_polynomial_exactness(self, degree):
        v, _ = integrate_intervals(lambda t: t ** degree, [0.0], [1.0], 1.0, max_depth=0)
        assert abs(v[0] - 1.0 / (degree + 1)) < 1e-14

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.01, 0.99))
    def test_additivity(self, frac):
        f = lambda t: np.exp(-t) * np.cos(7 * t) + t ** 2
        a, b = -1.0, 3.0
        c = a + frac * (b - a)
        left, el = integrate_panel(f, a, c, 1e-11)
        right, er = integrate_panel(f, c, b, 1e-11)
        whole, ew = integrate_panel(f, a, b, 1e-11)
        assert abs(left + right - whole) <= el + er + ew + 2e-11


class TestUnitElements:
    def test_single_element(self):
        spec = IntegrandSpec("PlainMoment", 4.0, 3.9)
        els = unit_elements(spec, 0.0, 1.0)
        assert len(els) == 1 and els[0].index == 0 and els[0].t_start == 0.0

    def test_first_panels_finite(self):
        spec = IntegrandSpec("PlainMoment", 4.0, 3.9)
        els = unit_elements(spec, 0.0, 2.0)
        assert all(math.isfinite(e.value) for e in els)
        assert [e.t_start for e in els] == [0.0, 1.0]

    def test_span_too_short(self):
        with pytest.raises(DomainError):
            unit_elements(IntegrandSpec("PlainMoment", 2.0, 2.0), 0.0, 0.5)

    def test_node_budget(self):
        spec = IntegrandSpec("PlainMoment", 0.5, 2.1)
        budget = node_budget(spec, np.array([0.0, 1000.0]))
        assert budget[0] == 16
        cycles = (math.log(2.1) + math.log(1001.0)) / (2 * math.pi)
        assert budget[1] == max(16, 8 * math.ceil(cycles))

    def test_workers_bitwise_identical(self):
        spec = IntegrandSpec("PlainMoment", 0.5, 2.1)
        a = unit_elements(spec, 0.0, 60.0, chunk=20, workers=1)
        b = unit_elements(spec, 0.0, 60.0, chunk=20, workers=3)
        assert [e.value for e in a] == [e.value for e in b]

    def test_pole_component_guard(self):
        spec = IntegrandSpec("PlainMoment", 1.0, 2.1, component="imag")
        with pytest.raises(DomainError):
            unit_elements(spec, 0.0, 3.0)

    def test_line_fold_matches_direct(self):
        spec = IntegrandSpec("MomentOverS", 1.5, 2.5, domain="line")
        folded = unit_elements(spec, 0.0, 3.0, tol=1e-12)
        half = spec.with_(domain="half")
        direct = sum(integrate_panel(half.pointwise, a, a + 1, 1e-12)[0]
                     + integrate_panel(half.pointwise, -a - 1, -a, 1e-12)[0] for a in range(3))
        assert sum(e.value for e in folded) == pytest.approx(direct, abs=1e-10)

    def test_lemma_sin_elements(self):
        # each folded panel of t sin(a t)/(sigma^2+t^2) is the closed form difference
        spec = IntegrandSpec("SinKernel", 1.5, 2.0, domain="line")
        els = unit_elements(spec, 0.0, 2.0, tol=1e-12)
        direct, _ = integrate_panel(lambda t: 2 * t * np.sin(math.log(2) * t) / (2.25 + t * t),
                                    0.0, 2.0, 1e-12)
        assert els[0].value + els[1].value == pytest.approx(direct, abs=1e-11)


class TestInvariants:
    @pytest.mark.parametrize("seed", range(4))
    def test_antisymmetry(self, seed):
        rng = np.random.default_rng(seed)
        sigma, r = rng.uniform(1.1, 4.0), rng.uniform(0.3, 4.0)
        spec = IntegrandSpec("MomentOverS", sigma, r, component="imag", domain="line")
        vals, _ = integrate_intervals(spec, np.arange(50.0), np.arange(1.0, 51.0), 1e-10)
        assert abs(vals.sum()) < 1e-8

    @pytest.mark.parametrize("r", [0.7, 1.5, 2.1])
    def test_master_identity(self, r):
        t = np.random.default_rng(7).uniform(-30, 30, 100)
        resid = master_f(t, r) + master_f(-1j - t, r)
        assert np.max(np.abs(resid)) < 1e-10
