from __future__ import annotations

import functools

import pytest

from zetamoment.cesaro import accumulate
from zetamoment.harness.config import default_suite
from zetamoment.harness.experiments import run_experiment
from zetamoment.integrands import IntegrandSpec
from zetamoment.quadrature import element_values, unit_elements

# (label, passed, detail) rows printed after the run by pytest_terminal_summary
ACCEPTANCE_LINES: list = []


@functools.lru_cache(maxsize=None)
def cached_trace(kernel, sigma, r, T, domain="half", m=0, scale=1.0):
    """Cesaro trace of one integrand over [0, T], shared across test modules."""
    spec = IntegrandSpec(kernel, sigma, r, m=m, domain=domain)
    els = unit_elements(spec, 0.0, T)
    return accumulate(element_values(els) * scale, t_grid=[e.t_start + 1.0 for e in els])


@functools.lru_cache(maxsize=None)
def suite_result(experiment_id):
    """run_experiment on one entry of the bundled suite, computed once per session."""
    cfg = next(c for c in default_suite() if c.experiment_id == experiment_id)
    return cfg, run_experiment(cfg)


@pytest.fixture(scope="session")
def trace_of():
    return cached_trace


@pytest.fixture(scope="session")
def suite():
    return suite_result


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
