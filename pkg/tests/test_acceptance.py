"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the "acceptance criteria"
section at the end of the pytest run) and then asserts.  Tolerances are the
stated ones; nothing is loosened to make a criterion pass.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from zetamoment import cesaro
from zetamoment.cesaro import Verdict, closest_approach
from zetamoment.correlation import correlate, find_peaks, rho_scan, shifted_correlation
from zetamoment.gamma import gamma
from zetamoment.harness.cache import cache_warm
from zetamoment.integrands import master_f
from zetamoment.oracles import DEFAULT_FLOOR, sawtooth, z_oracle
from zetamoment.quadrature import integrate_panel
from zetamoment.zeta import zeta, zeta_derivative

PI = math.pi
pytestmark = pytest.mark.slow


def record(label, checks):
    """checks: list of (name, ok, detail).  Records one line and asserts all."""
    ok = all(c[1] for c in checks)
    failed = [f"{n} ({d})" for n, good, d in checks if not good]
    detail = "; ".join(f"{n}: {d}" for n, _, d in checks) if ok else "failed " + "; ".join(failed)
    ACCEPTANCE_LINES.append((label, ok, detail))
    assert ok, f"{label}: " + "; ".join(failed)


def rel_err(x, target):
    return abs(x - target) / abs(target)


def test_criterion_01_zeta_known_values():
    checks = []
    for name, err, tol in [
        ("zeta(2)", abs(zeta(2.0) - PI ** 2 / 6), 1e-10),
        ("zeta(0)", abs(zeta(0.0) + 0.5), 1e-10),
        ("zeta'(0)", abs(zeta_derivative(0.0, 1) + math.log(2 * PI) / 2), 1e-8),
        ("|zeta(1/2+14.134725i)|", abs(zeta(0.5 + 14.134725j)), 1e-4),
    ]:
        checks.append((name, err < tol, f"{err:.2e} < {tol:g}"))
    rng = np.random.default_rng(1)
    s = rng.uniform(2.5, 4.0, 100) + 1j * rng.uniform(-2000, 2000, 100)
    n = 1_000_000
    total = np.zeros(s.size, dtype=complex)
    for lo in range(1, n + 1, 200_000):
        lj = np.log(np.arange(lo, min(lo + 200_000, n + 1), dtype=float))
        total += np.exp(-np.outer(s, lj)).sum(axis=1)
    # tail of the million-term sum is below n^(1-sigma)/(sigma-1) < 2e-9
    err = float(np.max(np.abs(zeta(s) - total)))
    checks.append(("Dirichlet series, 100 points", err < 1e-8, f"{err:.2e} < 1e-08"))
    record("1 zeta kernel known values", checks)


def test_criterion_02_lemma_integrals(suite):
    checks = []
    for eid, kind in (("lemma-sin", "SinKernel"), ("lemma-cos", "CosKernel")):
        _, res = suite(eid)
        a, sigma = math.log(2), 1.5
        target = PI * math.exp(-a * sigma) / (1 if kind == "SinKernel" else sigma)
        e = rel_err(res.trace.final_mean, target)
        checks.append((kind, e < 0.01, f"{res.trace.final_mean:.6f} vs {target:.6f}, rel {e:.2%}"))
    record("2 lemma integrals", checks)


def test_criterion_03_staircase(suite):
    checks = []
    for r in ("0.5", "1.5", "2.5", "3.3", "1", "2", "3"):
        _, res = suite(f"staircase-r{r}")
        rv = float(r)
        target = (PI * (2 * round(rv) - 1) if DEFAULT_FLOOR.is_integer(rv)
                  else 2 * PI * math.floor(rv))
        est = res.trace.final_mean
        if target == 0:
            # 1% of zero is no band; the harness reads it as 0.01 absolute
            ok, d = abs(est) < 0.01, f"{est:.2e} vs 0 (abs 0.01)"
        else:
            e = rel_err(est, target)
            ok, d = e < 0.01, f"{est:.5f} vs {target:.5f}, rel {e:.2%}"
        checks.append((f"r={r}", ok, d))
    _, res = suite("staircase-r2")
    est = res.trace.final_mean
    margin = abs(est - 3 * PI) < abs(est - 4 * PI) / 3
    checks.append(("r=2 margin vs 4pi", margin,
                   f"|est-3pi|={abs(est - 3 * PI):.4f}, |est-4pi|/3={abs(est - 4 * PI) / 3:.4f}"))
    record("3 staircase Z(3/2, r)", checks)


def test_criterion_04_continuation(suite):
    checks = []
    for eid, target, name in (("continuation-Z-half-2", -PI, "Z(1/2,2)"),
                              ("tint", -PI / math.sqrt(2), "Tint"),
                              ("tint2a", 3 * PI * math.sqrt(2) / 4, "Tint2A")):
        _, res = suite(eid)
        est = res.trace.final_mean
        e = rel_err(est, target)
        checks.append((name, e < 0.02, f"{est:.5f} vs {target:.5f}, rel {e:.2%}"))
    record("4 analytic continuation values", checks)


def test_criterion_05_sighalf_convergence(suite):
    checks = []
    for r in ("2.1", "0.9", "1.1"):
        _, res = suite(f"sighalf-s1_2-r{r}")
        target = -PI * float(r)
        est = res.trace.final_mean
        e = rel_err(est, target)
        checks.append((f"sigma=1/2 r={r}", e < 0.02, f"{est:.4f} vs {target:.4f}, rel {e:.2%}"))
    base = suite("sighalf-s1_2-r2.1")[1].trace.final_mean
    for tag in ("1_3", "3_4", "7_8"):
        est = suite(f"sighalf-s{tag}-r2.1")[1].trace.final_mean
        e = rel_err(est, base)
        checks.append((f"sigma={tag.replace('_', '/')} vs 1/2", e < 0.01,
                       f"{est:.4f} vs {base:.4f}, rel {e:.2%}"))
    est = suite("sighalf-s1-r2.1")[1].trace.final_mean
    e = rel_err(est, -1.05 * PI)
    checks.append(("sigma=1 r=2.1", e < 0.02, f"{est:.4f} vs {-1.05 * PI:.4f}, rel {e:.2%}"))
    record("5 convergence of the half-line moment", checks)


def test_criterion_06_divergence(suite):
    checks = []
    for eid in ("sig4-r4", "sighalf-r1", "sighalf-r2"):
        cls = suite(eid)[1].classification
        checks.append((eid, cls.verdict is Verdict.LINEAR_DIVERGENCE,
                       f"{cls.verdict.value}, slope {cls.slope:.4f}"))
    slope = suite("sig4-r4")[1].classification.slope
    checks.append(("sig4 r=4 slope", abs(slope - 0.5) <= 0.05, f"{slope:.4f} vs 0.5 +/- 10%"))
    record("6 divergence at integers", checks)


def test_criterion_07_crossing(suite):
    trace = suite("sighalf-s1_2-r2.1")[1].trace
    xs = cesaro.crossings(trace, -2.1 * PI)
    near = min(xs, key=lambda x: abs(x - 1549.31))
    record("7 crossing reproduction",
           [("crossing near 1549.31", abs(near - 1549.31) <= 1.0, f"T={near:.2f}")])


def _periodicity(trace, r):
    rho = cesaro.base_period(r)
    est = cesaro.period_estimate(trace, -PI * r, min_gap=rho)
    return rho, est


def test_criterion_08_periodicity(suite):
    trace = suite("sighalf-s1_2-r2.1")[1].trace
    rho, est = _periodicity(trace, 2.1)
    checks = [("rho", abs(rho - 8.469) <= 1e-3, f"{rho:.4f}")]
    ratio = est.period / rho
    checks.append(("period / rho", abs(ratio - 15) <= 0.05 * 15, f"{ratio:.3f} vs 15 +/- 5%"))
    q = np.asarray(est.spacings) / rho
    rel = np.abs(q - np.round(q)) / np.round(q)
    checks.append(("spacing ratio residuals", bool(np.all(rel < 0.05)),
                   f"max {rel.max():.2%} of the nearest integer, "
                   f"max {np.abs(q - np.round(q)).max():.2f} rho absolute"))
    record("8 periodicity", checks)


def test_criterion_09_closest_approach(suite):
    trace = suite("sighalf-s1_2-r2.1")[1].trace
    asym = -2.1 * PI
    rho, est = _periodicity(trace, 2.1)
    first = cesaro.crossings(trace, asym)[0]
    minima = cesaro.principal_minima(closest_approach(trace, asym), est.period, start=first)[:3]
    d = [m.distance for m in minima]
    ok = len(d) == 3 and all(x > 0 for x in d) and d[0] > d[1] > d[2]
    record("9 closest-approach monotonicity",
           [("first three minima", ok,
             ", ".join(f"T={m.T:.0f}: {m.distance:.4f}" for m in minima))])


def _trending(resid):
    """Residual envelope over the last quarter shrinks (or is already negligible)."""
    q = resid[-(resid.size // 4):]
    half = q.size // 2
    early, late = np.abs(q[:half]).max(), np.abs(q[half:]).max()
    return late <= early or late < 0.01, early, late


def test_criterion_10_identity_residuals(suite):
    checks = []
    for eid, name in (("jd1-s3-r2", "Jd1 sigma=3 r=2"), ("jd1-s3-r2.5", "Jd1 sigma=3 r=2.5"),
                      ("jdn-s4-n2", "Jdn sigma=4 n=2"), ("jdn2-s1_2", "Jdn2 sigma=1/2"),
                      ("jday-m1-s4-r3.9", "JdaY m=1 sigma=4 r=3.9"),
                      ("rneqn2d-s1_3-r1.5", "Rneqn2d sigma=1/3 r=3/2"),
                      ("reqn2d-s1_2-n2", "Reqn2d sigma=1/2 n=2")):
        _, res = suite(eid)
        resid = res.trace.means - res.prediction.target
        trend, early, late = _trending(resid)
        final = abs(resid[-1])
        checks.append((name, final < 0.1 and trend,
                       f"|resid|={final:.4f}, last-quarter envelope {early:.3f} -> {late:.3f}"))
    record("10 identity residuals", checks)


def test_criterion_11_master_theorem(suite):
    rng = np.random.default_rng(11)
    t = rng.uniform(-30, 30, 100)
    err = float(np.max(np.abs(master_f(t, 1.3) + master_f(-1j - t, 1.3))))
    est = suite("ans-r1.3")[1].trace.final_mean
    e = rel_err(est, -2.6 * PI)
    record("11 master theorem", [
        ("F(t)+F(-i-t)", err < 1e-10, f"max {err:.1e}"),
        ("Cesaro integral of F", e < 0.02, f"{est:.4f} vs {-2.6 * PI:.4f}, rel {e:.2%}"),
    ])


@pytest.fixture(scope="module")
def half_cache(tmp_path_factory):
    path = tmp_path_factory.mktemp("cache") / "zeta_sigma0.5.cache"
    return cache_warm(0.5, 0.0, 0.05, 7601, path)


def test_criterion_12_correlation(half_cache):
    checks = []
    for L1 in (0.0, 126.0):
        scan = rho_scan(0.5, "abs", L1, 126.0, 125.5, 126.7, 0.1, tol=1e-8, cache=half_cache)
        best = int(np.argmax(scan.cors))
        rho = float(scan.rhos[best])
        # confirm the best grid point without the cache
        direct = shifted_correlation(0.5, "abs", L1, 126.0, rho, tol=1e-7).cor
        ok = direct > 0.5 and abs(rho - 126.1) <= 0.6
        checks.append((f"sigma=1/2 L1={L1:g}", ok, f"cor {direct:.4f} at rho={rho:.1f}"))
    scan = rho_scan(0.75, "abs", 0.0, 126.0, 120.0, 145.0, 0.1, tol=1e-6)
    peaks = find_peaks(scan.rhos, scan.cors, threshold=-1.0)
    for centre, width in ((126.1, 0.6), (136.5, 0.7)):
        hit = [p for p in peaks if abs(p.rho - centre) <= width]
        checks.append((f"sigma=3/4 max near {centre}", bool(hit),
                       f"rho={hit[0].rho:.3f} cor={hit[0].cor:.4f}" if hit else
                       "none; maxima at " + ", ".join(f"{p.rho:.2f}" for p in peaks)))
    record("12 shifted correlation", checks)


def test_criterion_13_property_suites():
    rng = np.random.default_rng(13)
    checks = []
    s = rng.uniform(-1, 4, 500) + 1j * rng.uniform(-5000, 5000, 500)
    err = float(np.max(np.abs(zeta(np.conj(s)) - np.conj(zeta(s)))))
    checks.append(("conjugate symmetry", err < 1e-12, f"{err:.1e}"))

    s = rng.uniform(-1, 0.5, 50) + 1j * rng.uniform(-200, 200, 50)
    fe = 2.0 ** s * PI ** (s - 1) * np.sin(PI * s / 2) * gamma(1 - s) * zeta(1 - s)
    err = float(np.max(np.abs(zeta(s) - fe) / np.abs(zeta(s))))
    checks.append(("functional equation", err < 1e-8, f"{err:.1e}"))

    f = lambda t: np.exp(-t) * np.cos(7 * t)
    worst = 0.0
    for c in rng.uniform(0.1, 3.9, 20):
        left, e1 = integrate_panel(f, 0.0, c, 1e-11)
        right, e2 = integrate_panel(f, c, 4.0, 1e-11)
        whole, e3 = integrate_panel(f, 0.0, 4.0, 1e-11)
        worst = max(worst, abs(left + right - whole) - (e1 + e2 + e3 + 2e-11))
    checks.append(("panel additivity", worst <= 0, "within combined error estimates"))

    q, n = 0.5, 10_000
    means = cesaro.accumulate(q ** np.arange(n)).means
    exact = 1 / (1 - q) - q * (1 - q ** n) / ((1 - q) ** 2 * n)
    checks.append(("Cesaro regularity", abs(means[-1] - exact) < 1e-10,
                   f"mean - 1/(1-q) = {means[-1] - 2:.2e}, the O(1/n) Cesaro lag"))

    r = rng.uniform(0.01, 5, 200)
    r = r[[not DEFAULT_FLOOR.is_integer(x) for x in r]]
    err = max(abs(sawtooth(x + m) - sawtooth(x)) for x in r for m in (1, 7, 20))
    checks.append(("sawtooth periodicity", err < 1e-12, f"{err:.1e}"))

    err = max(abs(z_oracle(1.5, k).value - 0.5 * (z_oracle(1.5, k - 1e-6).value
                                                    + z_oracle(1.5, k + 1e-6).value))
              for k in range(1, 11))
    checks.append(("staircase midpoint", err < 1e-12, f"{err:.1e}"))

    g1 = lambda t: np.sin(t) + 0.3 * np.cos(2.7 * t)
    g2 = lambda t: np.cos(1.3 * t) - 0.2 * t
    base = correlate(g1, g2, 0.0, 12.0)
    moved = correlate(lambda t: 3 * g1(t) - 1, lambda t: 0.5 * g2(t) + 4, 0.0, 12.0)
    checks.append(("correlation affine invariance", abs(base.cor - moved.cor) < 1e-10,
                   f"{abs(base.cor - moved.cor):.1e}"))
    slack = abs(base.cov) - math.sqrt(base.var_f * base.var_g)
    checks.append(("Cauchy-Schwarz", slack <= 1e-12, f"|cov| - sqrt(var var) = {slack:.2e}"))
    record("13 property suites", checks)


# Module examples and invariants beyond the numbered criteria.

def test_example_sig4_near_resonance(suite):
    cls = suite("sig4-r3.9")[1].classification
    final = suite("sig4-r3.9")[1].trace.final_mean
    record("example sig4 r=3.9 ConvergedTo(0 +/- 0.05)",
           [("classification", cls.verdict is Verdict.CONVERGED and abs(final) <= 0.05,
             f"{cls.verdict.value}, final mean {final:.4f}, last-decile spread "
             f"{cls.oscillation:.3f}")])


def test_invariant_one_sided_approach(suite):
    checks = []
    for r in ("1.1", "2.1"):
        trace = suite(f"sighalf-s1_2-r{r}")[1].trace
        d = [a.distance for a in closest_approach(trace, -PI * float(r))]
        below = (trace.means + PI * float(r)).min()
        checks.append((f"r={r}", min(d) >= 0 and below >= 0,
                       f"min distance {min(d):.2e}, deepest dip of the means {below:.2e}"))
    record("invariant one-sided approach", checks)
