"""Run configured experiments and judge them against the oracles."""
from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .. import oracles
from ..cesaro import (CesaroTrace, GrowthClassification, Verdict as Growth, accumulate,
                      classify_growth)
from ..errors import ConfigError, ZetaMomentError
from ..integrands import Domain
from ..oracles import IdentityId, Prediction, PredictionKind
from ..quadrature import element_values, unit_elements
from .config import AsymptoteSource, ExperimentConfig

TRACE_HEADER = ("t", "element", "partial_sum", "cesaro_mean")
SCAN_HEADER = ("rho", "cor", "cov", "var_f", "var_g", "e_f", "e_g")

# Identities stated for half-line integrals; all others are full-line.
_HALF_LINE_IDENTITIES = {IdentityId.Q3A, IdentityId.DR, IdentityId.ZR}


class ExperimentVerdict(str, enum.Enum):
    MATCH = "Match"
    MISMATCH = "Mismatch"
    EXPLORATORY = "Exploratory"


def _rescale(pred: Prediction, factor: float) -> Prediction:
    if factor == 1.0 or pred.value is None:
        return pred
    return Prediction(pred.kind, pred.branch, pred.value * factor, pred.order,
                      pred.offset * factor, pred.source, pred.note)


def resolve_prediction(cfg: ExperimentConfig) -> Optional[Prediction]:
    """The oracle prediction an experiment is judged against (None = no asymptote)."""
    spec = cfg.integrand
    if cfg.asymptote_source is AsymptoteSource.NONE:
        return None
    if cfg.asymptote_source is AsymptoteSource.EXPLICIT:
        return Prediction(PredictionKind.FINITE, oracles.branch_of(spec.sigma, spec.r),
                          float(cfg.asymptote_value), source="explicit")
    name = cfg.oracle
    half = spec.domain is Domain.HALF
    if name == "Z":
        return oracles.z_oracle(spec.sigma, spec.r, spec.domain.value)
    if name == "Zprime":
        return oracles.zprime_oracle(spec.sigma, spec.r, spec.domain.value)
    if name in ("SinKernel", "CosKernel"):
        value = oracles.lemma_oracle(name, math.log(spec.r), spec.sigma)
        return Prediction(PredictionKind.FINITE, oracles.branch_of(spec.sigma, spec.r),
                          value / 2.0 if half else value, source=name)
    try:
        ident = IdentityId(name)
    except ValueError:
        raise ConfigError(f"{cfg.experiment_id}: unknown oracle {name!r}") from None
    pred = oracles.identity_rhs(ident, spec.sigma, spec.r, max(spec.m, 1))
    natural_half = ident in _HALF_LINE_IDENTITIES
    if half and not natural_half:
        pred = _rescale(pred, 0.5)
    elif natural_half and not half:
        pred = _rescale(pred, 2.0)
    return pred


def allowed_error(cfg: ExperimentConfig, target: float) -> float:
    if cfg.absolute_tolerance or target == 0:
        return cfg.tolerance
    return cfg.tolerance * abs(target)


def judge(cfg: ExperimentConfig, cls: GrowthClassification,
          pred: Optional[Prediction]) -> ExperimentVerdict:
    if pred is None or pred.kind is PredictionKind.INDETERMINATE:
        return ExperimentVerdict.EXPLORATORY
    if pred.kind is PredictionKind.DIVERGENT:
        ok = cls.verdict is Growth.LINEAR_DIVERGENCE
    else:
        target = pred.target
        ok = (cls.verdict is Growth.CONVERGED
              and abs(cls.value - target) <= allowed_error(cfg, target))
    return ExperimentVerdict.MATCH if ok else ExperimentVerdict.MISMATCH


def compute_trace(cfg: ExperimentConfig, workers: int = 1) -> CesaroTrace:
    elements = unit_elements(cfg.integrand, cfg.t_from, cfg.T_max, cfg.panel_tol, workers=workers)
    values = element_values(elements)
    if cfg.scale != 1.0:
        values = values * cfg.scale
    t_grid = np.array([e.t_start + 1.0 for e in elements])
    return accumulate(values, order=cfg.cesaro_order, t_grid=t_grid)


class ExperimentResult(NamedTuple):
    trace: CesaroTrace
    classification: GrowthClassification
    prediction: Optional[Prediction]
    verdict: ExperimentVerdict


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Compute the Cesaro trace of ``cfg`` and judge it against its oracle."""
    pred = resolve_prediction(cfg)
    trace = compute_trace(cfg, workers)
    asym = pred.target if (pred is not None and pred.kind is PredictionKind.FINITE) else None
    cls = classify_growth(trace, asym)
    return ExperimentResult(trace, cls, pred, judge(cfg, cls, pred))


def measured_value(result: ExperimentResult) -> float:
    cls = result.classification
    if cls.verdict is Growth.LINEAR_DIVERGENCE:
        return cls.slope
    return result.trace.final_mean


@dataclass(frozen=True)
class SummaryRow:
    experiment_id: str
    oracle: str
    measured: str
    tolerance: str
    verdict: ExperimentVerdict
    detail: str = ""


@dataclass(frozen=True)
class Summary:
    rows: tuple

    @property
    def ok(self) -> bool:
        return all(r.verdict is not ExperimentVerdict.MISMATCH for r in self.rows)

    def format(self) -> str:
        head = ("id", "oracle", "measured", "tolerance", "verdict", "detail")
        body = [(r.experiment_id, r.oracle, r.measured, r.tolerance, r.verdict.value, r.detail)
                for r in self.rows]
        widths = [max([len(h)] + [len(b[i]) for b in body]) for i, h in enumerate(head)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(c.ljust(w) for c, w in zip(b, widths)).rstrip() for b in body]
        return "\n".join(lines)


def _row(cfg: ExperimentConfig, result: ExperimentResult) -> SummaryRow:
    pred = result.prediction
    cls = result.classification
    if pred is None:
        oracle_s, tol_s = "none", "-"
    elif pred.kind is PredictionKind.FINITE:
        oracle_s = f"{pred.target:.6g}"
        tol_s = f"{allowed_error(cfg, pred.target):.3g}"
    else:
        oracle_s, tol_s = str(pred), "-"
    if cls.verdict is Growth.LINEAR_DIVERGENCE:
        meas = f"slope={cls.slope:.4g}"
    else:
        meas = f"{result.trace.final_mean:.6g}"
    detail = f"{cls.verdict.value}; mean slope={cls.slope:.3g}, partial slope={cls.partial_slope:.3g}"
    return SummaryRow(cfg.experiment_id, oracle_s, meas, tol_s, result.verdict, detail)


def verify_all(suite: Sequence[ExperimentConfig], workers: int = 1, out_dir: Optional[str] = None,
               progress=None) -> Summary:
    """Run every experiment; failures (including errors) become Mismatch rows."""
    rows = []
    for cfg in suite:
        try:
            result = run_experiment(cfg, workers)
            row = _row(cfg, result)
            if out_dir and cfg.output_path:
                write_trace_csv(result.trace, os.path.join(out_dir, cfg.output_path))
        except ZetaMomentError as exc:
            row = SummaryRow(cfg.experiment_id, cfg.oracle or "-", "error", "-",
                             ExperimentVerdict.MISMATCH, f"{type(exc).__name__}: {exc}")
        rows.append(row)
        if progress:
            progress(row)
    return Summary(tuple(rows))


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def trace_csv(trace: CesaroTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for t, h, p, m in zip(trace.t_grid, trace.elements, trace.partial, trace.means):
        w.writerow((_fmt(t), _fmt(h), _fmt(p), _fmt(m)))
    return buf.getvalue()


def scan_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in reports:
        w.writerow(tuple(_fmt(getattr(r, k)) for k in SCAN_HEADER))
    return buf.getvalue()


def _write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def write_trace_csv(trace: CesaroTrace, path) -> None:
    _write(path, trace_csv(trace))


def write_scan_csv(reports, path) -> None:
    _write(path, scan_csv(reports))
