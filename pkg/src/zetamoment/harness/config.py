"""Experiment configuration: dataclass plus the plain-text suite format.

A suite file is a sequence of sections::

    # comments start with '#'
    [experiment sighalf-2.1]
    kernel = PlainMoment
    sigma = 0.5
    r = 2.1
    domain = half
    T_max = 2000
    asymptote = oracle      # oracle | none | <number>
    oracle = Zprime

Unknown keys and duplicate experiment ids are errors.
"""
from __future__ import annotations

import enum
import math
import os
import re
from dataclasses import dataclass, field, replace
from typing import Optional

from ..errors import ConfigError
from ..integrands import Component, Domain, IntegrandSpec
from ..quadrature import DEFAULT_PANEL_TOL


class AsymptoteSource(str, enum.Enum):
    ORACLE = "oracle"
    EXPLICIT = "explicit"
    NONE = "none"


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    integrand: IntegrandSpec
    T_max: float
    asymptote_source: AsymptoteSource = AsymptoteSource.ORACLE
    asymptote_value: Optional[float] = None
    oracle: Optional[str] = None
    tolerance: float = 0.02
    absolute_tolerance: bool = False
    cesaro_order: int = 1
    panel_tol: float = DEFAULT_PANEL_TOL
    output_path: Optional[str] = None
    scale: float = 1.0
    t_from: float = 0.0
    note: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.experiment_id:
            raise ConfigError("experiment_id must be non-empty")
        if not self.T_max > self.t_from:
            raise ConfigError(f"{self.experiment_id}: T_max must exceed t_from")
        if self.cesaro_order < 1:
            raise ConfigError(f"{self.experiment_id}: cesaro_order must be >= 1")
        if not self.panel_tol > 0 or not self.tolerance > 0:
            raise ConfigError(f"{self.experiment_id}: tolerances must be positive")
        if self.asymptote_source is AsymptoteSource.EXPLICIT and self.asymptote_value is None:
            raise ConfigError(f"{self.experiment_id}: explicit asymptote needs a value")
        if self.asymptote_source is AsymptoteSource.ORACLE and not self.oracle:
            raise ConfigError(f"{self.experiment_id}: asymptote = oracle needs an 'oracle' key")

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


_SECTION = re.compile(r"^\[\s*experiment\s+(?P<id>[^\]\s][^\]]*?)\s*\]$")

_SPEC_KEYS = {"kernel", "sigma", "r", "m", "component", "domain"}
_CONFIG_KEYS = {"T_max", "asymptote", "oracle", "tolerance", "tolerance_kind", "cesaro_order",
                "panel_tol", "output", "output_path", "scale", "t_from", "note"}


def _number(exp_id, key, text):
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            value = float(num) / float(den)
        else:
            value = float(text)
    except ValueError:
        raise ConfigError(f"{exp_id}: {key} must be a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{exp_id}: {key} must be finite")
    return value


def _build(exp_id, items, lineno) -> ExperimentConfig:
    unknown = set(items) - _SPEC_KEYS - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{exp_id} (line {lineno}): unknown keys {sorted(unknown)}")
    for key in ("kernel", "sigma", "r", "T_max"):
        if key not in items:
            raise ConfigError(f"{exp_id} (line {lineno}): missing required key '{key}'")
    try:
        spec = IntegrandSpec(
            kernel=items["kernel"],
            sigma=_number(exp_id, "sigma", items["sigma"]),
            r=_number(exp_id, "r", items["r"]),
            m=int(items.get("m", "0")),
            component=items.get("component", Component.REAL.value),
            domain=items.get("domain", Domain.HALF.value),
        )
    except ValueError as exc:
        raise ConfigError(f"{exp_id}: {exc}") from None

    kind = items.get("tolerance_kind", "relative").lower()
    if kind not in ("relative", "absolute"):
        raise ConfigError(f"{exp_id}: tolerance_kind must be 'relative' or 'absolute'")
    asym = items.get("asymptote", "oracle").strip()
    value = None
    if asym.lower() in ("oracle", "none"):
        source = AsymptoteSource(asym.lower())
    else:
        source = AsymptoteSource.EXPLICIT
        value = _number(exp_id, "asymptote", asym)
    return ExperimentConfig(
        experiment_id=exp_id,
        integrand=spec,
        T_max=_number(exp_id, "T_max", items["T_max"]),
        asymptote_source=source,
        asymptote_value=value,
        oracle=items.get("oracle"),
        tolerance=_number(exp_id, "tolerance", items.get("tolerance", "0.02")),
        absolute_tolerance=kind == "absolute",
        cesaro_order=int(items.get("cesaro_order", "1")),
        panel_tol=_number(exp_id, "panel_tol", items.get("panel_tol", repr(DEFAULT_PANEL_TOL))),
        output_path=items.get("output_path", items.get("output")),
        scale=_number(exp_id, "scale", items.get("scale", "1")),
        t_from=_number(exp_id, "t_from", items.get("t_from", "0")),
        note=items.get("note", ""),
    )


def parse_config(text: str) -> list:
    """Parse suite text into a list of :class:`ExperimentConfig` in file order."""
    configs = []
    seen = set()
    current = None
    items: dict = {}
    start = 0

    def flush():
        if current is not None:
            configs.append(_build(current, items, start))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            flush()
            current = m["id"].strip()
            if current in seen:
                raise ConfigError(f"line {lineno}: duplicate experiment id {current!r}")
            seen.add(current)
            items, start = {}, lineno
            continue
        if line.startswith("["):
            raise ConfigError(f"line {lineno}: malformed section header {raw.strip()!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [experiment ...] section")
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in items:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} in {current!r}")
        items[key] = value
    flush()
    return configs


def load_config(path) -> list:
    with open(path) as fh:
        return parse_config(fh.read())


def default_suite_path() -> str:
    return os.path.join(os.path.dirname(__file__), "acceptance.cfg")


def default_suite() -> list:
    return load_config(default_suite_path())


def format_config(cfg: ExperimentConfig) -> str:
    """Render one experiment back into the suite format."""
    spec = cfg.integrand
    lines = [
        f"[experiment {cfg.experiment_id}]",
        f"kernel = {spec.kernel.value}",
        f"sigma = {spec.sigma!r}",
        f"r = {spec.r!r}",
        f"m = {spec.m}",
        f"component = {spec.component.value}",
        f"domain = {spec.domain.value}",
        f"T_max = {cfg.T_max!r}",
    ]
    if cfg.asymptote_source is AsymptoteSource.EXPLICIT:
        lines.append(f"asymptote = {cfg.asymptote_value!r}")
    else:
        lines.append(f"asymptote = {cfg.asymptote_source.value}")
    if cfg.oracle:
        lines.append(f"oracle = {cfg.oracle}")
    lines += [f"tolerance = {cfg.tolerance!r}",
              f"tolerance_kind = {'absolute' if cfg.absolute_tolerance else 'relative'}",
              f"cesaro_order = {cfg.cesaro_order}",
              f"panel_tol = {cfg.panel_tol!r}", f"scale = {cfg.scale!r}", f"t_from = {cfg.t_from!r}"]
    if cfg.output_path:
        lines.append(f"output = {cfg.output_path}")
    return "\n".join(lines)
