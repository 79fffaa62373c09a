"""Scenario parameter records and the INI scenario loader.

Everything is stored in SI units (W, Hz, m, bits/s).  The loader accepts a
few suffixed convenience keys (``beta_db``, ``*_mw``) and converts them once.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

# LoS-model constants for the two urban environments used in the figures.
ENVIRONMENT_PRESETS = {
    "high-rise": (27.23, 0.08),
    "dense-urban": (12.08, 0.11),
}

BETA_MIN = 2.0 * math.pi / math.e


class ScenarioError(ValueError):
    """A parameter violates one of the record invariants."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def _require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise ScenarioError(field_name, message)


def _positive(obj, *names: str, prefix: str = "") -> None:
    for name in names:
        v = getattr(obj, name)
        _require(math.isfinite(v) and v > 0, prefix + name, f"must be > 0 (got {v!r})")


@dataclass(frozen=True)
class EnvironmentParams:
    a: float = 27.23
    b: float = 0.08
    alpha_los: float = 3.0
    alpha_nlos: float = 5.0
    noise_los: float = 1e-9
    noise_nlos: float = 0.8e-9

    def __post_init__(self):
        _positive(self, "a", "b", "noise_los", "noise_nlos", prefix="environment.")
        _require(self.alpha_los >= 2.0, "environment.alpha_los",
                 f"must be >= 2 (got {self.alpha_los!r})")
        _require(self.alpha_los < self.alpha_nlos, "environment.alpha_nlos",
                 f"must exceed alpha_los={self.alpha_los!r} (got {self.alpha_nlos!r})")

    @classmethod
    def preset(cls, name: str, **overrides) -> "EnvironmentParams":
        try:
            a, b = ENVIRONMENT_PRESETS[name]
        except KeyError:
            raise ScenarioError("environment.preset",
                                f"unknown environment {name!r}; "
                                f"choose from {sorted(ENVIRONMENT_PRESETS)}") from None
        return cls(a=a, b=b, **overrides)


@dataclass(frozen=True)
class RfLinkParams:
    bandwidth_rf: float = 20e6
    p_max: float = 0.2
    file_bits: float = 1e9

    def __post_init__(self):
        _positive(self, "bandwidth_rf", "p_max", "file_bits", prefix="rf.")


@dataclass(frozen=True)
class FsoLinkParams:
    bandwidth_fso: float = 100e6
    beta_loss: float = 10.0 ** 1.5
    kappa: float = 4.3e-4
    theta_t: float = 0.06
    d_r: float = 0.2
    tau_combined: float = 0.9
    eta: float = 0.2
    noise_uav: float = 1e-9

    def __post_init__(self):
        _positive(self, "bandwidth_fso", "theta_t", "d_r", "noise_uav", prefix="fso.")
        _require(self.kappa >= 0.0, "fso.kappa", f"must be >= 0 (got {self.kappa!r})")
        _require(self.beta_loss >= BETA_MIN, "fso.beta_loss",
                 f"must be >= 2*pi/e = {BETA_MIN:.6f} (got {self.beta_loss!r})")
        _require(0.0 < self.tau_combined < 1.0, "fso.tau_combined",
                 f"must lie in (0, 1) (got {self.tau_combined!r})")
        _require(0.0 < self.eta < 1.0, "fso.eta", f"must lie in (0, 1) (got {self.eta!r})")


@dataclass(frozen=True)
class GeometryParams:
    h0: float = 60.0
    h_max: float = 200.0
    l0: float = 150.0
    r0: float = 50.0
    lambda_g: float = 1e-3
    p_hov: float = 1000.0

    def __post_init__(self):
        _positive(self, "r0", "lambda_g", "p_hov", prefix="geometry.")
        _require(math.isfinite(self.h0) and self.h0 > 0, "geometry.h0",
                 f"must be > 0 (got {self.h0!r})")
        _require(self.l0 >= 0, "geometry.l0", f"must be >= 0 (got {self.l0!r})")
        _require(self.h0 < self.h_max, "geometry.h0/geometry.h_max",
                 f"h0={self.h0!r} must be below h_max={self.h_max!r}")


@dataclass(frozen=True)
class Scenario:
    env: EnvironmentParams = field(default_factory=EnvironmentParams)
    rf: RfLinkParams = field(default_factory=RfLinkParams)
    fso: FsoLinkParams = field(default_factory=FsoLinkParams)
    geom: GeometryParams = field(default_factory=GeometryParams)

    def __post_init__(self):
        _require(self.fso.bandwidth_fso > self.rf.bandwidth_rf, "fso.bandwidth_fso",
                 f"must exceed rf.bandwidth_rf={self.rf.bandwidth_rf!r} "
                 f"(got {self.fso.bandwidth_fso!r})")
        # optical gain at the closest UAV position must stay below one
        fso, geom = self.fso, self.geom
        omega_max = fso.tau_combined * fso.d_r ** 2 / (fso.theta_t * geom.l0) ** 2 if geom.l0 > 0 else math.inf
        _require(omega_max < 1.0, "geometry.l0",
                 f"OBS offset {geom.l0!r} m puts the optical gain at h0 above 1; "
                 f"need l0 > {math.sqrt(fso.tau_combined) * fso.d_r / fso.theta_t:.6g}")

    def replace(self, **changes) -> "Scenario":
        """Copy with flat field overrides, e.g. ``replace(r0=30, p_hov=500)``."""
        parts = {s: {} for s in _SECTIONS.values()}
        for key, value in changes.items():
            try:
                parts[_FIELD_OWNER[key]][key] = value
            except KeyError:
                raise ScenarioError(key, "unknown scenario field") from None
        return Scenario(**{
            attr: dataclasses.replace(getattr(self, attr), **kw) if kw else getattr(self, attr)
            for attr, kw in parts.items()
        })

    def as_dict(self) -> dict:
        return {section: dataclasses.asdict(getattr(self, attr))
                for section, attr in _SECTIONS.items()}

    def digest(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True, default=repr)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_SECTIONS = {"environment": "env", "rf": "rf", "fso": "fso", "geometry": "geom"}
_RECORDS = {"env": EnvironmentParams, "rf": RfLinkParams,
            "fso": FsoLinkParams, "geom": GeometryParams}
_FIELD_OWNER = {f.name: attr for attr, cls in _RECORDS.items()
                for f in dataclasses.fields(cls)}


def _parse_section(section: str, items: dict) -> dict:
    cls = _RECORDS[_SECTIONS[section]]
    names = {f.name for f in dataclasses.fields(cls)}
    out = {}
    for key, raw in items.items():
        if section == "environment" and key == "preset":
            continue
        try:
            value = float(raw)
        except ValueError:
            raise ScenarioError(f"{section}.{key}", f"not a number: {raw!r}") from None
        if key in names:
            name = key
        elif key == "beta_db" and section == "fso":
            name, value = "beta_loss", 10.0 ** (value / 10.0)
        elif key.endswith("_mw") and key[:-3] in names:
            name, value = key[:-3], value * 1e-3
        elif key.endswith("_db"):
            raise ScenarioError(f"{section}.{key}", "dB input is only accepted for beta_db")
        else:
            raise ScenarioError(f"{section}.{key}", "unknown key")
        if name in out:
            raise ScenarioError(f"{section}.{name}", "given more than once")
        out[name] = value
    return out


def scenario_from_mapping(sections: dict) -> Scenario:
    """Build a scenario from ``{section: {key: value}}``; absent keys keep defaults."""
    unknown = set(sections) - set(_SECTIONS)
    if unknown:
        raise ScenarioError(sorted(unknown)[0], "unknown section")
    kwargs = {}
    for section, attr in _SECTIONS.items():
        items = {k.lower(): v for k, v in dict(sections.get(section, {})).items()}
        values = _parse_section(section, items)
        if section == "environment" and "preset" in items:
            name = str(items["preset"]).strip()
            if name not in ENVIRONMENT_PRESETS:
                raise ScenarioError("environment.preset",
                                    f"unknown environment {name!r}; "
                                    f"choose from {sorted(ENVIRONMENT_PRESETS)}")
            a, b = ENVIRONMENT_PRESETS[name]
            values = {"a": a, "b": b, **values}
        kwargs[attr] = _RECORDS[attr](**values)
    return Scenario(**kwargs)


def load_scenario(path) -> Scenario:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text(encoding="utf-8")
    parser.read_string(text, source=str(path))
    return scenario_from_mapping({s: dict(parser.items(s)) for s in parser.sections()})


def dump_scenario(scenario: Scenario) -> str:
    lines = []
    for section, values in scenario.as_dict().items():
        lines.append(f"[{section}]")
        lines.extend(f"{k} = {v!r}" for k, v in values.items())
        lines.append("")
    return "\n".join(lines)
