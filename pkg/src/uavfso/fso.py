"""Optical backhaul/power link: channel gain, throughput and the two UAV constraints."""
import math
from dataclasses import dataclass

from .params import GeometryParams, Scenario

# Relative slack tolerance for both constraints; closed-form optima are exactly tight.
CONSTRAINT_RTOL = 1e-9


@dataclass(frozen=True)
class FsoOperatingPoint:
    p_f: float
    rho: float

    def __post_init__(self):
        if not self.p_f > 0:
            raise ValueError(f"OBS transmit power must be > 0, got {self.p_f!r}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"power-splitting ratio must lie in [0, 1], got {self.rho!r}")


@dataclass(frozen=True)
class FsoLinkState:
    l_back: float
    omega: float
    p_rec: float


def backhaul_distance(h_u, geom: GeometryParams):
    if h_u < geom.h0:
        raise ValueError(f"UAV altitude {h_u!r} is below the OBS altitude {geom.h0!r}")
    return math.hypot(geom.l0, h_u - geom.h0)


def fso_gain(h_u, scenario: Scenario):
    """Average optical channel power gain at altitude ``h_u`` (linear)."""
    fso = scenario.fso
    dist = backhaul_distance(h_u, scenario.geom)
    geometric = fso.tau_combined * fso.d_r ** 2 / (fso.theta_t ** 2 * dist ** 2)
    return geometric * 10.0 ** (-fso.kappa * dist / 10.0)


def link_state(op: FsoOperatingPoint, h_u, scenario: Scenario) -> FsoLinkState:
    omega = fso_gain(h_u, scenario)
    return FsoLinkState(backhaul_distance(h_u, scenario.geom), omega, op.p_f * omega)


def decode_snr(op: FsoOperatingPoint, h_u, scenario: Scenario):
    fso = scenario.fso
    return op.p_f * fso_gain(h_u, scenario) * op.rho / (fso.noise_uav * fso.beta_loss)


def backhaul_rate(op: FsoOperatingPoint, h_u, scenario: Scenario):
    """IM/DD backhaul throughput in bits/s."""
    return 0.5 * scenario.fso.bandwidth_fso * math.log1p(decode_snr(op, h_u, scenario)) / math.log(2.0)


def harvested_power(op: FsoOperatingPoint, h_u, scenario: Scenario):
    return scenario.fso.eta * op.p_f * fso_gain(h_u, scenario) * (1.0 - op.rho)


def fbr_satisfied(op: FsoOperatingPoint, h_u, c_edge, scenario: Scenario, rtol=CONSTRAINT_RTOL):
    """Backhaul-rate constraint: ``(satisfied, slack in bits/s)``."""
    if c_edge < 0:
        raise ValueError(f"edge rate must be >= 0, got {c_edge!r}")
    slack = backhaul_rate(op, h_u, scenario) - c_edge
    return slack >= -rtol * c_edge, slack


def fph_satisfied(op: FsoOperatingPoint, h_u, p_u, scenario: Scenario, rtol=CONSTRAINT_RTOL):
    """Power-harvesting constraint: ``(satisfied, slack in W)``."""
    if p_u < 0:
        raise ValueError(f"transmit power must be >= 0, got {p_u!r}")
    need = scenario.geom.p_hov + p_u
    slack = harvested_power(op, h_u, scenario) - need
    return slack >= -rtol * need, slack
