"""Edge-user distribution under a homogeneous PPP and the edge multicast rate.

The edge radius is the largest user radius in one PPP realization.  A
realization with no users at all (probability ``exp(-pi*lambda*r0**2)``) is
kept as an atom that contributes zero rate, so ``c_edge`` is an unconditional
expectation and the density below integrates to ``1 - exp(-pi*lambda*r0**2)``.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .params import Scenario
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate


class InfeasibleCoverage(ZeroDivisionError):
    """The edge rate is zero, so the multicast never completes."""


def _check_radius(r, r0):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > r0):
        raise ValueError(f"radius must lie in [0, {r0}], got {r!r}")
    return r


def edge_cdf(r, lambda_g, r0):
    r = _check_radius(r, r0)
    out = np.exp(-np.pi * lambda_g * (r0 * r0 - r * r))
    return float(out) if out.ndim == 0 else out


def edge_pdf(r, lambda_g, r0):
    r = _check_radius(r, r0)
    out = np.exp(-np.pi * lambda_g * (r0 * r0 - r * r)) * 2.0 * np.pi * lambda_g * r
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EdgeRateResult:
    c_edge: float
    c_edge_upper: float
    mu_factor: float
    y_factor: float
    bound_valid: bool
    c_edge_error: float = 0.0


def jensen_factors(h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD):
    """LoS probability mass ``mu`` and the per-Watt SNR slope ``y`` at altitude ``h_u``.

    ``y`` is the LoS gain averaged under the LoS-weighted edge density,
    divided by the LoS noise power.
    """
    if h_u <= 0:
        raise ValueError(f"UAV altitude must be > 0, got {h_u!r}")
    prm = _kernels.pack(scenario, h_u)
    r0 = scenario.geom.r0
    mu, _ = integrate(_kernels.LOS_MASS, prm, 0.0, r0, quad)
    assert mu > 0.0, "LoS mass vanished; LoS probability is strictly positive"
    gain, _ = integrate(_kernels.LOS_GAIN, prm, 0.0, r0, quad)
    return mu, gain / (mu * scenario.env.noise_los)


def upper_rate(p_u, mu, y, bandwidth_rf):
    return mu * bandwidth_rf * math.log1p(p_u * y) / math.log(2.0)


def edge_rate_exact(p_u, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD):
    """Quadrature of the lower-bound rate against the edge density: ``(value, error)``."""
    if p_u < 0:
        raise ValueError(f"transmit power must be >= 0, got {p_u!r}")
    if h_u <= 0:
        raise ValueError(f"UAV altitude must be > 0, got {h_u!r}")
    if p_u == 0:
        return 0.0, 0.0
    prm = _kernels.pack(scenario, h_u, p_u)
    return integrate(_kernels.RATE_LOW, prm, 0.0, scenario.geom.r0, quad)


def edge_rate(p_u, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD) -> EdgeRateResult:
    c_edge, err = edge_rate_exact(p_u, h_u, scenario, quad)
    mu, y = jensen_factors(h_u, scenario, quad)
    return EdgeRateResult(
        c_edge=c_edge,
        c_edge_upper=upper_rate(p_u, mu, y, scenario.rf.bandwidth_rf),
        mu_factor=mu,
        y_factor=y,
        bound_valid=h_u > math.sqrt(scenario.env.alpha_los + 1.0) * scenario.geom.r0,
        c_edge_error=err,
    )


def mission_time(file_bits, c_edge):
    if c_edge <= 0:
        raise InfeasibleCoverage("edge rate is zero: multicast cannot complete")
    return file_bits / c_edge
