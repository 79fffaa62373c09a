"""Air-to-ground channel and per-user rates.

All functions broadcast over numpy arrays of ``r`` (and ``h_u``/``p_u`` where it
makes sense); scalars come back as plain floats.
"""
import numpy as np

from .params import EnvironmentParams, Scenario

LN2 = np.log(2.0)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _check_geometry(r, h_u):
    if np.any(np.asarray(h_u) <= 0):
        raise ValueError(f"UAV altitude must be > 0, got {h_u!r}")
    if np.any(np.asarray(r) < 0):
        raise ValueError(f"horizontal radius must be >= 0, got {r!r}")


def elevation_angle_deg(r, h_u):
    """Elevation angle in degrees; 90 directly below the UAV (r = 0)."""
    _check_geometry(r, h_u)
    return _out(np.degrees(np.arctan2(h_u, r)))


def los_probability(r, h_u, env: EnvironmentParams):
    theta = elevation_angle_deg(r, h_u)
    return _out(1.0 / (1.0 + env.a * np.exp(-env.b * (theta - env.a))))


def a2g_gain(r, h_u, los: bool, env: EnvironmentParams):
    _check_geometry(r, h_u)
    alpha = env.alpha_los if los else env.alpha_nlos
    return _out((np.square(h_u) + np.square(r)) ** (-0.5 * alpha))


def _check_power(p_u):
    if np.any(np.asarray(p_u) < 0):
        raise ValueError(f"transmit power must be >= 0, got {p_u!r}")


def rate_lower_bound(r, h_u, p_u, scenario: Scenario):
    """LoS-only part of the average rate, bits/s."""
    _check_power(p_u)
    env = scenario.env
    snr = np.asarray(p_u) / env.noise_los * a2g_gain(r, h_u, True, env)
    return _out(los_probability(r, h_u, env) * scenario.rf.bandwidth_rf * np.log1p(snr) / LN2)


def avg_rate(r, h_u, p_u, scenario: Scenario):
    """LoS/NLoS-averaged rate at a user at radius ``r``, bits/s."""
    _check_power(p_u)
    env = scenario.env
    p_los = los_probability(r, h_u, env)
    snr_n = np.asarray(p_u) / env.noise_nlos * a2g_gain(r, h_u, False, env)
    nlos = (1.0 - p_los) * scenario.rf.bandwidth_rf * np.log1p(snr_n) / LN2
    return _out(rate_lower_bound(r, h_u, p_u, scenario) + nlos)
