"""System energy-efficiency maximization.

For a fixed UAV power and altitude the cheapest OBS power and splitting ratio
are closed-form (both constraints tight).  The remaining 2-D problem is
handled on a surrogate objective that replaces the exact edge rate by its
Jensen upper bound: the optimal UAV power at each altitude comes from the sign
of the surrogate's derivative (bisection for the interior root), and the
altitude from a 1-D grid search.  The final design is re-evaluated with the
exact edge rate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .edge_rate import edge_rate_exact, jensen_factors, upper_rate
from .fso import FsoOperatingPoint, decode_snr, fbr_satisfied, fph_satisfied, fso_gain
from .params import Scenario
from .quadrature import DEFAULT_QUAD, QuadratureSpec

LN2 = math.log(2.0)
BISECT_LO = 1e-12
BISECT_RTOL = 1e-10


@dataclass(frozen=True)
class DesignVariables:
    p_f: float
    rho: float
    h_u: float
    p_u: float


@dataclass(frozen=True)
class QFactors:
    q_i: float
    q_e: float


@dataclass(frozen=True)
class AltitudeRecord:
    h_u: float
    ee_u_tilde: float
    p_u: float


@dataclass(frozen=True)
class SolutionReport:
    design: DesignVariables
    ee_system: float
    ee_u_exact: float
    ee_u_tilde: float
    c_edge: float
    q: QFactors
    fbr_slack: float
    fph_slack: float
    altitude_profile: tuple = field(default=(), repr=False)


def _check_domain(p_u, h_u, scenario):
    g = scenario.geom
    if not 0.0 <= p_u <= scenario.rf.p_max:
        raise ValueError(f"p_u={p_u!r} outside [0, {scenario.rf.p_max!r}]")
    if not g.h0 <= h_u <= g.h_max:
        raise ValueError(f"h_u={h_u!r} outside [{g.h0!r}, {g.h_max!r}]")


def q_factors(p_u, h_u, c_edge, scenario: Scenario) -> QFactors:
    fso = scenario.fso
    omega = fso_gain(h_u, scenario)
    q_i = fso.noise_uav * fso.beta_loss / omega * math.expm1(2.0 * LN2 * c_edge / fso.bandwidth_fso)
    q_e = (p_u + scenario.geom.p_hov) / (fso.eta * omega)
    return QFactors(q_i, q_e)


def optimal_fso(p_u, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD, c_edge=None):
    """Minimum OBS power and its splitting ratio for a given UAV power/altitude."""
    _check_domain(p_u, h_u, scenario)
    if c_edge is None:
        c_edge, _ = edge_rate_exact(p_u, h_u, scenario, quad)
    q = q_factors(p_u, h_u, c_edge, scenario)
    p_f = q.q_i + q.q_e
    return FsoOperatingPoint(p_f, q.q_i / p_f), q


def ee_u_exact(p_u, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD):
    _check_domain(p_u, h_u, scenario)
    c_edge, _ = edge_rate_exact(p_u, h_u, scenario, quad)
    q = q_factors(p_u, h_u, c_edge, scenario)
    return c_edge / (q.q_i + q.q_e)


class Surrogate:
    """Upper-bound energy efficiency at one altitude, as a function of UAV power.

    Written as ``N(p) / D(p)`` with x = 1 + p*y,
    N = mu*B*omega/(noise*beta) * log2(x) and
    D = x**(2*mu*B/W) - 1 + (p + p_hov)/(eta*noise*beta).
    """

    def __init__(self, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD):
        fso = scenario.fso
        self.h_u = h_u
        self.mu, self.y = jensen_factors(h_u, scenario, quad)
        self.omega = fso_gain(h_u, scenario)
        nb = fso.noise_uav * fso.beta_loss
        bw = scenario.rf.bandwidth_rf
        self._k = self.mu * bw * self.omega / (nb * LN2)
        self._expo = 2.0 * self.mu * bw / fso.bandwidth_fso
        self._inv = 1.0 / (fso.eta * nb)
        self._p_hov = scenario.geom.p_hov
        self._bw = bw

    def c_upper(self, p_u):
        return upper_rate(p_u, self.mu, self.y, self._bw)

    def _parts(self, p_u):
        lx = math.log1p(p_u * self.y)
        num = self._k * lx
        den = math.expm1(self._expo * lx) + (p_u + self._p_hov) * self._inv
        return lx, num, den

    def value(self, p_u):
        _, num, den = self._parts(p_u)
        return num / den

    def derivative(self, p_u):
        lx, num, den = self._parts(p_u)
        x = 1.0 + p_u * self.y
        d_num = self._k * self.y / x
        d_den = self._expo * self.y * math.exp((self._expo - 1.0) * lx) + self._inv
        return (d_num * den - num * d_den) / (den * den)


def ee_u_tilde(p_u, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD):
    _check_domain(p_u, h_u, scenario)
    return Surrogate(h_u, scenario, quad).value(p_u)


def inner_power_derivative(p_u, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD):
    if p_u < 0:
        raise ValueError(f"transmit power must be >= 0, got {p_u!r}")
    return Surrogate(h_u, scenario, quad).derivative(p_u)


class BracketError(RuntimeError):
    pass


def _best_power(sur: Surrogate, p_max):
    if sur.derivative(p_max) > 0:
        return p_max
    lo, hi = BISECT_LO, p_max
    if not sur.derivative(lo) > 0:
        raise BracketError(f"derivative not positive at p_u={lo} (h_u={sur.h_u})")
    while hi - lo > BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if sur.derivative(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def optimal_power_at_altitude(h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD):
    _check_domain(0.0, h_u, scenario)
    return _best_power(Surrogate(h_u, scenario, quad), scenario.rf.p_max)


def altitude_grid(scenario: Scenario, delta):
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta!r}")
    g = scenario.geom
    n = int(math.floor((g.h_max - g.h0) / delta + 1e-9))
    return g.h0 + delta * np.arange(n + 1)


def _profile_point(h_u, scenario, quad):
    sur = Surrogate(h_u, scenario, quad)
    p_u = _best_power(sur, scenario.rf.p_max)
    return AltitudeRecord(float(h_u), sur.value(p_u), p_u)


def altitude_profile(scenario: Scenario, delta=1.0, quad: QuadratureSpec = DEFAULT_QUAD, workers=None):
    grid = altitude_grid(scenario, delta)
    work = lambda h: _profile_point(float(h), scenario, quad)  # noqa: E731
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return tuple(pool.map(work, grid))
    return tuple(work(h) for h in grid)


def evaluate_design(p_u, h_u, scenario: Scenario, quad: QuadratureSpec = DEFAULT_QUAD,
                    ee_tilde=None, profile=()) -> SolutionReport:
    """Closed-form FSO variables at (p_u, h_u) and the exact efficiency figures."""
    c_edge, _ = edge_rate_exact(p_u, h_u, scenario, quad)
    op, q = optimal_fso(p_u, h_u, scenario, quad, c_edge=c_edge)
    if ee_tilde is None:
        ee_tilde = Surrogate(h_u, scenario, quad).value(p_u)
    _, fbr = fbr_satisfied(op, h_u, c_edge, scenario)
    _, fph = fph_satisfied(op, h_u, p_u, scenario)
    ee = c_edge / op.p_f
    return SolutionReport(
        design=DesignVariables(op.p_f, op.rho, float(h_u), p_u),
        ee_system=ee, ee_u_exact=ee, ee_u_tilde=ee_tilde, c_edge=c_edge, q=q,
        fbr_slack=fbr, fph_slack=fph, altitude_profile=tuple(profile),
    )


def solve(scenario: Scenario, delta=1.0, quad: QuadratureSpec = DEFAULT_QUAD, workers=None) -> SolutionReport:
    """Grid search over altitude on the surrogate, then exact re-evaluation."""
    profile = altitude_profile(scenario, delta, quad, workers)
    best, ee_max = None, 0.0
    for rec in profile:
        if rec.ee_u_tilde > ee_max:
            best, ee_max = rec, rec.ee_u_tilde
    if best is None:
        raise RuntimeError("surrogate efficiency is zero at every altitude")
    return evaluate_design(best.p_u, best.h_u, scenario, quad, ee_tilde=best.ee_u_tilde,
                           profile=profile)


@dataclass(frozen=True)
class AltitudeTable:
    """Per-altitude diagnostics at the surrogate-optimal UAV power."""

    h_u: np.ndarray
    p_u: np.ndarray
    ee_u_tilde: np.ndarray
    ee_u_exact: np.ndarray
    c_edge: np.ndarray
    c_edge_upper: np.ndarray
    omega: np.ndarray
    p_f: np.ndarray
    rho: np.ndarray
    q_i: np.ndarray
    q_e: np.ndarray

    @property
    def p_rec(self):
        return self.p_f * self.omega


def altitude_table(scenario: Scenario, delta=1.0, quad: QuadratureSpec = DEFAULT_QUAD,
                   profile=None) -> AltitudeTable:
    profile = profile or altitude_profile(scenario, delta, quad)
    cols = {k: [] for k in AltitudeTable.__dataclass_fields__}
    for rec in profile:
        sur = Surrogate(rec.h_u, scenario, quad)
        c, _ = edge_rate_exact(rec.p_u, rec.h_u, scenario, quad)
        q = q_factors(rec.p_u, rec.h_u, c, scenario)
        p_f = q.q_i + q.q_e
        for k, v in (("h_u", rec.h_u), ("p_u", rec.p_u), ("ee_u_tilde", rec.ee_u_tilde),
                     ("ee_u_exact", c / p_f), ("c_edge", c), ("c_edge_upper", sur.c_upper(rec.p_u)),
                     ("omega", sur.omega), ("p_f", p_f), ("rho", q.q_i / p_f),
                     ("q_i", q.q_i), ("q_e", q.q_e)):
            cols[k].append(v)
    return AltitudeTable(**{k: np.asarray(v, dtype=float) for k, v in cols.items()})


def auxiliary_altitudes(scenario: Scenario, delta=1.0, quad: QuadratureSpec = DEFAULT_QUAD,
                        p_f="fixed", table: AltitudeTable | None = None):
    """Altitudes maximizing received optical power and the exact edge rate.

    With ``p_f="fixed"`` the OBS power is held at one value, so received power
    peaks where the optical gain does.  ``p_f="optimized"`` lets the OBS power
    follow the closed-form optimum at each altitude.
    """
    if p_f not in ("fixed", "optimized"):
        raise ValueError("p_f must be 'fixed' or 'optimized'")
    t = table or altitude_table(scenario, delta, quad)
    h_ph = t.h_u[np.argmax(t.omega if p_f == "fixed" else t.p_rec)]
    h_mc = t.h_u[np.argmax(t.c_edge)]
    return float(h_ph), float(h_mc)


def fso_snr(report: SolutionReport, scenario: Scenario):
    d = report.design
    return decode_snr(FsoOperatingPoint(d.p_f, d.rho), d.h_u, scenario)
