"""Independent checks: exhaustive grid search and Monte Carlo PPP drops.

None of this goes through the closed-form solver path, except where a
function name says so (``brute_force_closed_form`` keeps the analytic inner
FSO solution and only grids the UAV power and altitude).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import avg_rate, rate_lower_bound
from .edge_rate import edge_cdf, edge_rate_exact
from .fso import CONSTRAINT_RTOL, fso_gain
from .optimizer import DesignVariables, q_factors
from .params import (EnvironmentParams, FsoLinkParams, GeometryParams, RfLinkParams,
                     Scenario, ENVIRONMENT_PRESETS)
from .quadrature import DEFAULT_QUAD

RNG_NAME = f"philox4x64-seedsequence/numpy-{np.__version__}"
CHUNK_DROPS = 1 << 16


class EmptyFeasibleSet(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.count < 1 or self.hi < self.lo or (self.count > 1 and self.hi == self.lo):
            raise ValueError(f"bad axis {self!r}")
        if self.log and self.lo <= 0:
            raise ValueError("log axis needs lo > 0")

    def values(self):
        if self.count == 1:
            return np.array([self.lo])
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class GridSpec:
    p_f: Axis
    rho: Axis
    h_u: Axis
    p_u: Axis
    rho_zero: bool = True

    def check(self, scenario: Scenario):
        g = scenario.geom
        if self.p_f.lo <= 0:
            raise ValueError("p_f axis must be positive")
        if self.rho.lo < 0 or self.rho.hi > 1:
            raise ValueError("rho axis must lie in [0, 1]")
        if self.h_u.lo < g.h0 or self.h_u.hi > g.h_max:
            raise ValueError("h_u axis outside [h0, h_max]")
        if self.p_u.lo < 0 or self.p_u.hi > scenario.rf.p_max:
            raise ValueError("p_u axis outside [0, p_max]")

    def rho_values(self):
        v = self.rho.values()
        return np.concatenate(([0.0], v)) if self.rho_zero and v[0] > 0 else v

    @classmethod
    def for_scenario(cls, scenario: Scenario, n=15):
        """A grid sized from physical bounds only.

        OBS power spans from the hover-only requirement at the best optical
        gain up to full rate plus full power at the worst gain; the splitting
        ratio is log-spaced since its useful values span many decades.
        """
        g, fso, env, rf = scenario.geom, scenario.fso, scenario.env, scenario.rf
        nb = fso.noise_uav * fso.beta_loss
        w_best, w_worst = fso_gain(g.h0, scenario), fso_gain(g.h_max, scenario)
        c_cap = rf.bandwidth_rf * math.log2(1.0 + rf.p_max / env.noise_los * g.h0 ** -env.alpha_los)
        info_cap = nb * math.expm1(2.0 * math.log(2.0) * c_cap / fso.bandwidth_fso)
        p_lo = g.p_hov / (fso.eta * w_best)
        p_hi = ((g.p_hov + rf.p_max) / fso.eta + info_cap) / w_worst
        rho_hi = min(0.5, 10.0 * info_cap / (w_best * p_lo))
        rho_lo = rho_hi * 1e-4
        return cls(p_f=Axis(p_lo, p_hi, n, log=True), rho=Axis(rho_lo, rho_hi, n - 1, log=True),
                   h_u=Axis(g.h0, g.h_max, n), p_u=Axis(rf.p_max / n, rf.p_max, n))


@dataclass(frozen=True)
class BruteForceResult:
    design: DesignVariables
    ee_system: float
    c_edge: float
    n_evaluated: int


def edge_rate_table(scenario: Scenario, h_values, p_values, quad=DEFAULT_QUAD, workers=None):
    def row(h):
        return [edge_rate_exact(float(p), float(h), scenario, quad)[0] for p in p_values]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, h_values))
    else:
        rows = [row(h) for h in h_values]
    return np.asarray(rows, dtype=float).reshape(len(h_values), len(p_values))


def brute_force_p1(scenario: Scenario, grid: GridSpec, quad=DEFAULT_QUAD, backend=None,
                   c_table=None) -> BruteForceResult:
    """Best feasible grid point of the full 4-D problem, exact edge rate throughout."""
    grid.check(scenario)
    be = backend or _kernels.backend
    fso = scenario.fso
    p_f, rho = grid.p_f.values(), grid.rho_values()
    h_u, p_u = grid.h_u.values(), grid.p_u.values()
    if c_table is None:
        c_table = edge_rate_table(scenario, h_u, p_u, quad)
    omega = np.array([fso_gain(float(h), scenario) for h in h_u])
    best, idx = be.grid_scan(p_f, rho, omega, np.ascontiguousarray(c_table), p_u,
                             0.5 * fso.bandwidth_fso, fso.noise_uav * fso.beta_loss,
                             fso.eta, scenario.geom.p_hov, CONSTRAINT_RTOL)
    if best < 0:
        raise EmptyFeasibleSet("no grid point satisfies both constraints")
    ih, ip, jf, jr = (int(i) for i in idx)
    design = DesignVariables(float(p_f[jf]), float(rho[jr]), float(h_u[ih]), float(p_u[ip]))
    return BruteForceResult(design, float(best), float(c_table[ih, ip]),
                            p_f.size * rho.size * h_u.size * p_u.size)


def brute_force_closed_form(scenario: Scenario, n_h=50, n_p=50, quad=DEFAULT_QUAD,
                            c_table=None) -> BruteForceResult:
    """Grid over (p_u, h_u) with the analytic minimum OBS power at each point."""
    g = scenario.geom
    h_u = np.linspace(g.h0, g.h_max, n_h)
    p_u = np.linspace(scenario.rf.p_max / n_p, scenario.rf.p_max, n_p)
    if c_table is None:
        c_table = edge_rate_table(scenario, h_u, p_u, quad)
    best = None
    for ih, h in enumerate(h_u):
        for ip, p in enumerate(p_u):
            c = float(c_table[ih, ip])
            q = q_factors(float(p), float(h), c, scenario)
            ee = c / (q.q_i + q.q_e)
            if best is None or ee > best[0]:
                pf = q.q_i + q.q_e
                best = (ee, DesignVariables(pf, q.q_i / pf, float(h), float(p)), c)
    return BruteForceResult(best[1], best[0], best[2], n_h * n_p)


@dataclass(frozen=True)
class MinimalityCheck:
    closed_form_p_f: float
    grid_min_feasible_p_f: float
    n_feasible: int
    n_points: int


def fso_minimality_grid(p_u, h_u, c_edge, scenario: Scenario, n=200):
    """Dense (P_F, rho) feasibility scan around the analytic minimum OBS power.

    P_F spans [0.5, 2] x the closed form; rho mixes a uniform cover of [0, 1]
    with a log-spaced cover around the analytic split.
    """
    q = q_factors(p_u, h_u, c_edge, scenario)
    pf_star = q.q_i + q.q_e
    rho_star = q.q_i / pf_star
    p_f = np.linspace(0.5 * pf_star, 2.0 * pf_star, n)
    lin = np.linspace(0.0, 1.0, n // 2)
    if rho_star > 0:
        logs = np.geomspace(rho_star / 10.0, min(1.0, 10.0 * rho_star), n - n // 2)
    else:
        logs = np.geomspace(1e-15, 1e-3, n - n // 2)
    rho = np.sort(np.concatenate((lin, logs)))
    fso = scenario.fso
    omega = fso_gain(h_u, scenario)
    pf, r = p_f[:, None], rho[None, :]
    rate = 0.5 * fso.bandwidth_fso * np.log1p(pf * omega * r / (fso.noise_uav * fso.beta_loss)) / math.log(2.0)
    need = scenario.geom.p_hov + p_u
    feasible = (rate - c_edge >= -CONSTRAINT_RTOL * c_edge) & \
               (fso.eta * pf * omega * (1.0 - r) - need >= -CONSTRAINT_RTOL * need)
    pf_feasible = np.broadcast_to(pf, feasible.shape)[feasible]
    return MinimalityCheck(pf_star, float(pf_feasible.min()) if pf_feasible.size else math.inf,
                           int(feasible.sum()), feasible.size)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DropSample:
    gu_radii: np.ndarray = field(repr=False)
    edge_radius: float | None
    realized_edge_rate_low: float | None = None
    realized_edge_rate_full: float | None = None

    @property
    def empty(self):
        return self.edge_radius is None


def _generator(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def ppp_drop(lambda_g, r0, seed) -> DropSample:
    """One homogeneous PPP realization on the disk of radius ``r0``."""
    rng = _generator(seed)
    n = rng.poisson(math.pi * lambda_g * r0 * r0)
    radii = r0 * np.sqrt(rng.random(n))
    return DropSample(radii, float(radii.max()) if n else None)


def evaluate_drop(sample: DropSample, scenario: Scenario, p_u, h_u) -> DropSample:
    if sample.empty:
        return DropSample(sample.gu_radii, None, 0.0, 0.0)
    r = sample.edge_radius
    return DropSample(sample.gu_radii, r, rate_lower_bound(r, h_u, p_u, scenario),
                      avg_rate(r, h_u, p_u, scenario))


def _chunk_sizes(n_drops):
    full, rest = divmod(n_drops, CHUNK_DROPS)
    return [CHUNK_DROPS] * full + ([rest] if rest else [])


def edge_radii(lambda_g, r0, n_drops, seed, backend=None, workers=None):
    """Edge radius of ``n_drops`` independent realizations; -1 marks an empty drop.

    Drops are generated in fixed-size chunks, chunk ``i`` drawing from the
    ``i``-th child of the seed sequence, so the output does not depend on
    ``workers``.
    """
    be = backend or _kernels.backend
    sizes = _chunk_sizes(int(n_drops))
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    mean = math.pi * lambda_g * r0 * r0

    def run(i):
        rng = np.random.Generator(np.random.Philox(streams[i]))
        counts = rng.poisson(mean, sizes[i]).astype(np.int64)
        u = rng.random(int(counts.sum()))
        return be.edge_radii(counts, u, float(r0))

    idx = range(len(sizes))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, idx))
    else:
        parts = [run(i) for i in idx]
    return np.concatenate(parts) if parts else np.empty(0)


@dataclass(frozen=True)
class EmpiricalCdf:
    r: np.ndarray
    empirical: np.ndarray
    analytic: np.ndarray
    n_drops: int

    @property
    def sup_deviation(self):
        return float(np.max(np.abs(self.empirical - self.analytic)))


def _check_drops(n_drops):
    if n_drops < 1000:
        raise ValueError(f"need at least 1000 drops, got {n_drops}")


def mc_edge_distribution(scenario: Scenario, n_drops, seed, n_grid=100, backend=None,
                         workers=None) -> EmpiricalCdf:
    """Empirical P(R_edge <= r) on an ``n_grid``-point grid over [0, r0].

    Empty drops sit below every grid point, matching the atom of the analytic CDF at 0.
    """
    _check_drops(n_drops)
    g = scenario.geom
    radii = np.sort(edge_radii(g.lambda_g, g.r0, n_drops, seed, backend, workers))
    r = np.linspace(0.0, g.r0, n_grid)
    emp = np.searchsorted(radii, r, side="right") / radii.size
    return EmpiricalCdf(r, emp, edge_cdf(r, g.lambda_g, g.r0), int(n_drops))


@dataclass(frozen=True)
class McEdgeRate:
    mean_low: float
    mean_full: float
    stderr_low: float
    n_drops: int


def mc_edge_rate(scenario: Scenario, p_u, h_u, n_drops, seed, backend=None, workers=None) -> McEdgeRate:
    """Monte Carlo mean of the edge user's rate; empty drops count as zero."""
    _check_drops(n_drops)
    if p_u < 0:
        raise ValueError(f"transmit power must be >= 0, got {p_u!r}")
    be = backend or _kernels.backend
    g = scenario.geom
    radii = edge_radii(g.lambda_g, g.r0, n_drops, seed, be, workers)
    s_low, s_full, s_sq = be.rate_sums(radii, _kernels.pack(scenario, h_u, p_u))
    n = radii.size
    mean_low = s_low / n
    var = max(s_sq / n - mean_low * mean_low, 0.0) * n / (n - 1)
    return McEdgeRate(mean_low, s_full / n, math.sqrt(var / n), int(n))


@dataclass(frozen=True)
class ErrorScaling:
    n_levels: tuple
    rms_deviation: tuple
    slope: float


def mc_error_scaling(scenario: Scenario, p_u, h_u, reference, n_levels=(10_000, 40_000, 160_000),
                     replicates=24, seed=0, backend=None) -> ErrorScaling:
    """RMS deviation of the Monte Carlo edge rate from ``reference`` at each n.

    Replicate ``k`` at level ``j`` uses seed ``(seed, j, k)``.  The slope is the
    least-squares fit of log(rms) against log(n); 1/sqrt(n) convergence gives -0.5.
    """
    rms = []
    for j, n in enumerate(n_levels):
        dev = [mc_edge_rate(scenario, p_u, h_u, n, (seed, j, k), backend).mean_low - reference
               for k in range(replicates)]
        rms.append(math.sqrt(math.fsum(d * d for d in dev) / replicates))
    slope = float(np.polyfit(np.log(n_levels), np.log(rms), 1)[0])
    return ErrorScaling(tuple(n_levels), tuple(rms), slope)


# ---------------------------------------------------------------------------
# randomized scenarios
# ---------------------------------------------------------------------------

def random_scenario(rng: np.random.Generator) -> Scenario:
    """A scenario drawn from broad but physically sensible parameter ranges."""
    def logu(lo, hi):
        return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))

    a, b = ENVIRONMENT_PRESETS[rng.choice(sorted(ENVIRONMENT_PRESETS))]
    alpha_l = float(rng.uniform(2.5, 3.5))
    noise_l = logu(1e-10, 1e-8)
    env = EnvironmentParams(a=a, b=b, alpha_los=alpha_l, alpha_nlos=alpha_l + float(rng.uniform(0.5, 2.0)),
                            noise_los=noise_l, noise_nlos=noise_l * float(rng.uniform(0.5, 1.2)))
    bw = logu(5e6, 5e7)
    rf = RfLinkParams(bandwidth_rf=bw, p_max=logu(0.05, 2.0), file_bits=logu(1e6, 1e10))
    fso = FsoLinkParams(bandwidth_fso=bw * logu(1.5, 50.0), beta_loss=10.0 ** rng.uniform(0.5, 2.0),
                        kappa=float(rng.uniform(1e-4, 1e-3)), theta_t=float(rng.uniform(0.03, 0.1)),
                        d_r=float(rng.uniform(0.1, 0.3)), tau_combined=float(rng.uniform(0.5, 0.95)),
                        eta=float(rng.uniform(0.1, 0.5)), noise_uav=logu(1e-10, 1e-8))
    h0 = float(rng.uniform(20.0, 80.0))
    geom = GeometryParams(h0=h0, h_max=h0 + float(rng.uniform(60.0, 250.0)), l0=float(rng.uniform(50.0, 300.0)),
                          r0=float(rng.uniform(20.0, 80.0)), lambda_g=logu(1e-4, 1e-2), p_hov=logu(0.5, 2000.0))
    return Scenario(env, rf, fso, geom)
