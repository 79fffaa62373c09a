"""The property/oracle suite run by ``uavfso validate``."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .channel import avg_rate, rate_lower_bound
from .edge_rate import edge_rate, edge_rate_exact
from .fso import fbr_satisfied, fph_satisfied
from .optimizer import Surrogate, optimal_fso, solve
from .oracles import brute_force_closed_form, fso_minimality_grid, mc_edge_distribution, mc_edge_rate
from .params import Scenario
from .sweeps import fmt

VALIDATION_COLUMNS = ("check", "expected", "observed", "tolerance", "pass")


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    observed: float
    tolerance: float
    passed: bool

    def row(self):
        return (self.name, fmt(self.expected), fmt(self.observed), fmt(self.tolerance), fmt(self.passed))


def _at_most(name, observed, tolerance, expected=0.0):
    return Check(name, expected, observed, tolerance, bool(observed <= tolerance))


def run_validation(scenario: Scenario, seed=42, n_drops=100_000, delta=1.0, n_points=20):
    """Run every check on ``scenario``; ``seed`` drives the drops and the probe points."""
    if n_drops < 1000:
        raise ValueError(f"need at least 1000 drops, got {n_drops}")
    rng = np.random.default_rng(seed)
    g, rf, env = scenario.geom, scenario.rf, scenario.env
    checks = []

    report = solve(scenario, delta)
    d = report.design

    # Monte Carlo against the closed-form CDF and the quadrature edge rate
    cdf = mc_edge_distribution(scenario, n_drops, seed)
    checks.append(_at_most("edge_cdf_sup_deviation", cdf.sup_deviation,
                           max(0.01, 1.63 / math.sqrt(n_drops))))
    mc = mc_edge_rate(scenario, d.p_u, d.h_u, n_drops, seed)
    rel = abs(mc.mean_low - report.c_edge) / report.c_edge
    checks.append(_at_most("mc_edge_rate_rel_error", rel,
                           max(0.01, 4.0 * mc.stderr_low / report.c_edge)))

    # per-user rate bound at the worst-placed user
    hs = np.linspace(g.h0, g.h_max, n_points)
    gap = rate_lower_bound(g.r0, hs, d.p_u, scenario) - avg_rate(g.r0, hs, d.p_u, scenario)
    checks.append(_at_most("rate_lower_bound_excess", float(np.max(gap)), 0.0))

    # Jensen bound above the concavity altitude
    h_min = math.sqrt(env.alpha_los + 1.0) * g.r0
    worst = -math.inf
    for _ in range(n_points):
        h = float(rng.uniform(h_min, 3.0 * h_min)) + 1e-9
        p = float(rng.uniform(0.0, rf.p_max))
        res = edge_rate(p, h, scenario)
        if res.c_edge_upper > 0:
            worst = max(worst, (res.c_edge - res.c_edge_upper) / res.c_edge_upper)
    checks.append(_at_most("jensen_bound_rel_excess", worst, 1e-12))

    # closed-form FSO variables: tight and minimal
    slack_worst, pf_margin = 0.0, math.inf
    for _ in range(n_points):
        h = float(rng.uniform(g.h0, g.h_max))
        p = float(rng.uniform(0.0, rf.p_max))
        c, _ = edge_rate_exact(p, h, scenario)
        op, _q = optimal_fso(p, h, scenario, c_edge=c)
        _, s_fbr = fbr_satisfied(op, h, c, scenario)
        _, s_fph = fph_satisfied(op, h, p, scenario)
        slack_worst = max(slack_worst, abs(s_fbr) / c if c > 0 else abs(s_fbr),
                          abs(s_fph) / (g.p_hov + p))
        m = fso_minimality_grid(p, h, c, scenario, n=60)
        pf_margin = min(pf_margin, m.grid_min_feasible_p_f / m.closed_form_p_f - 1.0)
    checks.append(_at_most("fso_closed_form_rel_slack", slack_worst, 1e-9))
    checks.append(Check("fso_closed_form_minimality", 0.0, pf_margin, 0.0, bool(pf_margin >= -1e-12)))

    # derivative of the surrogate: analytic vs finite difference, and monotone
    fd_worst, mono_violations = 0.0, 0
    for _ in range(n_points):
        h = float(rng.uniform(g.h0, g.h_max))
        sur = Surrogate(h, scenario)
        p = float(rng.uniform(0.01, 1.0)) * rf.p_max
        step = 1e-6 * max(p, 1.0)
        if p > step:
            fd = (sur.value(p + step) - sur.value(p - step)) / (2.0 * step)
            an = sur.derivative(p)
            fd_worst = max(fd_worst, abs(an - fd) / max(abs(an), abs(fd)))
        grid = np.sort(rng.uniform(0.0, rf.p_max, 8))
        vals = [sur.derivative(float(x)) for x in grid]
        mono_violations += int(np.sum(np.diff(vals) >= 0))
    checks.append(_at_most("surrogate_derivative_fd_rel_error", fd_worst, 1e-6))
    checks.append(_at_most("surrogate_derivative_monotone_violations", float(mono_violations), 0.0))

    # solver against a 2-D brute force with the analytic inner solution
    oracle = brute_force_closed_form(scenario, 25, 25)
    ratio = report.ee_system / oracle.ee_system
    checks.append(Check("solver_vs_bruteforce_ratio", 1.0, ratio, 0.99, bool(ratio >= 0.99)))

    ident = abs(report.ee_system - report.c_edge / d.p_f) / report.ee_system
    checks.append(_at_most("ee_identity_rel_error", ident, 1e-12))
    return checks


def write_validation_csv(checks, stream, header_line):
    stream.write(header_line + "\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(VALIDATION_COLUMNS)
    for c in checks:
        w.writerow(c.row())
