"""Parameter sweeps, figure presets and CSV emission."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import __version__, _kernels
from .channel import avg_rate, rate_lower_bound
from .fso import FsoOperatingPoint, decode_snr
from .optimizer import (Surrogate, evaluate_design, optimal_power_at_altitude, solve)
from .params import EnvironmentParams, Scenario
from .quadrature import DEFAULT_QUAD

SWEEP_COLUMNS = (
    "swept_value", "ee_system", "ee_u_exact", "ee_u_tilde", "c_edge", "p_f", "rho",
    "h_u", "p_u", "q_i", "q_e", "snr_fso",
    # diagnostics, present in every table
    "c_edge_upper", "omega", "p_rec", "c_full_r0", "c_low_r0", "gap_r0",
)
SWEEPABLE = ("h_u", "lambda_g", "p_hov", "r0", "p_u")
FLOAT_FMT = "{:.12g}"


@dataclass
class SweepTable:
    swept_name: str
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name):
        i = SWEEP_COLUMNS.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)


def metadata_line(scenario: Scenario, delta=None, seed=None, **extra):
    items = {"tool": f"uavfso {__version__}", "scenario": scenario.digest(),
             "delta": delta, "seed": seed, "backend": _kernels.backend.name, **extra}
    return "# " + " ".join(f"{k}={'-' if v is None else v}" for k, v in items.items())


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return FLOAT_FMT.format(float(x))
    return str(x)


def _row(value, report, scenario: Scenario, quad):
    d = report.design
    sur = Surrogate(d.h_u, scenario, quad)
    r0 = scenario.geom.r0
    full = avg_rate(r0, d.h_u, d.p_u, scenario)
    low = rate_lower_bound(r0, d.h_u, d.p_u, scenario)
    return (
        value, report.ee_system, report.ee_u_exact, report.ee_u_tilde, report.c_edge,
        d.p_f, d.rho, d.h_u, d.p_u, report.q.q_i, report.q.q_e,
        decode_snr(FsoOperatingPoint(d.p_f, d.rho), d.h_u, scenario),
        sur.c_upper(d.p_u), sur.omega, d.p_f * sur.omega, full, low,
        (full - low) / full if full > 0 else 0.0,
    )


def sweep(scenario: Scenario, name, values, delta=1.0, p_u=None, h_u=None, quad=DEFAULT_QUAD,
          workers=None) -> SweepTable:
    """One row per value of ``name``.

    Scenario parameters (``lambda_g``, ``p_hov``, ``r0``) re-run the full
    solver.  ``h_u`` fixes the altitude and uses ``p_u`` if given, else the
    surrogate-optimal power; ``p_u`` fixes the power at altitude ``h_u`` (the
    solved altitude when omitted).
    """
    if name not in SWEEPABLE:
        raise ValueError(f"unknown sweep parameter {name!r}; choose from {', '.join(SWEEPABLE)}")
    values = np.sort(np.asarray(values, dtype=float))
    table = SweepTable(name)
    if name == "p_u" and h_u is None:
        h_u = solve(scenario, delta, quad, workers).design.h_u
    for v in values:
        v = float(v)
        if name == "h_u":
            p = p_u if p_u is not None else optimal_power_at_altitude(v, scenario, quad)
            sc, rep = scenario, evaluate_design(p, v, scenario, quad)
        elif name == "p_u":
            sc, rep = scenario, evaluate_design(v, h_u, scenario, quad)
        else:
            sc = scenario.replace(**{name: v})
            rep = solve(sc, delta, quad, workers)
        table.rows.append(_row(v, rep, sc, quad))
    return table


def write_csv(table: SweepTable, stream, header_line: str):
    stream.write(header_line + "\n")
    for key, value in table.meta.items():
        stream.write(f"# {key}={value}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in table.rows:
        w.writerow([fmt(x) for x in row])


def table_to_csv(table: SweepTable, header_line: str) -> str:
    buf = io.StringIO()
    write_csv(table, buf, header_line)
    return buf.getvalue()


def read_csv(text: str):
    """Parse a sweep CSV back into ``(metadata lines, header, float rows)``."""
    meta, body = [], []
    for line in text.splitlines():
        (meta if line.startswith("#") else body).append(line)
    rows = list(csv.reader(body))
    return meta, tuple(rows[0]), [[float(x) for x in r] for r in rows[1:]]


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepJob:
    label: str
    scenario: Scenario
    name: str
    values: np.ndarray
    p_u: float | None = None


def _fig2(base: Scenario):
    jobs = []
    for env_name in ("high-rise", "dense-urban"):
        env = EnvironmentParams.preset(env_name, alpha_los=base.env.alpha_los,
                                       alpha_nlos=base.env.alpha_nlos, noise_los=base.env.noise_los,
                                       noise_nlos=base.env.noise_nlos)
        sc = Scenario(env, base.rf, base.fso, base.geom).replace(h0=10.0, h_max=200.0)
        jobs.append(SweepJob(f"fig2_{env_name.replace('-', '_')}", sc, "h_u",
                             np.arange(10.0, 200.0 + 0.5, 1.0), p_u=sc.rf.p_max))
    return jobs


def _fig3(base: Scenario):
    sc = base.replace(h_max=600.0)
    return [SweepJob("fig3", sc, "h_u", np.arange(sc.geom.h0, 600.0 + 0.5, 1.0))]


FIG4_LAMBDAS = np.geomspace(1e-4, 3e-2, 61)


def _fig4(base: Scenario):
    return [SweepJob(f"fig4_r0_{int(r0)}", base.replace(r0=r0), "lambda_g", FIG4_LAMBDAS)
            for r0 in (30.0, 50.0)]


def _fig5(base: Scenario):
    return [SweepJob("fig5", base, "p_hov", np.arange(100.0, 2000.0 + 1.0, 100.0))]


PRESETS = {"fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}


def preset_jobs(preset: str, base: Scenario | None = None):
    try:
        build = PRESETS[preset]
    except KeyError:
        raise ValueError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}") from None
    return build(base or Scenario())


def run_job(job: SweepJob, delta=1.0, quad=DEFAULT_QUAD, workers=None) -> SweepTable:
    table = sweep(job.scenario, job.name, job.values, delta, p_u=job.p_u, quad=quad, workers=workers)
    table.meta.update(table=job.label, swept=job.name)
    return table
