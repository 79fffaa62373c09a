import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavfso import _kernels
from uavfso.channel import rate_lower_bound
from uavfso.edge_rate import (InfeasibleCoverage, edge_cdf, edge_pdf, edge_rate, edge_rate_exact,
                              jensen_factors, mission_time)
from uavfso.params import Scenario
from uavfso.quadrature import QuadratureSpec, integrate


def test_cdf_endpoints():
    # mpmath: exp(-pi * 1e-3 * 2500)
    assert edge_cdf(0.0, 1e-3, 50.0) == pytest.approx(3.88203203926766247e-4, rel=1e-13)
    assert edge_cdf(50.0, 1e-3, 50.0) == 1.0
    with pytest.raises(ValueError):
        edge_cdf(51.0, 1e-3, 50.0)
    with pytest.raises(ValueError):
        edge_pdf(-0.5, 1e-3, 50.0)


def test_pdf_is_derivative_of_cdf():
    r = np.linspace(1.0, 49.0, 25)
    step = 1e-5
    fd = (edge_cdf(r + step, 1e-3, 50.0) - edge_cdf(r - step, 1e-3, 50.0)) / (2 * step)
    assert np.max(np.abs(fd - edge_pdf(r, 1e-3, 50.0)) / edge_pdf(r, 1e-3, 50.0)) < 1e-6


@pytest.mark.parametrize("lam,r0", [(1e-4, 50.0), (1e-3, 50.0), (1e-2, 30.0), (3e-2, 80.0)])
def test_pdf_mass_is_one_minus_empty_atom(lam, r0):
    prm = _kernels.pack(Scenario().replace(lambda_g=lam, r0=r0), 100.0)
    mass, _ = integrate(_kernels.PDF, prm, 0.0, r0)
    assert mass == pytest.approx(-math.expm1(-math.pi * lam * r0 * r0), rel=1e-10)


def test_default_edge_rate_value(defaults):
    # independent mpmath quadrature at h=100 m, p=0.2 W
    c, err = edge_rate_exact(0.2, 100.0, defaults)
    assert c == pytest.approx(62317189.1929209555, rel=1e-10)
    assert err < 1e-9 * c


def test_jensen_factor_values(defaults):
    mu, y = jensen_factors(100.0, defaults)
    assert mu == pytest.approx(0.430859304282468718, rel=1e-10)
    assert y == pytest.approx(747.226401908967065, rel=1e-10)


def test_quadrature_tolerance_stability(defaults):
    loose, _ = edge_rate_exact(0.2, 80.0, defaults, QuadratureSpec(1e-6))
    tight, _ = edge_rate_exact(0.2, 80.0, defaults, QuadratureSpec(1e-12))
    assert abs(loose - tight) / tight < 1e-6


def test_zero_power_and_mission_time(defaults):
    assert edge_rate_exact(0.0, 100.0, defaults) == (0.0, 0.0)
    with pytest.raises(InfeasibleCoverage):
        mission_time(1e9, 0.0)
    assert mission_time(1e9, 5e7) == pytest.approx(20.0)


def test_edge_rate_not_above_worst_case_times_coverage(defaults):
    # the edge radius is at most r0, so the rate is at least the r0 rate on
    # non-empty drops and never more than the r=0 rate
    g = defaults.geom
    c, _ = edge_rate_exact(0.2, 100.0, defaults)
    nonempty = -math.expm1(-math.pi * g.lambda_g * g.r0 ** 2)
    assert rate_lower_bound(g.r0, 100.0, 0.2, defaults) * nonempty <= c
    assert c <= rate_lower_bound(0.0, 100.0, 0.2, defaults) * nonempty


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(1.0001, 3.0), st.floats(1.05, 4.0))
def test_jensen_bound_above_concavity_altitude(p_frac, h_factor, p_scale):
    sc = Scenario()
    h = math.sqrt(sc.env.alpha_los + 1.0) * sc.geom.r0 * h_factor
    res = edge_rate(p_frac * sc.rf.p_max, h, sc)
    assert res.bound_valid
    assert res.c_edge <= res.c_edge_upper * (1 + 1e-12)


def test_rate_increases_with_power(defaults):
    vals = [edge_rate_exact(p, 120.0, defaults)[0] for p in (0.01, 0.05, 0.1, 0.2)]
    assert np.all(np.diff(vals) > 0)


def test_conditional_edge_rate_decreases_with_density(defaults):
    # Given at least one user, more users push the edge outwards.  The
    # unconditional mean also carries the empty-drop atom, which grows the
    # rate with density while the disk is mostly empty.
    lams = np.geomspace(1e-4, 1e-2, 15)
    r0 = defaults.geom.r0
    cond, uncond = [], []
    for lam in lams:
        sc = defaults.replace(lambda_g=float(lam))
        c, _ = edge_rate_exact(0.2, 100.0, sc)
        uncond.append(c)
        cond.append(c / -math.expm1(-math.pi * lam * r0 * r0))
    assert np.all(np.diff(cond) < 0)
    assert uncond[1] > uncond[0]
    assert np.all(np.diff(uncond)[lams[1:] >= 3e-3] < 0)
