"""Hot numeric loops, with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``UAVFSO_DISABLE_NUMBA`` is not
set to a truthy value.  Both paths are always importable through
``numba_backend`` / ``numpy_backend`` so they can be compared directly.

Integrand parameter vector layout (float64, see ``pack``):

    0 h_u   1 p_u   2 a   3 b   4 alpha_los   5 noise_los   6 bandwidth_rf
    7 lambda_g   8 r0   9 alpha_nlos   10 noise_nlos
"""
import math
import os
from types import SimpleNamespace

import numpy as np

LN2 = math.log(2.0)
N_INITIAL_PANELS = 16

# integrand selectors
PDF = 0
LOS_MASS = 1
LOS_GAIN = 2
RATE_LOW = 3

_DISABLED = os.environ.get("UAVFSO_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def pack(scenario, h_u, p_u=0.0):
    env, geom = scenario.env, scenario.geom
    return np.array([h_u, p_u, env.a, env.b, env.alpha_los, env.noise_los,
                     scenario.rf.bandwidth_rf, geom.lambda_g, geom.r0,
                     env.alpha_nlos, env.noise_nlos], dtype=np.float64)


def _integrand(mode, r, prm):
    h = prm[0]
    lam = prm[7]
    r0 = prm[8]
    pdf = np.exp(-np.pi * lam * (r0 * r0 - r * r)) * (2.0 * np.pi * lam * r)
    if mode == PDF:
        return pdf
    theta = (180.0 / np.pi) * np.arctan2(h, r)
    p_los = 1.0 / (1.0 + prm[2] * np.exp(-prm[3] * (theta - prm[2])))
    if mode == LOS_MASS:
        return p_los * pdf
    gain = (h * h + r * r) ** (-0.5 * prm[4])
    if mode == LOS_GAIN:
        return p_los * gain * pdf
    rate = prm[6] * np.log1p(prm[1] / prm[5] * gain) / LN2
    return p_los * rate * pdf


def _rates(r, prm):
    """(lower-bound rate, full average rate) at horizontal radius r."""
    h = prm[0]
    d2 = h * h + r * r
    theta = (180.0 / np.pi) * np.arctan2(h, r)
    p_los = 1.0 / (1.0 + prm[2] * np.exp(-prm[3] * (theta - prm[2])))
    low = p_los * prm[6] * np.log1p(prm[1] / prm[5] * d2 ** (-0.5 * prm[4])) / LN2
    nlos = (1.0 - p_los) * prm[6] * np.log1p(prm[1] / prm[10] * d2 ** (-0.5 * prm[9])) / LN2
    return low, low + nlos


# ---------------------------------------------------------------------------
# adaptive Simpson
#
# Both paths start from N_INITIAL_PANELS equal panels, take the absolute target
# as rtol * |coarse Simpson estimate| and accept a panel of width w once
# |S_left + S_right - S| <= 15 * target * w / (hi - lo).  Acceptance depends on
# the panel alone, so both paths converge to the same partition.
# Returns (value, error_estimate, n_panels, status); status 1 = panel budget hit.
# ---------------------------------------------------------------------------

def _make_simpson_dfs(f):
    def simpson(mode, prm, lo, hi, rtol, max_panels):
        n0 = N_INITIAL_PANELS
        width = hi - lo
        cap = max_panels + n0 + 2
        sa = np.empty(cap)
        sb = np.empty(cap)
        sfa = np.empty(cap)
        sfm = np.empty(cap)
        sfb = np.empty(cap)
        ss = np.empty(cap)
        top = 0
        coarse = 0.0
        for i in range(n0):
            a = lo + width * i / n0
            b = hi if i == n0 - 1 else lo + width * (i + 1) / n0
            fa = f(mode, a, prm)
            fm = f(mode, 0.5 * (a + b), prm)
            fb = f(mode, b, prm)
            s = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
            # reversed push so panels pop left to right
            j = n0 - 1 - i
            sa[j] = a
            sb[j] = b
            sfa[j] = fa
            sfm[j] = fm
            sfb[j] = fb
            ss[j] = s
            coarse += s
        top = n0
        scale = abs(coarse)
        if scale == 0.0:
            return 0.0, 0.0, n0, 0
        target = rtol * scale
        total = 0.0
        comp = 0.0
        err = 0.0
        panels = n0
        status = 0
        while top > 0:
            top -= 1
            a = sa[top]
            b = sb[top]
            fa = sfa[top]
            fm = sfm[top]
            fb = sfb[top]
            s = ss[top]
            m = 0.5 * (a + b)
            flm = f(mode, 0.5 * (a + m), prm)
            frm = f(mode, 0.5 * (m + b), prm)
            sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
            sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
            d = sl + sr - s
            ok = abs(d) <= 15.0 * target * (b - a) / width or not (a < 0.5 * (a + m) < m)
            if not ok and panels >= max_panels:
                ok = True
                status = 1
            if ok:
                piece = sl + sr + d / 15.0
                t = total + piece
                if abs(total) >= abs(piece):
                    comp += (total - t) + piece
                else:
                    comp += (piece - t) + total
                total = t
                err += abs(d) / 15.0
            else:
                panels += 1
                sa[top] = m
                sb[top] = b
                sfa[top] = fm
                sfm[top] = frm
                sfb[top] = fb
                ss[top] = sr
                top += 1
                sa[top] = a
                sb[top] = m
                sfa[top] = fa
                sfm[top] = flm
                sfb[top] = fm
                ss[top] = sl
                top += 1
        return total + comp, err, panels, status
    return simpson


def _simpson_bfs(mode, prm, lo, hi, rtol, max_panels):
    f = _integrand
    n0 = N_INITIAL_PANELS
    width = hi - lo
    idx = np.arange(n0, dtype=np.float64)
    a = lo + width * idx / n0
    b = lo + width * (idx + 1.0) / n0
    b[-1] = hi
    fa, fm, fb = f(mode, a, prm), f(mode, 0.5 * (a + b), prm), f(mode, b, prm)
    s = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = abs(math.fsum(s))
    if scale == 0.0:
        return 0.0, 0.0, n0, 0
    target = rtol * scale
    pieces, errs = [], []
    panels = n0
    status = 0
    while a.size:
        m = 0.5 * (a + b)
        flm = f(mode, 0.5 * (a + m), prm)
        frm = f(mode, 0.5 * (m + b), prm)
        sl = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        sr = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        d = sl + sr - s
        q = 0.5 * (a + m)
        ok = (np.abs(d) <= 15.0 * target * (b - a) / width) | ~((a < q) & (q < m))
        n_split = int(np.count_nonzero(~ok))
        if n_split and panels + n_split > max_panels:
            ok[:] = True
            status = 1
        pieces.append(sl[ok] + sr[ok] + d[ok] / 15.0)
        errs.append(np.abs(d[ok]) / 15.0)
        keep = ~ok
        panels += n_split
        a, m, b = a[keep], m[keep], b[keep]
        fa, fm, fb, flm, frm = fa[keep], fm[keep], fb[keep], flm[keep], frm[keep]
        sl, sr = sl[keep], sr[keep]
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        fa, fm, fb = np.concatenate([fa, fm]), np.concatenate([flm, frm]), np.concatenate([fm, fb])
        s = np.concatenate([sl, sr])
    return (math.fsum(np.concatenate(pieces)), math.fsum(np.concatenate(errs)),
            panels, status)


# ---------------------------------------------------------------------------
# Monte Carlo reductions
# ---------------------------------------------------------------------------

def _edge_radii_loop(counts, u, r0):
    out = np.empty(counts.size)
    pos = 0
    for i in range(counts.size):
        k = counts[i]
        if k == 0:
            out[i] = -1.0
            continue
        best = u[pos]
        for j in range(pos + 1, pos + k):
            if u[j] > best:
                best = u[j]
        out[i] = r0 * math.sqrt(best)
        pos += k
    return out


def _edge_radii_np(counts, u, r0):
    out = np.full(counts.size, -1.0)
    filled = counts > 0
    if np.any(filled):
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))[filled]
        out[filled] = r0 * np.sqrt(np.maximum.reduceat(u, starts))
    return out


def _make_rate_sums_loop(rates):
    def rate_sums(edge_r, prm):
        s_low = 0.0
        c_low = 0.0
        s_full = 0.0
        c_full = 0.0
        s_sq = 0.0
        c_sq = 0.0
        for i in range(edge_r.size):
            r = edge_r[i]
            if r < 0.0:
                continue
            low, full = rates(r, prm)
            sq = low * low
            t = s_sq + sq
            if abs(s_sq) >= abs(sq):
                c_sq += (s_sq - t) + sq
            else:
                c_sq += (sq - t) + s_sq
            s_sq = t
            t = s_low + low
            if abs(s_low) >= abs(low):
                c_low += (s_low - t) + low
            else:
                c_low += (low - t) + s_low
            s_low = t
            t = s_full + full
            if abs(s_full) >= abs(full):
                c_full += (s_full - t) + full
            else:
                c_full += (full - t) + s_full
            s_full = t
        return s_low + c_low, s_full + c_full, s_sq + c_sq
    return rate_sums


def _rate_sums_np(edge_r, prm):
    """Compensated sums of the lower-bound rate, the full rate and the squared lower-bound rate."""
    r = edge_r[edge_r >= 0.0]
    if r.size == 0:
        return 0.0, 0.0, 0.0
    low, full = _rates(r, prm)
    return math.fsum(low), math.fsum(full), math.fsum(low * low)


# ---------------------------------------------------------------------------
# exhaustive 4-D feasibility scan for the brute-force oracle
# ---------------------------------------------------------------------------

def _grid_scan_loop(p_f, rho, omega, c_edge, p_u, half_w, snr_scale, eta, p_hov, rtol):
    best = -1.0
    bi = np.full(4, -1, dtype=np.int64)
    for ih in range(omega.size):
        w = omega[ih]
        for ip in range(p_u.size):
            c = c_edge[ih, ip]
            need = p_hov + p_u[ip]
            for jf in range(p_f.size):
                pf = p_f[jf]
                for jr in range(rho.size):
                    r = rho[jr]
                    rate = half_w * math.log1p(pf * w * r / snr_scale) / LN2
                    if rate - c < -rtol * c:
                        continue
                    if eta * pf * w * (1.0 - r) - need < -rtol * need:
                        continue
                    ee = c / pf
                    if ee > best:
                        best = ee
                        bi[0] = ih
                        bi[1] = ip
                        bi[2] = jf
                        bi[3] = jr
    return best, bi


def _grid_scan_np(p_f, rho, omega, c_edge, p_u, half_w, snr_scale, eta, p_hov, rtol):
    w = omega[:, None, None, None]
    c = c_edge[:, :, None, None]
    pf = p_f[None, None, :, None]
    r = rho[None, None, None, :]
    need = (p_hov + p_u)[None, :, None, None]
    rate = half_w * np.log1p(pf * w * r / snr_scale) / LN2
    feasible = (rate - c >= -rtol * c) & (eta * pf * w * (1.0 - r) - need >= -rtol * need)
    ee = np.where(feasible, c / pf, -1.0)
    flat = int(np.argmax(ee))
    best = float(ee.reshape(-1)[flat])
    if best < 0.0:
        return -1.0, np.full(4, -1, dtype=np.int64)
    return best, np.array(np.unravel_index(flat, ee.shape), dtype=np.int64)


numpy_backend = SimpleNamespace(
    name="numpy",
    integrate=_simpson_bfs,
    edge_radii=_edge_radii_np,
    rate_sums=_rate_sums_np,
    grid_scan=_grid_scan_np,
)

if numba is not None:
    _jit = numba.njit(cache=True, nogil=True)
    _integrand_nb = _jit(_integrand)
    _rates_nb = _jit(_rates)
    numba_backend = SimpleNamespace(
        name="numba",
        integrate=_jit(_make_simpson_dfs(_integrand_nb)),
        edge_radii=_jit(_edge_radii_loop),
        rate_sums=_jit(_make_rate_sums_loop(_rates_nb)),
        grid_scan=_jit(_grid_scan_loop),
    )
else:  # pragma: no cover
    numba_backend = None

USE_NUMBA = numba_backend is not None and not _DISABLED
backend = numba_backend if USE_NUMBA else numpy_backend
