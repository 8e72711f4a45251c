"""Compiled inner loops: potential evaluation and adaptive ODE integration.

Everything here solves the stationary equation

    -u''(x) + V(x) u(x) = ev * u(x)

rewritten as a first-order complex system and integrated with an adaptive
Cash-Karp 5(4) pair.  Integration always starts in a free region (beyond the
potential's support radius) where the solution has a closed form, and runs
inward; tails outside the support are filled analytically instead of being
integrated, which keeps the tabulated columns free of accumulated error.

All functions are compiled with numba unless the pure-numpy backend is
selected (see :mod:`distwave._backend`); the uncompiled versions execute the
same statements and agree to rounding error.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import njit_or_py

# Status codes returned by the integrators.
OK = 0
STEP_UNDERFLOW = 1
NON_FINITE = 2
STEP_BUDGET = 3

_MAX_STEPS = 2_000_000

# Cash-Karp 5(4) tableau.
_C2, _C3, _C4, _C5, _C6 = 0.2, 0.3, 0.6, 1.0, 0.875
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 0.3, -0.9, 1.2
_A51, _A52, _A53, _A54 = -11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0
_A61, _A62, _A63, _A64, _A65 = (
    1631.0 / 55296.0,
    175.0 / 512.0,
    575.0 / 13824.0,
    44275.0 / 110592.0,
    253.0 / 4096.0,
)
_B1, _B3, _B4, _B6 = 37.0 / 378.0, 250.0 / 621.0, 125.0 / 594.0, 512.0 / 1771.0
# Difference between the 5th- and 4th-order weights (error estimator).
_E1 = 37.0 / 378.0 - 2825.0 / 27648.0
_E3 = 250.0 / 621.0 - 18575.0 / 48384.0
_E4 = 125.0 / 594.0 - 13525.0 / 55296.0
_E5 = -277.0 / 14336.0
_E6 = 512.0 / 1771.0 - 0.25


@njit_or_py(cache=True)
def v_at(code, p0, p1, txs, tvs, x):
    """Scalar potential value; must mirror :func:`distwave.potentials.sample`."""
    if code == 0:
        return 0.0
    if code == 1:
        c = math.cosh(x / p1)
        return -p0 / (c * c)
    if code == 2:
        ax = abs(x)
        if ax < p1:
            return -p0
        if ax == p1:
            return -0.5 * p0
        return 0.0
    if code == 3:
        u = x / p1
        return -p0 * math.exp(-u * u)
    # sampled table, linear interpolation, zero outside
    m = txs.shape[0]
    if x < txs[0] or x > txs[m - 1]:
        return 0.0
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if txs[mid] <= x:
            lo = mid
        else:
            hi = mid
    t = (x - txs[lo]) / (txs[hi] - txs[lo])
    return tvs[lo] * (1.0 - t) + tvs[hi] * t


@njit_or_py(cache=True)
def _try_step(code, p0, p1, txs, tvs, ev, x, f, fp, h, atol, rtol):
    """One Cash-Karp attempt of size h; returns (f5, fp5, scaled error)."""
    k1f = fp
    k1p = (v_at(code, p0, p1, txs, tvs, x) - ev) * f

    yf = f + h * (_A21 * k1f)
    yp = fp + h * (_A21 * k1p)
    k2f = yp
    k2p = (v_at(code, p0, p1, txs, tvs, x + _C2 * h) - ev) * yf

    yf = f + h * (_A31 * k1f + _A32 * k2f)
    yp = fp + h * (_A31 * k1p + _A32 * k2p)
    k3f = yp
    k3p = (v_at(code, p0, p1, txs, tvs, x + _C3 * h) - ev) * yf

    yf = f + h * (_A41 * k1f + _A42 * k2f + _A43 * k3f)
    yp = fp + h * (_A41 * k1p + _A42 * k2p + _A43 * k3p)
    k4f = yp
    k4p = (v_at(code, p0, p1, txs, tvs, x + _C4 * h) - ev) * yf

    yf = f + h * (_A51 * k1f + _A52 * k2f + _A53 * k3f + _A54 * k4f)
    yp = fp + h * (_A51 * k1p + _A52 * k2p + _A53 * k3p + _A54 * k4p)
    k5f = yp
    k5p = (v_at(code, p0, p1, txs, tvs, x + _C5 * h) - ev) * yf

    yf = f + h * (_A61 * k1f + _A62 * k2f + _A63 * k3f + _A64 * k4f + _A65 * k5f)
    yp = fp + h * (_A61 * k1p + _A62 * k2p + _A63 * k3p + _A64 * k4p + _A65 * k5p)
    k6f = yp
    k6p = (v_at(code, p0, p1, txs, tvs, x + _C6 * h) - ev) * yf

    f5 = f + h * (_B1 * k1f + _B3 * k3f + _B4 * k4f + _B6 * k6f)
    fp5 = fp + h * (_B1 * k1p + _B3 * k3p + _B4 * k4p + _B6 * k6p)

    ef = h * (_E1 * k1f + _E3 * k3f + _E4 * k4f + _E5 * k5f + _E6 * k6f)
    ep = h * (_E1 * k1p + _E3 * k3p + _E4 * k4p + _E5 * k5p + _E6 * k6p)

    sf = atol + rtol * max(abs(f), abs(f5))
    sp = atol + rtol * max(abs(fp), abs(fp5))
    return f5, fp5, max(abs(ef) / sf, abs(ep) / sp)


@njit_or_py(cache=True)
def integrate_span(code, p0, p1, txs, tvs, ev, x0, x1, f0, fp0, atol, rtol, h_init):
    """Integrate from x0 to x1 (either direction).

    Returns (f, fp, last accepted |h|, status).  ``h_init <= 0`` picks a
    curvature-aware default first step.
    """
    f = f0
    fp = fp0
    if x1 == x0:
        return f, fp, h_init, OK
    span = abs(x1 - x0)
    sgn = 1.0 if x1 > x0 else -1.0
    h = h_init
    if h <= 0.0:
        h = 0.35 / (1.0 + math.sqrt(abs(ev)))
    if h > span:
        h = span
    x = x0
    nsteps = 0
    while sgn * (x1 - x) > 0.0:
        rem = x1 - x
        full = h >= abs(rem)
        hs = rem if full else sgn * h
        f5, fp5, err = _try_step(code, p0, p1, txs, tvs, ev, x, f, fp, hs, atol, rtol)
        nsteps += 1
        if nsteps > _MAX_STEPS:
            return f, fp, h, STEP_BUDGET
        if not (
            math.isfinite(f5.real)
            and math.isfinite(f5.imag)
            and math.isfinite(fp5.real)
            and math.isfinite(fp5.imag)
            and math.isfinite(err)
        ):
            return f, fp, h, NON_FINITE
        if err <= 1.0:
            x = x1 if full else x + hs
            f = f5
            fp = fp5
            fac = 5.0 if err < 1e-30 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            h = min(abs(hs) * fac, span)
        else:
            h = abs(hs) * max(0.2, 0.9 * err ** -0.2)
            if h < 1e-14 * (abs(x0) + abs(x1) + 1.0):
                return f, fp, h, STEP_UNDERFLOW
    return f, fp, h, OK


@njit_or_py(cache=True)
def integrate_to_nodes(
    code, p0, p1, txs, tvs, ev, x_nodes, i_from, i_to, f0, fp0, atol, rtol, out_f, out_fp
):
    """Integrate across grid nodes, recording the state at every node.

    The state (f0, fp0) is taken at ``x_nodes[i_from]``; integration proceeds
    toward ``i_to`` (inclusive, either direction) and lands on each node
    exactly.  Returns a status code.
    """
    out_f[i_from] = f0
    out_fp[i_from] = fp0
    if i_to == i_from:
        return OK
    step = 1 if i_to > i_from else -1
    f = f0
    fp = fp0
    h_last = -1.0
    i = i_from
    while i != i_to:
        j = i + step
        f, fp, h_last, status = integrate_span(
            code, p0, p1, txs, tvs, ev, x_nodes[i], x_nodes[j], f, fp, atol, rtol, h_last
        )
        if status != OK:
            return status
        out_f[j] = f
        out_fp[j] = fp
        i = j
    return OK


@njit_or_py(cache=True)
def jost_column(code, p0, p1, txs, tvs, xi, side, x_nodes, radius, atol, rtol, out_f, out_fp):
    """Tabulate one Jost solution over the whole grid.

    side=+1: solution ~ exp(+i xi x) as x -> +inf, integrated leftward.
    side=-1: solution ~ exp(-i xi x) as x -> -inf, integrated rightward.
    Outside the support radius the closed free form is used directly: the
    asymptotic exponential on the incoming side, a two-exponential match on
    the far side.
    """
    n = x_nodes.shape[0]
    ev = xi * xi
    ii = 1j * xi
    if side > 0:
        i_edge = n - 1
        while i_edge > 0 and x_nodes[i_edge - 1] >= radius:
            i_edge -= 1
        for i in range(i_edge, n):
            ph = np.exp(ii * x_nodes[i])
            out_f[i] = ph
            out_fp[i] = ii * ph
        if i_edge == 0:
            return OK
        i_lo = -1
        while i_lo + 1 < i_edge and x_nodes[i_lo + 1] <= -radius:
            i_lo += 1
        stop = i_lo if i_lo >= 0 else 0
        status = integrate_to_nodes(
            code, p0, p1, txs, tvs, ev, x_nodes, i_edge, stop,
            out_f[i_edge], out_fp[i_edge], atol, rtol, out_f, out_fp,
        )
        if status != OK:
            return status
        if i_lo >= 1:
            x0 = x_nodes[i_lo]
            a = 0.5 * (out_f[i_lo] + out_fp[i_lo] / ii)
            b = 0.5 * (out_f[i_lo] - out_fp[i_lo] / ii)
            for i in range(i_lo):
                ph = np.exp(ii * (x_nodes[i] - x0))
                out_f[i] = a * ph + b / ph
                out_fp[i] = ii * (a * ph - b / ph)
        return OK

    i_edge = 0
    while i_edge < n - 1 and x_nodes[i_edge + 1] <= -radius:
        i_edge += 1
    for i in range(i_edge + 1):
        ph = np.exp(-ii * x_nodes[i])
        out_f[i] = ph
        out_fp[i] = -ii * ph
    if i_edge == n - 1:
        return OK
    i_hi = n
    while i_hi - 1 > i_edge and x_nodes[i_hi - 1] >= radius:
        i_hi -= 1
    stop = i_hi if i_hi <= n - 1 else n - 1
    status = integrate_to_nodes(
        code, p0, p1, txs, tvs, ev, x_nodes, i_edge, stop,
        out_f[i_edge], out_fp[i_edge], atol, rtol, out_f, out_fp,
    )
    if status != OK:
        return status
    if i_hi <= n - 2:
        x0 = x_nodes[i_hi]
        a = 0.5 * (out_f[i_hi] + out_fp[i_hi] / ii)
        b = 0.5 * (out_f[i_hi] - out_fp[i_hi] / ii)
        for i in range(i_hi + 1, n):
            ph = np.exp(ii * (x_nodes[i] - x0))
            out_f[i] = a * ph + b / ph
            out_fp[i] = ii * (a * ph - b / ph)
    return OK


@njit_or_py(cache=True)
def shoot_match(code, p0, p1, txs, tvs, kappa, x_left, x_right, x_match, atol, rtol):
    """Matching Wronskian for a decaying-solution shot at energy -kappa**2.

    Integrates the left-decaying solution from x_left and the right-decaying
    solution from x_right to the common point x_match; both starts use the
    scale-free init (1, +-kappa).  Returns (wronskian, status); the Wronskian
    sign flips exactly at eigenvalues.
    """
    ev = -kappa * kappa
    fl, fpl, _, st1 = integrate_span(
        code, p0, p1, txs, tvs, ev, x_left, x_match,
        complex(1.0), complex(kappa), atol, rtol, -1.0,
    )
    if st1 != OK:
        return 0.0, st1
    fr, fpr, _, st2 = integrate_span(
        code, p0, p1, txs, tvs, ev, x_right, x_match,
        complex(1.0), complex(-kappa), atol, rtol, -1.0,
    )
    if st2 != OK:
        return 0.0, st2
    w = fl * fpr - fpl * fr
    return w.real, OK


@njit_or_py(cache=True)
def bound_half(code, p0, p1, txs, tvs, kappa, side, x_nodes, radius, i_match, atol, rtol, out_u, out_up):
    """Tabulate the decaying solution on one half of the grid.

    side=+1 covers [i_match, n-1] integrating from the right support edge;
    side=-1 covers [0, i_match] from the left edge.  Tail nodes beyond the
    support radius get the exact exponential.
    """
    n = x_nodes.shape[0]
    ev = -kappa * kappa
    if side > 0:
        i_edge = n - 1
        while i_edge > 0 and x_nodes[i_edge - 1] >= radius:
            i_edge -= 1
        if i_edge < i_match:
            i_edge = i_match
        xe = x_nodes[i_edge]
        for i in range(i_edge, n):
            u = math.exp(-kappa * (x_nodes[i] - xe))
            out_u[i] = u
            out_up[i] = -kappa * u
        if i_edge == i_match:
            return OK
        return integrate_to_nodes(
            code, p0, p1, txs, tvs, ev, x_nodes, i_edge, i_match,
            out_u[i_edge], out_up[i_edge], atol, rtol, out_u, out_up,
        )
    i_edge = 0
    while i_edge < n - 1 and x_nodes[i_edge + 1] <= -radius:
        i_edge += 1
    if i_edge > i_match:
        i_edge = i_match
    xe = x_nodes[i_edge]
    for i in range(i_edge + 1):
        u = math.exp(kappa * (x_nodes[i] - xe))
        out_u[i] = u
        out_up[i] = kappa * u
    if i_edge == i_match:
        return OK
    return integrate_to_nodes(
        code, p0, p1, txs, tvs, ev, x_nodes, i_edge, i_match,
        out_u[i_edge], out_up[i_edge], atol, rtol, out_u, out_up,
    )


@njit_or_py(cache=True)
def count_nodes_below(code, p0, p1, txs, tvs, energy, x_start, x_end, n_check, atol, rtol):
    """Sturm oscillation count: zeros of the left-decaying solution at ``energy``.

    The number of sign changes over [x_start, x_end] equals the number of
    eigenvalues below ``energy``, except for a possible last zero beyond
    x_end; the returned terminal state lets the caller decide that from the
    two-exponential split.  Returns (count, u_end, du_end, status).
    """
    kappa = math.sqrt(-energy) if energy < 0.0 else 0.0
    f = complex(1.0)
    fp = complex(kappa)
    x = x_start
    dx = (x_end - x_start) / n_check
    count = 0
    prev = f.real
    h_last = -1.0
    for k in range(n_check):
        xn = x_start + (k + 1) * dx
        f, fp, h_last, status = integrate_span(
            code, p0, p1, txs, tvs, energy, x, xn, f, fp, atol, rtol, h_last
        )
        if status != OK:
            return count, f.real, fp.real, status
        cur = f.real
        if prev == 0.0:
            prev = cur
        elif cur != 0.0 and (cur > 0.0) != (prev > 0.0):
            count += 1
            prev = cur
        else:
            prev = cur if cur != 0.0 else prev
        x = xn
    return count, f.real, fp.real, OK
