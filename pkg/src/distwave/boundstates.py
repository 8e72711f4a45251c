"""Point spectrum: eigenvalues below zero and their normalized eigenfunctions.

Eigenvalues are located by two-sided shooting at trial energy -kappa**2: the
left- and right-decaying solutions are integrated to a common matching node
and their Wronskian, a smooth function of kappa that changes sign exactly at
eigenvalues, is bracketed and bisected.  A Sturm oscillation count fixes the
number of states in advance, and the dense oracle supplies rescue brackets
if the scan misses one, so the returned list is provably complete for the
discretized problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from . import _integrate as _ik
from .errors import DistwaveError, IntegrationError, PreconditionError
from .grids import GridSpec
from .jost import ATOL, RTOL, _require_window, _STATUS_TEXT
from .potentials import Potential, sample

# Eigenvalues in (-LAMBDA_FLOOR, 0) are treated as absent: threshold
# resonances are excluded just like xi = 0 is excluded from the grid.
LAMBDA_FLOOR = 1e-8

# Boundary magnitude (relative to the peak) above which the window is
# declared too narrow for the eigenfunction's tails.
_TAIL_TOL = 1e-5

_GAP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BoundState:
    """Eigenpair (lam, eigenfunction) with quadrature-normalized values.

    ``norm_defect`` estimates the L2 mass of the exponential tails lying
    outside the window, i.e. how far the grid normalization is from the
    whole-line one.
    """

    lam: float
    eigenfunction: NDArray[np.float64]
    norm_defect: float
    grid: GridSpec


def _shoot_wronskian(kargs, kappa, radius, x_match, atol, rtol):
    w, status = _ik.shoot_match(*kargs, kappa, -radius, radius, x_match, atol, rtol)
    if status != _ik.OK:
        raise IntegrationError(
            f"shooting failed at kappa={kappa:g}: {_STATUS_TEXT[status]}"
        )
    return w


def _expected_count(kargs, radius, depth, atol, rtol):
    n_check = 32 + 4 * int(math.ceil(2.0 * radius * math.sqrt(depth)))
    count, u_end, du_end, status = _ik.count_nodes_below(
        *kargs, -LAMBDA_FLOOR, -radius, radius, n_check, atol, rtol
    )
    if status != _ik.OK:
        raise IntegrationError(f"oscillation count failed: {_STATUS_TEXT[status]}")
    # One more zero occurs beyond the window iff the growing component has
    # the opposite sign of the current value.
    kappa0 = math.sqrt(LAMBDA_FLOOR)
    if u_end * (u_end + du_end / kappa0) < 0.0:
        count += 1
    return count


def _dedupe(roots):
    roots = sorted(roots)
    out = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-7 * max(1.0, r):
            out.append(r)
    return out


def _scan_roots(w_of, lo, hi, n_scan):
    ks = np.linspace(lo, hi, n_scan)
    ws = [w_of(k) for k in ks]
    roots = []
    for a, b, wa, wb in zip(ks[:-1], ks[1:], ws[:-1], ws[1:]):
        if wa == 0.0:
            roots.append(float(a))
        elif wa * wb < 0.0:
            roots.append(brentq(w_of, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps))
    if ws[-1] == 0.0:
        roots.append(float(ks[-1]))
    return _dedupe(roots)


def _check_gaps(lams):
    for a, b in zip(lams[:-1], lams[1:]):
        if abs(b - a) < _GAP_TOL:
            raise DistwaveError(
                f"near-degenerate eigenvalues {a:.12g} and {b:.12g}; "
                "1D bound states should be simple"
            )


def find_bound_states(pot: Potential, grid: GridSpec, atol=ATOL, rtol=RTOL) -> tuple[BoundState, ...]:
    """All eigenvalues below -LAMBDA_FLOOR with normalized eigenfunctions.

    Returns states sorted by ascending eigenvalue.  The count is checked
    against a Sturm oscillation count (with dense-oracle rescue brackets),
    and eigenfunction tails must have decayed at the window edge.
    """
    radius = pot.support_radius
    if radius == 0.0:
        return ()
    probe_grid = GridSpec(-radius, radius, 4097)
    probe = sample(pot, probe_grid)
    depth = max(0.0, -float(probe.min()))
    if depth <= LAMBDA_FLOOR:
        return ()
    _require_window(pot, grid)
    kargs = pot.kernel_args()

    # Match at the deepest sampled point, snapped to a grid node.
    x_deep = float(probe_grid.xs[int(np.argmin(probe))])
    i_match = int(round((x_deep - grid.x_min) / grid.h))
    i_match = min(max(i_match, 1), grid.n_points - 2)
    x_match = float(grid.xs[i_match])

    def w_of(kappa):
        return _shoot_wronskian(kargs, float(kappa), radius, x_match, atol, rtol)

    expected = _expected_count(kargs, radius, depth, atol, rtol)
    lo = math.sqrt(LAMBDA_FLOOR)
    hi = math.sqrt(depth)
    n_scan = max(64, 16 * expected)
    roots: list[float] = []
    for _ in range(5):
        roots = _scan_roots(w_of, lo, hi, n_scan)
        if len(roots) >= expected:
            break
        n_scan *= 2
    if len(roots) < expected:
        roots = _oracle_rescue(pot, grid, w_of, roots, lo, hi)
    if len(roots) != expected:
        raise IntegrationError(
            f"bound-state search found {len(roots)} of {expected} states"
        )
    _check_gaps([-k * k for k in sorted(roots, reverse=True)])

    states = [
        _assemble_state(pot, grid, kargs, kappa, i_match, atol, rtol)
        for kappa in sorted(roots, reverse=True)
    ]
    return tuple(states)


def _oracle_rescue(pot, grid, w_of, roots, lo, hi):
    from .oracle import discretize

    hd = discretize(pot, grid)
    neg = np.sort(hd.eigenvalues[hd.eigenvalues < -LAMBDA_FLOOR])
    _check_gaps(list(neg))
    merged = list(roots)
    for lam in neg:
        kc = math.sqrt(-float(lam))
        if any(abs(kc - r) < 1e-5 * max(1.0, kc) for r in merged):
            continue
        pad = max(0.05 * kc, 1e-3)
        a, b = max(lo, kc - pad), min(hi, kc + pad)
        if a >= b:
            continue
        wa, wb = w_of(a), w_of(b)
        if wa == 0.0:
            merged.append(a)
        elif wa * wb < 0.0:
            merged.append(brentq(w_of, a, b, xtol=1e-13, rtol=4 * np.finfo(float).eps))
    return _dedupe(merged)


def _assemble_state(pot, grid, kargs, kappa, i_match, atol, rtol):
    n = grid.n_points
    radius = pot.support_radius
    ul = np.empty(n, dtype=np.complex128)
    uld = np.empty(n, dtype=np.complex128)
    ur = np.empty(n, dtype=np.complex128)
    urd = np.empty(n, dtype=np.complex128)
    for side, buf, bufd in ((-1, ul, uld), (+1, ur, urd)):
        status = _ik.bound_half(
            *kargs, kappa, side, grid.xs, radius, i_match, atol, rtol, buf, bufd
        )
        if status != _ik.OK:
            raise IntegrationError(
                f"eigenfunction tabulation failed at kappa={kappa:g}: "
                f"{_STATUS_TEXT[status]}"
            )
    # Least-squares glue: at an eigenvalue (value, slope) of the two halves
    # are parallel, so this stays stable even when the match node is near a
    # zero of the eigenfunction.
    a, ad = ul[i_match].real, uld[i_match].real
    b, bd = ur[i_match].real, urd[i_match].real
    scale = (a * b + ad * bd) / (b * b + bd * bd)
    u = np.empty(n, dtype=float)
    u[:i_match] = ul[:i_match].real
    u[i_match:] = scale * ur[i_match:].real
    norm = math.sqrt(float(np.sum(grid.weights * u * u)))
    if not (math.isfinite(norm) and norm > 0.0):
        raise IntegrationError(f"degenerate eigenfunction normalization at kappa={kappa:g}")
    u /= norm
    if u[int(np.argmax(np.abs(u)))] < 0.0:
        u = -u
    peak = float(np.abs(u).max())
    edge = max(abs(u[0]), abs(u[-1]))
    if edge > _TAIL_TOL * peak:
        raise PreconditionError(
            f"window too narrow for the eigenvalue {-kappa * kappa:.6g}: "
            f"boundary amplitude {edge:.2e} vs peak {peak:.2e}"
        )
    norm_defect = float((u[0] ** 2 + u[-1] ** 2) / (2.0 * kappa))
    u.setflags(write=False)
    return BoundState(-kappa * kappa, u, norm_defect, grid)


def point_projection(states, f):
    """Projection onto the span of the bound states, sum_k <f, e_k> e_k."""
    f = np.asarray(f)
    if f.ndim != 1:
        raise PreconditionError("point_projection expects a 1D sample vector")
    out_dtype = np.result_type(f.dtype, np.float64)
    if not states:
        return np.zeros(f.shape[0], dtype=out_dtype)
    grid = states[0].grid
    if f.shape[0] != grid.n_points:
        raise PreconditionError("sample vector does not match the states' grid")
    if any(st.grid != grid for st in states):
        raise PreconditionError("bound states come from different grids")
    w = grid.weights
    out = np.zeros(grid.n_points, dtype=out_dtype)
    for st in states:
        out += np.sum(w * st.eigenfunction * f) * st.eigenfunction
    return out
