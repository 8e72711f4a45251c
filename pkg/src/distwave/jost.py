"""Jost solutions, scattering coefficients, and distorted plane waves.

A Jost solution at frequency ``xi`` solves ``-f'' + V f = xi**2 f`` and is
asymptotic to ``exp(+i xi x)`` as ``x -> +inf`` (side ``+1``) or to
``exp(-i xi x)`` as ``x -> -inf`` (side ``-1``).  Each solution is integrated
inward from its own free region, the direction in which it is the recessive
data, so the tabulated values are never contaminated by the growing
companion solution.

The generalized eigenfunction ``e(x, xi)`` is the transmission-normalized
combination: ``T(xi) f_plus`` for ``xi > 0`` and ``T(|xi|) f_minus`` for
``xi < 0``.  With this normalization everything degenerates to the classical
Fourier setup at V = 0: ``e(x, xi) = exp(i xi x)``, ``T = 1``, ``R = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import _integrate as _ik
from .errors import ExceptionalFrequencyError, IntegrationError, PreconditionError
from .grids import GridSpec, make_xi_grid, trapezoid_weights
from .potentials import Potential, sample

# Integrator tolerances; the documented tolerances below sit one to two
# orders above these.
ATOL = 1e-11
RTOL = 1e-11

RESIDUAL_TOL = 1e-7
UNITARITY_TOL = 1e-6
WRONSKIAN_TOL = 1e-6

_STATUS_TEXT = {
    _ik.STEP_UNDERFLOW: "step size underflow",
    _ik.NON_FINITE: "non-finite values",
    _ik.STEP_BUDGET: "step budget exhausted",
}

# Eighth-order centered second-derivative stencil (times 5040 h**2).
_D2_9 = np.array(
    [-9.0, 128.0, -1008.0, 8064.0, -14350.0, 8064.0, -1008.0, 128.0, -9.0]
) / 5040.0


@dataclass(frozen=True, eq=False)
class JostSolution:
    """One tabulated Jost solution.

    ``ode_residual`` is the max over clean interior nodes of
    ``|-f'' + (V - xi**2) f|`` with ``f''`` from the eighth-order centered
    stencil; stencils that straddle a discontinuity of V are excluded.
    """

    side: int
    xi: float
    values: NDArray[np.complex128]
    derivative_values: NDArray[np.complex128]
    ode_residual: float


@dataclass(frozen=True)
class ScatteringData:
    """Transmission/reflection pair and the Wronskian they came from."""

    xi: float
    t_coeff: complex
    r_coeff: complex
    wronskian: complex


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Distorted plane waves e(x, xi) tabulated on an x-by-xi lattice.

    Columns whose Wronskian falls below the exceptional threshold are zeroed
    and flagged in ``exceptional_mask``; their scattering entries carry the
    Wronskian but NaN coefficients.  ``sup_bound`` is the empirical sup of
    |e| over unmasked columns.
    """

    x_grid: GridSpec
    xi_grid: NDArray[np.float64]
    values: NDArray[np.complex128]
    scattering: tuple[ScatteringData, ...]
    exceptional_mask: NDArray[np.bool_]
    sup_bound: float
    potential: Potential

    @property
    def xi_weights(self) -> NDArray[np.float64]:
        """Trapezoidal quadrature weights on the frequency grid."""
        return trapezoid_weights(self.xi_grid)


def _require_window(pot: Potential, grid: GridSpec) -> None:
    if grid.n_points < 9:
        raise PreconditionError("grid too coarse: need at least 9 points")
    if grid.x_max < pot.support_radius or -grid.x_min < pot.support_radius:
        raise PreconditionError(
            f"grid [{grid.x_min:g}, {grid.x_max:g}] does not cover the "
            f"support radius {pot.support_radius:g}"
        )


def _normal_side(side) -> int:
    if side in (1, -1):
        return int(side)
    if side in ("+", "plus"):
        return 1
    if side in ("-", "minus"):
        return -1
    raise PreconditionError(f"side must be +1 or -1, got {side!r}")


def _jost_arrays(pot, grid, xi, side, atol, rtol):
    code, p0, p1, txs, tvs = pot.kernel_args()
    if code == 0:
        # Free case: the asymptotic exponential is the exact solution.
        ph = np.exp(1j * xi * side * grid.xs)
        return ph, 1j * xi * side * ph
    f = np.empty(grid.n_points, dtype=np.complex128)
    fd = np.empty(grid.n_points, dtype=np.complex128)
    status = _ik.jost_column(
        code, p0, p1, txs, tvs, float(xi), side, grid.xs,
        pot.support_radius, atol, rtol, f, fd,
    )
    if status != _ik.OK:
        raise IntegrationError(
            f"Jost solve failed at xi={xi:g} (side {side:+d}): {_STATUS_TEXT[status]}"
        )
    return f, fd


def _second_derivative(values, h):
    n = values.shape[0]
    acc = _D2_9[0] * values[0 : n - 8]
    for k in range(1, 9):
        acc = acc + _D2_9[k] * values[k : n - 8 + k]
    return acc / (h * h)


def _clean_rows(grid: GridSpec, jump_points) -> NDArray[np.bool_]:
    xs = grid.xs[4:-4]
    keep = np.ones(xs.size, dtype=bool)
    for x0 in jump_points:
        # A stencil is contaminated only when the jump lies strictly inside
        # its span; 3.5 h keeps the |x - x0| = 4 h rows and absorbs float fuzz.
        keep &= np.abs(xs - x0) > 3.5 * grid.h
    return keep


def max_ode_residual(values, potential_values, eigenvalue, grid, jump_points=()):
    """Max of ``|-f'' + (V - ev) f|`` over clean interior nodes.

    ``values`` may be a vector or an (n_x, n_cols) matrix with ``eigenvalue``
    then a vector of per-column values; the return matches (scalar or
    per-column vector).  Falls back to all interior rows if the jump
    exclusions would leave nothing.
    """
    d2 = _second_derivative(values, grid.h)
    mid = values[4:-4]
    q = potential_values[4:-4]
    if values.ndim == 2:
        resid = np.abs(-d2 + (q[:, None] - np.atleast_1d(eigenvalue)[None, :]) * mid)
    else:
        resid = np.abs(-d2 + (q - eigenvalue) * mid)
    keep = _clean_rows(grid, jump_points)
    if keep.any():
        resid = resid[keep]
    peak = resid.max(axis=0)
    return peak if values.ndim == 2 else float(peak)


def solve_jost(pot: Potential, xi: float, grid: GridSpec, side, atol=ATOL, rtol=RTOL) -> JostSolution:
    """Integrate one Jost solution across the grid.

    Raises:
        PreconditionError: xi == 0, or the grid does not cover the support.
        IntegrationError: adaptive stepping failed (stiff or invalid input).
    """
    side = _normal_side(side)
    xi = float(xi)
    if not math.isfinite(xi) or xi == 0.0:
        raise PreconditionError("xi must be finite and nonzero")
    _require_window(pot, grid)
    f, fd = _jost_arrays(pot, grid, xi, side, atol, rtol)
    res = max_ode_residual(f, sample(pot, grid), xi * xi, grid, pot.jump_points)
    f.setflags(write=False)
    fd.setflags(write=False)
    return JostSolution(side, xi, f, fd, res)


def _wronskian_pair(fm, fmd, fp, fpd, ic):
    # Orientation W(f-, f+) = f- f+' - f-' f+ so that T = 2i xi / W is 1 at V=0.
    return fm[ic] * fpd[ic] - fmd[ic] * fp[ic]


def _left_reflection(fm, fmd, fp, fpd, ic, w):
    # R = W(f+, conj f-) / W(f-, f+): coefficient of exp(-i xi x) at x -> -inf.
    return (fp[ic] * np.conj(fmd[ic]) - fpd[ic] * np.conj(fm[ic])) / w


def _right_reflection(fm, fmd, fp, fpd, ic, w):
    # Mirror image: coefficient of exp(+i xi x) at x -> +inf for the wave
    # incident from the right.
    return (np.conj(fp[ic]) * fmd[ic] - np.conj(fpd[ic]) * fm[ic]) / w


def scattering_coefficients(
    fp: JostSolution, fm: JostSolution, wronskian_tol: float = WRONSKIAN_TOL
) -> ScatteringData:
    """Wronskian reduction of a (+, -) Jost pair at common xi.

    Raises:
        ExceptionalFrequencyError: |W| below ``wronskian_tol * max(1, |xi|)``;
            the caller is expected to mask this frequency.
    """
    if fp.side != 1 or fm.side != -1:
        raise PreconditionError("need fp from side +1 and fm from side -1")
    if fp.xi != fm.xi or fp.xi == 0.0:
        raise PreconditionError("Jost pair must share one nonzero frequency")
    if fp.values.shape != fm.values.shape:
        raise PreconditionError("Jost pair tabulated on different grids")
    xi = fp.xi
    ic = fp.values.shape[0] // 2
    w = _wronskian_pair(fm.values, fm.derivative_values, fp.values, fp.derivative_values, ic)
    if abs(w) < wronskian_tol * max(1.0, abs(xi)):
        raise ExceptionalFrequencyError(
            f"xi={xi:g} is exceptional: |W|={abs(w):.3e} below threshold"
        )
    t = 2j * xi / w
    r = _left_reflection(fm.values, fm.derivative_values, fp.values, fp.derivative_values, ic, w)
    return ScatteringData(xi, complex(t), complex(r), complex(w))


def generalized_eigenfunction(pot: Potential, xi: float, grid: GridSpec, atol=ATOL, rtol=RTOL):
    """Distorted plane wave e(x, xi), transmission normalized.

    For xi > 0 the wave is incident from the left: T exp(i xi x) as
    x -> +inf, exp(i xi x) + R exp(-i xi x) as x -> -inf; mirrored for
    xi < 0.  Exceptional frequencies propagate as errors.
    """
    xi = float(xi)
    if not math.isfinite(xi) or xi == 0.0:
        raise PreconditionError("xi must be finite and nonzero")
    k = abs(xi)
    fp = solve_jost(pot, k, grid, +1, atol, rtol)
    fm = solve_jost(pot, k, grid, -1, atol, rtol)
    data = scattering_coefficients(fp, fm)
    e = data.t_coeff * (fp.values if xi > 0 else fm.values)
    e.setflags(write=False)
    return e


def build_eigenbasis(
    pot: Potential,
    grid: GridSpec,
    xi_max: float,
    n_xi: int,
    wronskian_tol: float = WRONSKIAN_TOL,
    atol: float = ATOL,
    rtol: float = RTOL,
) -> EigenBasis:
    """Tabulate e(x, xi) on the symmetric frequency grid.

    One Jost pair per |xi| serves both signs of the frequency.  Columns with
    a sub-threshold Wronskian are masked (zero values, NaN coefficients).
    """
    _require_window(pot, grid)
    xi_grid = make_xi_grid(xi_max, n_xi)
    n = grid.n_points
    half = n_xi // 2
    ic = n // 2
    values = np.zeros((n, n_xi), dtype=np.complex128)
    mask = np.zeros(n_xi, dtype=bool)
    scattering: list[ScatteringData | None] = [None] * n_xi
    for m in range(half):
        k = float(xi_grid[half + m])
        jp = half + m
        jm = half - 1 - m
        fp, fpd = _jost_arrays(pot, grid, k, +1, atol, rtol)
        fm, fmd = _jost_arrays(pot, grid, k, -1, atol, rtol)
        w = _wronskian_pair(fm, fmd, fp, fpd, ic)
        if abs(w) < wronskian_tol * max(1.0, k):
            mask[jp] = mask[jm] = True
            nanc = complex(np.nan, np.nan)
            scattering[jp] = ScatteringData(k, nanc, nanc, complex(w))
            scattering[jm] = ScatteringData(-k, nanc, nanc, complex(w))
            continue
        t = 2j * k / w
        values[:, jp] = t * fp
        values[:, jm] = t * fm
        r_l = _left_reflection(fm, fmd, fp, fpd, ic, w)
        r_r = _right_reflection(fm, fmd, fp, fpd, ic, w)
        scattering[jp] = ScatteringData(k, complex(t), complex(r_l), complex(w))
        scattering[jm] = ScatteringData(-k, complex(t), complex(r_r), complex(w))
    if mask.all():
        raise PreconditionError("every frequency column is masked; basis is empty")
    sup_bound = float(np.abs(values[:, ~mask]).max())
    values.setflags(write=False)
    mask.setflags(write=False)
    return EigenBasis(grid, xi_grid, values, tuple(scattering), mask, sup_bound, pot)


def ode_residuals(basis: EigenBasis) -> NDArray[np.float64]:
    """Per-column residual of the tabulated eigenfunctions; NaN where masked."""
    vs = sample(basis.potential, basis.x_grid)
    res = max_ode_residual(
        basis.values, vs, basis.xi_grid**2, basis.x_grid, basis.potential.jump_points
    )
    res = np.asarray(res, dtype=float)
    res[basis.exceptional_mask] = np.nan
    return res
