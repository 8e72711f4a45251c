"""Spectral multipliers phi(H): dense kernels and the transform-side route.

The continuum kernel is the frequency quadrature of phi(xi^2) against the
eigenfunction columns; the point kernel is a rank-K sum over bound states.
Applying the assembled kernel and multiplying in transform space are the
same finite triple sum in different orders, so the two routes are checked
against each other at rounding level rather than at quadrature level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DistwaveError, PreconditionError
from .grids import GridSpec
from .jost import EigenBasis
from .transform import _check_window_decay, adjoint, forward

_MIN_SUPPORT_NODES = 16


@dataclass(frozen=True, eq=False)
class Multiplier:
    """Continuous compactly supported function of the spectral parameter."""

    kind: str
    center: float
    radius: float
    table_x: NDArray[np.float64] | None = None
    table_v: NDArray[np.float64] | None = None

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.radius, self.center + self.radius

    def __call__(self, lam):
        arr = np.asarray(lam, dtype=float)
        if self.kind == "tent":
            out = np.maximum(0.0, 1.0 - np.abs(arr - self.center) / self.radius)
        elif self.kind == "smooth_bump":
            u = (arr - self.center) / self.radius
            out = np.zeros_like(arr)
            inside = np.abs(u) < 1.0
            ui = u[inside]
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
        elif self.kind == "sampled":
            out = np.interp(arr, self.table_x, self.table_v, left=0.0, right=0.0)
        else:
            raise PreconditionError(f"unknown multiplier kind {self.kind!r}")
        return float(out) if np.isscalar(lam) else out


def multiplier_preset(kind, center, radius, samples=None) -> Multiplier:
    """Build a tent, smooth_bump, or sampled multiplier.

    For ``sampled``, ``samples`` is an (xs, values) pair; the table must be
    strictly increasing in xs and vanish at both ends so the declared
    compact support is honest.
    """
    if kind in ("tent", "smooth_bump"):
        if not (np.isfinite(center) and np.isfinite(radius) and radius > 0):
            raise PreconditionError("multiplier needs finite center and radius > 0")
        return Multiplier(kind, float(center), float(radius))
    if kind == "sampled":
        if samples is None:
            raise PreconditionError("sampled multiplier needs a (xs, values) table")
        xs = np.asarray(samples[0], dtype=float)
        vs = np.asarray(samples[1], dtype=float)
        if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
            raise PreconditionError("multiplier table must be two equal 1-d arrays")
        if np.any(np.diff(xs) <= 0):
            raise PreconditionError("multiplier table xs must be strictly increasing")
        if vs[0] != 0.0 or vs[-1] != 0.0:
            raise PreconditionError("multiplier table must vanish at both ends")
        xs.setflags(write=False)
        vs.setflags(write=False)
        c = 0.5 * (xs[0] + xs[-1])
        return Multiplier("sampled", float(c), float(xs[-1] - c), xs, vs)
    raise PreconditionError(f"unknown multiplier kind {kind!r}")


@dataclass(frozen=True, eq=False)
class Kernel:
    """Dense integral kernel on a grid pair, with its application weights."""

    x_grid: GridSpec
    y_grid: GridSpec
    values: NDArray[np.complex128]
    parts: tuple[str, ...]
    quadrature_weights: NDArray[np.float64]


def _support_columns(basis: EigenBasis, phi: Multiplier):
    lo, hi = phi.support
    if lo <= 0.0:
        raise PreconditionError(
            f"multiplier support [{lo:g}, {hi:g}] touches the non-positive axis"
        )
    a, b = np.sqrt(lo), np.sqrt(hi)
    xi = basis.xi_grid
    xi_min = float(xi[xi > 0].min())
    xi_max = float(xi.max())
    if a <= xi_min or b >= xi_max:
        raise PreconditionError(
            f"support maps to [{a:g}, {b:g}] in frequency, outside the resolved "
            f"band ({xi_min:g}, {xi_max:g})"
        )
    cell = xi[1] - xi[0]
    bad = basis.exceptional_mask & (np.abs(xi) >= a - cell) & (np.abs(xi) <= b + cell)
    if np.any(bad):
        raise PreconditionError(
            "multiplier support is within one grid cell of a masked frequency"
        )
    n_pos = int(np.count_nonzero((xi >= a) & (xi <= b)))
    if n_pos < _MIN_SUPPORT_NODES:
        raise PreconditionError(
            f"only {n_pos} grid nodes across the multiplier support "
            f"(need {_MIN_SUPPORT_NODES}); refine the frequency grid"
        )
    phi_vals = phi(xi**2)
    phi_vals[basis.exceptional_mask] = 0.0
    return np.nonzero(phi_vals != 0.0)[0], phi_vals


def kernel_ac(basis: EigenBasis, phi: Multiplier) -> Kernel:
    """Continuum part: frequency quadrature of phi(xi^2) e(x,.) conj(e(y,.)).

    Raises:
        PreconditionError: support leaves the resolved frequency band, comes
            within a cell of a masked node, or spans fewer than 16 nodes.
    """
    cols, phi_vals = _support_columns(basis, phi)
    weights = basis.xi_weights
    e_sub = basis.values[:, cols]
    scaled = e_sub * (weights[cols] * phi_vals[cols])
    k = (scaled @ e_sub.conj().T) / (2.0 * np.pi)
    if not np.all(np.isfinite(k)):
        raise DistwaveError("non-finite entries in assembled kernel")
    k.setflags(write=False)
    return Kernel(basis.x_grid, basis.x_grid, k, ("ac",), basis.x_grid.weights)


def kernel_point(states, phi: Multiplier, grid: GridSpec) -> Kernel:
    """Point part: sum of phi(lambda_k) e_k(x) e_k(y) over bound states."""
    n = grid.n_points
    k = np.zeros((n, n), dtype=np.complex128)
    for st in states:
        if st.grid.n_points != n or st.grid.x_min != grid.x_min or st.grid.x_max != grid.x_max:
            raise PreconditionError("bound state tabulated on a different grid")
        w = phi(st.lam)
        if w != 0.0:
            k += w * np.outer(st.eigenfunction, st.eigenfunction)
    k.setflags(write=False)
    return Kernel(grid, grid, k, ("point",), grid.weights)


def kernel_total(basis: EigenBasis, states, phi: Multiplier) -> Kernel:
    """Assemble K = K_ac + K_p on the basis grid."""
    ac = kernel_ac(basis, phi)
    pt = kernel_point(states, phi, basis.x_grid)
    vals = ac.values + pt.values
    vals.setflags(write=False)
    return Kernel(ac.x_grid, ac.y_grid, vals, ("ac", "point"), ac.quadrature_weights)


def apply_spectral(kernel: Kernel, f) -> NDArray[np.complex128]:
    """Apply the kernel: out(x_i) = sum_j w_j K(x_i, y_j) f(y_j)."""
    f = np.asarray(f)
    if f.shape != (kernel.y_grid.n_points,):
        raise PreconditionError("f is not sampled on the kernel grid")
    _check_window_decay(f)
    out = kernel.values @ (kernel.quadrature_weights * f)
    out.setflags(write=False)
    return out


def apply_via_transform(basis: EigenBasis, states, phi: Multiplier, f):
    """Apply phi(H) by multiplying in transform space plus the point sum.

    Same triple sum as assembling the kernel and applying it, reordered, so
    the two agree to rounding (1e-8 is generous) rather than to quadrature
    accuracy.
    """
    f = np.asarray(f)
    tr = forward(f, basis)
    phi_vals = phi(basis.xi_grid**2)
    out = adjoint(phi_vals * tr.values, basis).copy()
    w = basis.x_grid.weights
    for st in states:
        wk = phi(st.lam)
        if wk != 0.0:
            out += wk * np.sum(w * st.eigenfunction * f) * st.eigenfunction
    out.setflags(write=False)
    return out
