"""The distorted transform, its adjoint, and the identity-defect functionals.

Both directions are plain trapezoidal sums against the tabulated basis, so
the discrete adjointness <Ff, g> = <f, F*g> holds to rounding error by
construction.  Truncation quality is a caller obligation enforced as decay
preconditions: the input must be negligible at the window edge, and the
transform must be negligible at the frequency cutoff.

The roundtrip defects are computed with unguarded internal sums: the
intermediate vectors are whatever the discrete composition produces - their
imperfect decay is part of what the defect measures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .boundstates import point_projection
from .errors import PreconditionError
from .jost import EigenBasis
from .potentials import sample

# The l.i.m. window is declared converged when the boundary samples are this
# small relative to the peak.
X_DECAY_REL = 1e-8
# The frequency guard is on mass, not amplitude: transforms against a
# distorted basis inherit an O(1/xi) Born tail from the potential (O(1/xi^2)
# when V jumps), so pointwise decay to rounding level never happens. The
# outermost quadrature cells may carry at most this fraction of the total.
XI_TAIL_MASS_REL = 1e-5

_C = 1.0 / np.sqrt(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class TransformResult:
    """Transform values on the frequency grid; masked nodes carry zeros."""

    xi_grid: NDArray[np.float64]
    values: NDArray[np.complex128]
    mask: NDArray[np.bool_]
    window: float


def _as_samples(f, n, what):
    f = np.asarray(f)
    if f.shape != (n,):
        raise PreconditionError(f"{what} must be a vector of length {n}")
    return f


def _check_window_decay(f):
    peak = float(np.abs(f).max())
    edge = float(max(abs(f[0]), abs(f[-1])))
    if peak > 0.0 and edge > X_DECAY_REL * peak:
        raise PreconditionError(
            f"input not decayed at the window edge: boundary {edge:.2e} vs "
            f"peak {peak:.2e}; widen the grid"
        )


def _forward_raw(basis, f):
    w = basis.x_grid.weights
    vals = _C * (basis.values.conj().T @ (w * f))
    vals[basis.exceptional_mask] = 0.0
    return vals


def _adjoint_raw(basis, g):
    u = np.where(basis.exceptional_mask, 0.0, basis.xi_weights)
    return _C * (basis.values @ (u * g))


def forward(f, basis: EigenBasis) -> TransformResult:
    """Transform f against the basis columns (trapezoidal l.i.m. window).

    Raises:
        PreconditionError: f not on the basis grid, or not decayed at the
            window edge.
    """
    f = _as_samples(f, basis.x_grid.n_points, "f")
    _check_window_decay(f)
    vals = _forward_raw(basis, f)
    vals.setflags(write=False)
    window = float(max(abs(basis.x_grid.x_min), abs(basis.x_grid.x_max)))
    return TransformResult(basis.xi_grid, vals, basis.exceptional_mask, window)


def adjoint(g, basis: EigenBasis):
    """Adjoint transform back to the spatial grid, skipping masked nodes.

    ``g`` may be a :class:`TransformResult` or a plain vector on
    ``basis.xi_grid``.
    """
    if isinstance(g, TransformResult):
        if g.xi_grid.shape != basis.xi_grid.shape or not np.array_equal(
            g.xi_grid, basis.xi_grid
        ):
            raise PreconditionError("transform grid does not match the basis")
        gv = g.values
    else:
        gv = _as_samples(g, basis.xi_grid.shape[0], "g")
    out = _adjoint_raw(basis, gv.astype(np.complex128, copy=False))
    out.setflags(write=False)
    return out


def _check_frequency_decay(tr, u):
    total = float(np.sum(u * np.abs(tr.values) ** 2))
    if total == 0.0:
        return
    tail = float(u[0] * abs(tr.values[0]) ** 2 + u[-1] * abs(tr.values[-1]) ** 2)
    if tail > XI_TAIL_MASS_REL * total:
        raise PreconditionError(
            f"frequency window not converged: boundary cells carry "
            f"{tail / total:.2e} of the transform mass; raise xi_max"
        )


def plancherel_defect(f, basis: EigenBasis, states) -> float:
    """| ||f - P_p f||^2 - ||Ff||^2 | / ||f||^2 on the grid quadratures."""
    f = _as_samples(f, basis.x_grid.n_points, "f")
    tr = forward(f, basis)
    w = basis.x_grid.weights
    u = basis.xi_weights
    _check_frequency_decay(tr, u)
    f_ac = f - point_projection(states, f)
    denom = float(np.sum(w * np.abs(f) ** 2))
    if denom == 0.0:
        return 0.0
    lhs = float(np.sum(w * np.abs(f_ac) ** 2))
    rhs = float(np.sum(u * np.abs(tr.values) ** 2))
    return abs(lhs - rhs) / denom


def roundtrip_defect(basis: EigenBasis, states, f) -> tuple[float, float]:
    """Defects of F F* = Id (at g = Ff) and F* F = Id - P_p, both relative L2."""
    f = _as_samples(f, basis.x_grid.n_points, "f")
    tr = forward(f, basis)
    w = basis.x_grid.weights
    u = basis.xi_weights
    y = _adjoint_raw(basis, tr.values)
    g_back = _forward_raw(basis, y)
    norm_g = float(np.sqrt(np.sum(u * np.abs(tr.values) ** 2)))
    if norm_g == 0.0:
        d_ffstar = 0.0
    else:
        d_ffstar = float(np.sqrt(np.sum(u * np.abs(g_back - tr.values) ** 2))) / norm_g
    f_ac = f - point_projection(states, f)
    norm_f = float(np.sqrt(np.sum(w * np.abs(f) ** 2)))
    if norm_f == 0.0:
        return 0.0, 0.0
    d_fstarf = float(np.sqrt(np.sum(w * np.abs(y - f_ac) ** 2))) / norm_f
    return d_ffstar, d_fstarf


def intertwining_defect(f, basis: EigenBasis) -> float:
    """|| (Hf)~ - xi^2 f~ || / || xi^2 f~ || with H applied by differencing.

    The Laplacian is the fourth-order 5-point stencil on the interior, one
    order better than the quadrature error it sits next to; the outermost
    nodes fall back to the 3-point stencil (f is required to have decayed
    there anyway).
    """
    f = _as_samples(f, basis.x_grid.n_points, "f")
    grid = basis.x_grid
    vs = sample(basis.potential, grid)
    hf = -_laplacian(f.astype(np.complex128, copy=False), grid.h) + vs * f
    tr_f = forward(f, basis)
    tr_hf = forward(hf, basis)
    u = basis.xi_weights
    xi2 = basis.xi_grid**2
    ref = xi2 * tr_f.values
    denom = float(np.sqrt(np.sum(u * np.abs(ref) ** 2)))
    if denom == 0.0:
        return 0.0
    return float(np.sqrt(np.sum(u * np.abs(tr_hf.values - ref) ** 2))) / denom


def _laplacian(f, h):
    d2 = np.zeros_like(f)
    d2[2:-2] = (
        -f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]
    ) / (12.0 * h * h)
    d2[1] = (f[0] - 2.0 * f[1] + f[2]) / (h * h)
    d2[-2] = (f[-3] - 2.0 * f[-2] + f[-1]) / (h * h)
    return d2
