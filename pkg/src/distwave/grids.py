"""Spatial and frequency grids plus the quadrature weights used everywhere.

All integrals in the package are trapezoidal sums on these grids, so the
discrete adjointness identities between the forward and adjoint transforms
hold to rounding error by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError


@dataclass(frozen=True)
class GridSpec:
    """Uniform spatial grid on [x_min, x_max] with n_points nodes.

    Endpoints are included; spacing is ``h = (x_max - x_min) / (n_points - 1)``.
    """

    x_min: float
    x_max: float
    n_points: int
    _xs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise PreconditionError("grid endpoints must be finite")
        if not self.x_max > self.x_min:
            raise PreconditionError("grid requires x_max > x_min")
        if self.n_points < 3:
            raise PreconditionError("grid requires at least 3 points")
        xs = np.linspace(self.x_min, self.x_max, self.n_points)
        xs.setflags(write=False)
        object.__setattr__(self, "_xs", xs)

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def xs(self) -> np.ndarray:
        """Node coordinates, read-only, shape (n_points,)."""
        return self._xs

    @property
    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights for the spatial grid."""
        return trapezoid_weights(self._xs)


def trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    """Trapezoidal weights for an ascending 1D node array.

    Works for non-uniform spacing; interior weight is half the span of the
    two adjacent cells.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 1 or nodes.size < 2:
        raise PreconditionError("need at least two quadrature nodes")
    w = np.empty_like(nodes)
    w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    w[0] = 0.5 * (nodes[1] - nodes[0])
    w[-1] = 0.5 * (nodes[-1] - nodes[-2])
    return w


def make_xi_grid(xi_max: float, n_xi: int) -> np.ndarray:
    """Symmetric uniform frequency grid excluding zero.

    Nodes sit at ``+-(m + 1/2) * dxi`` with ``dxi = 2 * xi_max / n_xi``, so the
    grid is uniform, symmetric about the origin, and never contains xi = 0.
    ``n_xi`` must be even and at least 2.
    """
    if n_xi < 2 or n_xi % 2 != 0:
        raise PreconditionError("n_xi must be an even number >= 2")
    if not (np.isfinite(xi_max) and xi_max > 0):
        raise PreconditionError("xi_max must be finite and positive")
    dxi = 2.0 * xi_max / n_xi
    # Mirror the positive half so xi[j] == -xi[n-1-j] holds exactly.
    pos = (np.arange(n_xi // 2) + 0.5) * dxi
    grid = np.concatenate((-pos[::-1], pos))
    grid.setflags(write=False)
    return grid
