"""Real-valued potentials with certified decay.

Every potential carries its L1/L2 norms and a support radius beyond which
``|V(x)|`` stays below :data:`TRUNCATION_TOL`.  Solvers use the radius to
decide where the free-region (plane wave / pure exponential) form of a
solution may be used exactly.

Presets
-------
``zero``
    V = 0.
``sech2``
    V(x) = -c / cosh(x / w)**2 with params (c, w).
``square_well``
    V(x) = -d on (-a, a) with params (d, a); the value at |x| = a is -d/2
    so node-aligned quadrature and differencing stay second order.
``gaussian_well``
    V(x) = -d * exp(-(x / w)**2) with params (d, w).
``sampled``
    Piecewise-linear interpolation of tabulated values; params are
    (x_start, x_end, v_0, ..., v_{m-1}) with uniformly spaced samples.
    Zero outside the tabulated interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .grids import GridSpec, trapezoid_weights

# |V| certified below this beyond support_radius; also the "numerically zero"
# threshold for sampled tails.
TRUNCATION_TOL = 1e-10

# Integer codes used by the compiled kernels.
KIND_CODES = {"zero": 0, "sech2": 1, "square_well": 2, "gaussian_well": 3, "sampled": 4}

PRESETS = tuple(KIND_CODES)


@dataclass(frozen=True)
class Potential:
    """Immutable potential description.

    Attributes:
        kind: preset name, one of :data:`PRESETS`.
        params: raw parameter tuple as passed to :func:`make_preset`.
        support_radius: |V(x)| <= TRUNCATION_TOL for |x| > support_radius.
        norm_l1: integral of |V|.
        norm_l2: L2 norm of V.
        jump_points: locations where V itself is discontinuous.
    """

    kind: str
    params: tuple[float, ...]
    support_radius: float
    norm_l1: float
    norm_l2: float
    jump_points: tuple[float, ...] = ()

    @property
    def code(self) -> int:
        return KIND_CODES[self.kind]

    def kernel_args(self) -> tuple[int, float, float, np.ndarray, np.ndarray]:
        """Arguments consumed by the compiled evaluation kernels."""
        if self.kind == "sampled":
            xs, vs = self._table()
            return self.code, 0.0, 0.0, xs, vs
        p = self.params + (0.0, 0.0)
        return self.code, float(p[0]), float(p[1]), _EMPTY, _EMPTY

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        x0, x1 = self.params[0], self.params[1]
        vs = np.asarray(self.params[2:], dtype=float)
        xs = np.linspace(x0, x1, vs.size)
        return xs, vs


_EMPTY = np.zeros(0, dtype=float)


def make_preset(kind: str, params) -> Potential:
    """Construct a preset potential.

    Args:
        kind: one of :data:`PRESETS`.
        params: sequence of real parameters, see the module docstring.

    Raises:
        PreconditionError: unknown preset name, non-finite or non-positive
            parameters, or a sampled table with fewer than two points.
    """
    if kind not in KIND_CODES:
        raise PreconditionError(
            f"unknown potential preset {kind!r}; available: {', '.join(PRESETS)}"
        )
    params = tuple(float(p) for p in np.atleast_1d(np.asarray(params, dtype=float)))
    if params and not all(math.isfinite(p) for p in params):
        raise PreconditionError("potential parameters must be finite")

    if kind == "zero":
        return Potential("zero", params, 0.0, 0.0, 0.0)

    if kind == "sampled":
        if len(params) < 4:
            raise PreconditionError("sampled potential needs (x_start, x_end, v0, v1, ...)")
        x0, x1 = params[0], params[1]
        if not x1 > x0:
            raise PreconditionError("sampled potential needs x_end > x_start")
        vs = np.asarray(params[2:], dtype=float)
        xs = np.linspace(x0, x1, vs.size)
        w = trapezoid_weights(xs)
        live = np.abs(vs) > TRUNCATION_TOL
        radius = float(np.max(np.abs(xs[live]))) if live.any() else 0.0
        return Potential(
            "sampled",
            params,
            radius,
            float(np.sum(w * np.abs(vs))),
            float(math.sqrt(np.sum(w * vs * vs))),
        )

    if len(params) != 2:
        raise PreconditionError(f"{kind} takes exactly two parameters")
    depth, width = params
    if depth <= 0 or width <= 0:
        raise PreconditionError(f"{kind} needs positive depth and width")

    if kind == "sech2":
        radius = width * math.acosh(math.sqrt(depth / TRUNCATION_TOL))
        return Potential(
            "sech2",
            params,
            radius,
            2.0 * depth * width,
            depth * math.sqrt(4.0 * width / 3.0),
        )
    if kind == "square_well":
        return Potential(
            "square_well",
            params,
            width,
            2.0 * depth * width,
            depth * math.sqrt(2.0 * width),
            jump_points=(-width, width),
        )
    # gaussian_well
    radius = width * math.sqrt(math.log(depth / TRUNCATION_TOL))
    return Potential(
        "gaussian_well",
        params,
        radius,
        depth * width * math.sqrt(math.pi),
        depth * math.sqrt(width) * (math.pi / 2.0) ** 0.25,
    )


def sample(potential: Potential, grid: GridSpec | np.ndarray) -> np.ndarray:
    """Evaluate the potential on a grid.

    Accepts a :class:`GridSpec` or a plain coordinate array and returns a
    float vector of the same length.  The formulas match the compiled scalar
    kernels bit-for-bit up to libm differences.
    """
    xs = grid.xs if isinstance(grid, GridSpec) else np.asarray(grid, dtype=float)
    kind = potential.kind
    if kind == "zero":
        return np.zeros_like(xs)
    if kind == "sech2":
        c, w = potential.params
        return -c / np.cosh(xs / w) ** 2
    if kind == "square_well":
        d, a = potential.params
        ax = np.abs(xs)
        return np.where(ax < a, -d, np.where(ax == a, -0.5 * d, 0.0))
    if kind == "gaussian_well":
        d, w = potential.params
        return -d * np.exp(-((xs / w) ** 2))
    tx, tv = potential._table()
    out = np.interp(xs, tx, tv, left=0.0, right=0.0)
    # np.interp clamps at the table ends; force the decay convention outside.
    out[(xs < tx[0]) | (xs > tx[-1])] = 0.0
    return out
