"""Independent reference: dense finite-difference Hamiltonian.

The operator is discretized with the 3-point Laplacian and Dirichlet walls
pinned at the window edges, so the two boundary nodes decouple from the
interior tridiagonal block.  The full eigendecomposition is computed eagerly
(tridiagonal solve plus the two trivial boundary modes), giving an exact
finite-dimensional functional calculus to test everything else against.

Eigenvectors are normalized in the grid quadrature, ``sum(w * v_i * v_j) =
delta_ij`` with trapezoid weights w, which makes the discrete Parseval
identity exact and matches the inner product used everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import eigh_tridiagonal

from .errors import PreconditionError
from .grids import GridSpec
from .potentials import Potential, sample


@dataclass(frozen=True, eq=False)
class DiscreteHamiltonian:
    """Dense surrogate for H with its full spectral decomposition.

    ``eigenvalues`` ascend; ``eigenvectors[:, m]`` is the matching column,
    quadrature-orthonormal.  The two Dirichlet boundary modes sit at
    ``2/h**2 + V(edge)``, far above any multiplier support at desk scale.
    """

    grid: GridSpec
    potential_values: NDArray[np.float64]
    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.float64]

    @property
    def matrix(self) -> NDArray[np.float64]:
        """Dense symmetric n-by-n matrix, assembled on demand."""
        n = self.grid.n_points
        h2 = self.grid.h ** 2
        m = np.zeros((n, n))
        np.fill_diagonal(m, 2.0 / h2 + self.potential_values)
        idx = np.arange(1, n - 2)
        m[idx, idx + 1] = -1.0 / h2
        m[idx + 1, idx] = -1.0 / h2
        return m


def discretize(pot: Potential, grid: GridSpec) -> DiscreteHamiltonian:
    """Assemble and eagerly diagonalize the reference Hamiltonian."""
    vs = sample(pot, grid)
    if not np.all(np.isfinite(vs)):
        raise PreconditionError("potential samples must be finite")
    n = grid.n_points
    h = grid.h
    diag = 2.0 / h**2 + vs[1:-1]
    off = np.full(n - 3, -1.0 / h**2)
    lam_int, vec_int = eigh_tridiagonal(diag, off)
    lams = np.empty(n)
    vecs = np.zeros((n, n))
    lams[: n - 2] = lam_int
    # interior modes vanish at the walls, so their trapezoid norm is h*sum(v^2)
    vecs[1:-1, : n - 2] = vec_int / np.sqrt(h)
    lams[n - 2] = 2.0 / h**2 + vs[0]
    lams[n - 1] = 2.0 / h**2 + vs[-1]
    vecs[0, n - 2] = np.sqrt(2.0 / h)
    vecs[-1, n - 1] = np.sqrt(2.0 / h)
    order = np.argsort(lams, kind="stable")
    lams = lams[order]
    vecs = vecs[:, order]
    lams.setflags(write=False)
    vecs.setflags(write=False)
    return DiscreteHamiltonian(grid, vs, lams, vecs)


def functional_calculus(hd: DiscreteHamiltonian, phi, f):
    """Apply phi(H) exactly in the discrete frame.

    ``phi`` is any callable accepting an eigenvalue array (a Multiplier
    works); ``f`` may be real or complex on ``hd.grid``.
    """
    f = np.asarray(f)
    if f.shape != (hd.grid.n_points,):
        raise PreconditionError("sample vector does not match the oracle grid")
    coeff = hd.eigenvectors.T @ (hd.grid.weights * f)
    return hd.eigenvectors @ (np.asarray(phi(hd.eigenvalues)) * coeff)
