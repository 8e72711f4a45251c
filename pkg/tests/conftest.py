"""Shared fixtures: the handful of eigenbases the whole suite reuses.

Building a basis means hundreds of independent ODE solves, so every
heavy object is session-scoped.  All fixtures are immutable; tests must
not mutate them.
"""

import numpy as np
import pytest

import distwave as dw


class Case:
    """A potential bundled with its grid, eigenbasis, bound states and oracle."""

    def __init__(self, pot, grid, xi_max, n_xi, with_oracle=True):
        self.pot = pot
        self.grid = grid
        self.basis = dw.build_eigenbasis(pot, grid, xi_max=xi_max, n_xi=n_xi)
        self.states = dw.find_bound_states(pot, grid)
        self.hd = dw.discretize(pot, grid) if with_oracle else None


def unit_gaussian(grid, center=0.0, width=1.0):
    x = grid.xs
    return np.exp(-(((x - center) / width) ** 2) / 2.0)


@pytest.fixture(scope="session")
def free_case():
    # Wide-enough window that a unit Gaussian decays to ~1e-49 at the edge.
    return Case(dw.make_preset("zero", ()), dw.GridSpec(-15.0, 15.0, 1501),
                xi_max=8.0, n_xi=384, with_oracle=False)


@pytest.fixture(scope="session")
def sech2_case():
    return Case(dw.make_preset("sech2", (2.0, 1.0)),
                dw.GridSpec(-20.0, 20.0, 1001), xi_max=8.0, n_xi=256)


@pytest.fixture(scope="session")
def sqw_case():
    return Case(dw.make_preset("square_well", (1.0, 1.0)),
                dw.GridSpec(-20.0, 20.0, 1001), xi_max=8.0, n_xi=256)


@pytest.fixture(scope="session")
def deep_pair():
    """Coarse and doubled discretizations of the same deep well.

    Used for quadrature-convergence checks; the depth sits close to a
    reflectionless value, which makes the threshold quadrature error
    dominate over the frequency-truncation floor.
    """
    pot = dw.make_preset("sech2", (5.0, 1.0))
    coarse = Case(pot, dw.GridSpec(-20.0, 20.0, 1001), xi_max=12.0,
                  n_xi=256, with_oracle=False)
    fine = Case(pot, dw.GridSpec(-20.0, 20.0, 2001), xi_max=12.0,
                n_xi=512, with_oracle=False)
    return coarse, fine


@pytest.fixture(scope="session")
def small_cases():
    """One modest instance per potential preset, each with a dense oracle.

    Windows are chosen per preset: the free case needs a wide box so the
    oracle's discrete-mode sum resolves the multiplier band; the wells
    need enough margin for the square-well Born tail to clear the
    frequency-window guard.
    """
    x_t = np.linspace(-6.0, 6.0, 1201)
    table = tuple(float(v) for v in -2.0 * np.exp(-(x_t ** 2)))
    specs = {
        "zero": (dw.make_preset("zero", ()), dw.GridSpec(-40.0, 40.0, 1001)),
        "sech2": (dw.make_preset("sech2", (2.0, 1.0)),
                  dw.GridSpec(-16.0, 16.0, 385)),
        "square_well": (dw.make_preset("square_well", (1.0, 1.0)),
                        dw.GridSpec(-18.0, 18.0, 385)),
        "gaussian_well": (dw.make_preset("gaussian_well", (2.0, 1.0)),
                          dw.GridSpec(-16.0, 16.0, 385)),
        "sampled": (dw.make_preset("sampled", (-6.0, 6.0) + table),
                    dw.GridSpec(-16.0, 16.0, 385)),
    }
    return {name: Case(pot, grid, xi_max=4.0, n_xi=256)
            for name, (pot, grid) in specs.items()}
