"""Kernel assembly, multipliers, and the two application routes."""

import numpy as np
import pytest

import distwave as dw
from distwave import PreconditionError
from conftest import unit_gaussian


def test_tent_values():
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    assert phi(2.0) == 1.0
    assert phi(1.0) == 0.0 and phi(3.0) == 0.0
    assert phi(2.5) == 0.5
    assert phi(5.0) == 0.0


def test_smooth_bump_values():
    phi = dw.multiplier_preset("smooth_bump", 2.0, 1.0)
    assert phi(2.0) == 1.0
    # exp(1 - 1/(1 - 0.25)) = e^{-1/3}
    assert abs(phi(2.5) - 0.7165313105737893) < 1e-15
    assert phi(3.0) == 0.0 and phi(1.0) == 0.0


def test_multiplier_support_bookkeeping():
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    assert phi.support == (1.0, 3.0)
    with pytest.raises(PreconditionError):
        dw.multiplier_preset("tent", 2.0, -1.0)
    with pytest.raises(PreconditionError):
        dw.multiplier_preset("plateau", 2.0, 1.0)


def test_sampled_multiplier_interpolates():
    xs = np.linspace(1.0, 3.0, 21)
    vs = np.maximum(0.0, 1.0 - np.abs(xs - 2.0))
    phi = dw.multiplier_preset("sampled", 0.0, 0.0, samples=(xs, vs))
    assert phi(2.0) == 1.0
    assert phi(0.5) == 0.0 and phi(3.5) == 0.0
    assert abs(phi(2.25) - 0.75) < 1e-12
    assert phi.support == (1.0, 3.0)


def test_sampled_multiplier_table_validation():
    with pytest.raises(PreconditionError):
        dw.multiplier_preset("sampled", 0.0, 0.0,
                             samples=([1.0, 1.0, 2.0], [0.0, 1.0, 0.0]))
    with pytest.raises(PreconditionError):
        dw.multiplier_preset("sampled", 0.0, 0.0,
                             samples=([1.0, 2.0, 3.0], [0.5, 1.0, 0.0]))


def test_free_kernel_is_translation_invariant():
    basis = dw.build_eigenbasis(dw.make_preset("zero", ()),
                                dw.GridSpec(-10.0, 10.0, 201), 4.0, 256)
    k = dw.kernel_ac(basis, dw.multiplier_preset("tent", 2.0, 1.0))
    diag = np.diag(k.values)
    assert np.max(np.abs(diag - diag[0])) < 1e-12
    # one off-diagonal stripe: K(x+s, y+s) = K(x, y)
    stripe = np.diagonal(k.values, offset=7)
    assert np.max(np.abs(stripe - stripe[0])) < 1e-12
    # frozen reference: (1/pi) * integral of tent(xi^2) over [1, sqrt(3)]
    assert abs(diag[0].real - 0.11444262672393606) < 1e-3
    assert abs(diag[0].imag) < 1e-12
    assert k.parts == ("ac",)


def test_kernel_rejects_support_off_the_resolved_band(sech2_case):
    with pytest.raises(PreconditionError):
        dw.kernel_ac(sech2_case.basis, dw.multiplier_preset("tent", 80.0, 1.0))
    with pytest.raises(PreconditionError):
        dw.kernel_ac(sech2_case.basis, dw.multiplier_preset("tent", 0.5, 1.0))


def test_kernel_rejects_underresolved_support(sech2_case):
    with pytest.raises(PreconditionError):
        dw.kernel_ac(sech2_case.basis, dw.multiplier_preset("tent", 2.0, 0.05))


def test_kernel_rejects_masked_band():
    basis = dw.build_eigenbasis(dw.make_preset("zero", ()),
                                dw.GridSpec(-15.0, 15.0, 301), 2.0, 128,
                                wronskian_tol=1.0)
    assert np.any(basis.exceptional_mask)
    with pytest.raises(PreconditionError):
        dw.kernel_ac(basis, dw.multiplier_preset("tent", 0.25, 0.2))


def test_kernel_is_hermitian(small_cases):
    basis = small_cases["sech2"].basis
    k = dw.kernel_ac(basis, dw.multiplier_preset("tent", 2.0, 1.0))
    assert np.max(np.abs(k.values - k.values.conj().T)) < 1e-10
    assert np.all(np.isfinite(k.values.real))


def test_point_kernel_empty_and_support_miss(sech2_case):
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    k0 = dw.kernel_point((), phi, sech2_case.grid)
    assert np.all(k0.values == 0.0)
    k1 = dw.kernel_point(sech2_case.states, phi, sech2_case.grid)
    assert np.all(k1.values == 0.0)  # phi(-1) = 0
    assert k1.parts == ("point",)


def test_point_kernel_closed_form(sech2_case):
    phi = dw.multiplier_preset("tent", -1.0, 0.5)
    k = dw.kernel_point(sech2_case.states, phi, sech2_case.grid)
    x = sech2_case.grid.xs
    ref = 0.5 * np.outer(1.0 / np.cosh(x), 1.0 / np.cosh(x))
    assert np.max(np.abs(k.values - ref)) < 1e-3


def test_point_kernel_grid_mismatch(sech2_case):
    with pytest.raises(PreconditionError):
        dw.kernel_point(sech2_case.states,
                        dw.multiplier_preset("tent", -1.0, 0.5),
                        dw.GridSpec(-20.0, 20.0, 501))


def test_total_kernel_is_the_sum_of_parts(small_cases):
    case = small_cases["sech2"]
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    total = dw.kernel_total(case.basis, case.states, phi)
    ac = dw.kernel_ac(case.basis, phi)
    pt = dw.kernel_point(case.states, phi, case.grid)
    assert total.parts == ("ac", "point")
    assert np.max(np.abs(total.values - ac.values - pt.values)) == 0.0


def test_apply_zero_kernel_gives_zero(sech2_case):
    phi = dw.multiplier_preset("tent", -1.0, 0.5)
    k = dw.kernel_point((), phi, sech2_case.grid)
    f = unit_gaussian(sech2_case.grid)
    assert np.all(dw.apply_spectral(k, f) == 0.0)


def test_free_apply_matches_fourier_multiplier(small_cases):
    case = small_cases["zero"]
    basis = case.basis
    f = unit_gaussian(case.grid)
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    k = dw.kernel_ac(basis, phi)
    out = dw.apply_spectral(k, f)
    x, w = case.grid.xs, case.grid.weights
    xi, u = basis.xi_grid, basis.xi_weights
    fhat = (2 * np.pi) ** -0.5 * (np.exp(-1j * np.outer(xi, x)) @ (w * f))
    ref = (2 * np.pi) ** -0.5 * (np.exp(1j * np.outer(x, xi))
                                 @ (u * phi(xi ** 2) * fhat))
    assert np.max(np.abs(out - ref)) < 1e-6


def test_apply_matches_oracle(small_cases):
    case = small_cases["sech2"]
    f = unit_gaussian(case.grid)
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    k = dw.kernel_total(case.basis, case.states, phi)
    out = dw.apply_spectral(k, f)
    ref = dw.functional_calculus(case.hd, phi, f)
    w = case.grid.weights
    err = np.sqrt(np.sum(w * np.abs(out - ref) ** 2))
    assert err / np.sqrt(np.sum(w * f ** 2)) < 1e-2


def test_oracle_agreement_all_presets_small_grids(small_cases):
    # the free window needs to be wider than 400 nodes allow at this
    # spacing, so it gets its own modest instance here.
    zero_grid = dw.GridSpec(-24.0, 24.0, 397)
    zero = dw.make_preset("zero", ())
    zero_basis = dw.build_eigenbasis(zero, zero_grid, 4.0, 256)
    zero_hd = dw.discretize(zero, zero_grid)
    instances = [(zero_basis, (), zero_hd, zero_grid)]
    for name in ("sech2", "square_well", "gaussian_well", "sampled"):
        c = small_cases[name]
        assert c.grid.n_points <= 400
        instances.append((c.basis, c.states, c.hd, c.grid))
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    for basis, states, hd, grid in instances:
        f = unit_gaussian(grid)
        k = dw.kernel_total(basis, states, phi)
        out = dw.apply_spectral(k, f)
        ref = dw.functional_calculus(hd, phi, f)
        w = grid.weights
        err = np.sqrt(np.sum(w * np.abs(out - ref) ** 2))
        assert err / np.sqrt(np.sum(w * f ** 2)) < 1e-2


def test_apply_rejects_bad_inputs(small_cases):
    case = small_cases["sech2"]
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    k = dw.kernel_ac(case.basis, phi)
    with pytest.raises(PreconditionError):
        dw.apply_spectral(k, np.ones(case.grid.n_points))
    with pytest.raises(PreconditionError):
        dw.apply_spectral(k, unit_gaussian(dw.GridSpec(-16.0, 16.0, 501)))


def test_routes_agree(small_cases):
    phi = dw.multiplier_preset("tent", 2.0, 1.0)
    for case in small_cases.values():
        f = unit_gaussian(case.grid)
        k = dw.kernel_total(case.basis, case.states, phi)
        via_k = dw.apply_spectral(k, f)
        via_t = dw.apply_via_transform(case.basis, case.states, phi, f)
        assert np.max(np.abs(via_k - via_t)) < 1e-8


def test_bound_state_channel_recovers_eigenfunction(sech2_case):
    phi = dw.multiplier_preset("tent", -1.0, 0.5)
    e1 = sech2_case.states[0].eigenfunction
    out = dw.apply_via_transform(sech2_case.basis, sech2_case.states, phi, e1)
    assert np.max(np.abs(out - e1)) < 1e-3


def test_disjoint_supports_nearly_annihilate():
    # supports [1,2] and [3,4] are narrow in xi, so this needs a finer
    # frequency grid than the shared fixtures carry; the product is formed
    # in the discrete operator algebra (K1 w K2) since the intermediate
    # image rings at the window edge and would not re-enter the guard.
    grid = dw.GridSpec(-16.0, 16.0, 385)
    pot = dw.make_preset("sech2", (2.0, 1.0))
    basis = dw.build_eigenbasis(pot, grid, 4.0, 512)
    states = dw.find_bound_states(pot, grid)
    phi1 = dw.multiplier_preset("tent", 1.5, 0.5)
    phi2 = dw.multiplier_preset("tent", 3.5, 0.5)
    k1 = dw.kernel_total(basis, states, phi1)
    k2 = dw.kernel_total(basis, states, phi2)
    w = grid.weights
    f = unit_gaussian(grid)
    second = k1.values @ (w * (k2.values @ (w * f)))
    norm_f = np.sqrt(np.sum(w * f ** 2))
    assert np.sqrt(np.sum(w * np.abs(second) ** 2)) <= 1e-2 * norm_f
