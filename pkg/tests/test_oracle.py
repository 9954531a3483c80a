"""Unit tests of the quantum-theory oracle: the amplitude-propagation
route must agree with every closed-form expression, and the shutter
parameter solver must invert the frequency model exactly."""

import math

import numpy as np
import pytest

from neutronsim import oracle

RNG = np.random.Generator(np.random.Philox(np.random.SeedSequence(2024)))


# ---------------------------------------------------------------------------
# propagation machinery


def test_propagate_applies_pairs_in_order():
    swap = oracle.PairOp(np.array([[0, 1], [1, 0]], dtype=complex), (0, 1))
    psi = oracle.propagate(np.array([1, 0, 0, 0], dtype=complex), [swap])
    assert np.allclose(psi, [0, 1, 0, 0])


def test_propagate_rejects_out_of_range_pair():
    bad = oracle.PairOp(np.eye(2, dtype=complex), (0, 9))
    with pytest.raises(IndexError):
        oracle.propagate(np.zeros(4, dtype=complex), [bad])


def test_splitter_matrices_are_unitary():
    for r in (0.0, 0.2, 0.5, 0.77, 1.0):
        assert oracle.PairOp(oracle._bs_entry(r), (0, 1)).is_unitary()
        assert oracle.PairOp(oracle._bs_exit(r), (0, 1)).is_unitary()


def test_chains_conserve_probability_without_absorption():
    for chain in (
        oracle.mzi_chain(0.3, 1.0, 1.0, 0.4, 1.1),
        oracle.bell_chain(0.2, 0.7, 0.3, 1.9),
        oracle.rf_chain(0.5, 0.4, 0.8, phi_rf1=0.2, phi_rf2=1.3),
    ):
        psi = oracle.propagate(oracle.PSI_IN, chain)
        assert abs(np.vdot(psi, psi).real - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# chain vs closed forms


def test_mzi_chain_matches_closed_form():
    for _ in range(1000):
        r, a, b = RNG.random(3)
        phi0, phi1 = RNG.random(2) * 2.0 * math.pi
        psi = oracle.propagate(oracle.PSI_IN,
                               oracle.mzi_chain(r, a, b, phi0, phi1))
        p_h, p_o = oracle.beam_probs(psi)
        eh, eo = oracle.qt_mzi(r, a, b, phi1 - phi0)
        assert abs(p_h - eh) < 1e-12 and abs(p_o - eo) < 1e-12


def test_bell_chain_matches_closed_form():
    for _ in range(1000):
        r = RNG.random()
        alpha, phi0, phi1 = RNG.random(3) * 2.0 * math.pi
        psi = oracle.propagate(oracle.PSI_IN,
                               oracle.bell_chain(r, alpha, phi0, phi1))
        p_o_up = abs(psi[6]) ** 2
        assert abs(p_o_up - oracle.qt_bell_p_o(r, alpha, phi0 - phi1)) < 1e-12


def test_bell_correlation_is_cosine():
    def p(r, alpha, chi):
        psi = oracle.propagate(oracle.PSI_IN,
                               oracle.bell_chain(r, alpha, chi, 0.0))
        return abs(psi[6]) ** 2

    pi = math.pi
    for _ in range(200):
        r = 0.05 + 0.9 * RNG.random()
        alpha, chi = RNG.random(2) * 2.0 * pi
        quad = (p(r, alpha, chi), p(r, alpha + pi, chi + pi),
                p(r, alpha, chi + pi), p(r, alpha + pi, chi))
        e = (quad[0] + quad[1] - quad[2] - quad[3]) / sum(quad)
        assert abs(e - oracle.qt_bell_E(alpha, chi)) < 1e-12


def test_rf_chain_matches_closed_form():
    for _ in range(1000):
        r = RNG.random()
        phi0, phi1, phi = RNG.random(3) * 2.0 * math.pi
        chain = oracle.rf_chain(r, phi0, phi1, phi_rf1=0.0, phi_rf2=phi)
        psi = oracle.propagate(oracle.PSI_IN, chain)
        p_o_up = abs(psi[6]) ** 2
        p_h = abs(psi[4]) ** 2 + abs(psi[5]) ** 2
        eo, eh = oracle.qt_rf(r, phi0 - phi1, phi)
        assert abs(p_o_up - eo) < 1e-12 and abs(p_h - eh) < 1e-12


def test_chsh_reaches_tsirelson_bound():
    pi = math.pi
    s = oracle.qt_bell_S(0.0, pi / 4.0, pi / 2.0, -pi / 4.0)
    assert abs(s - 2.0 * math.sqrt(2.0)) < 1e-12


# ---------------------------------------------------------------------------
# mixed-state and visibility forms


def test_mixed_chopper_visibility():
    for a in (0.0, 0.3, 1.0):
        _, v = oracle.qt_mixed_chopper(0.2, a, 0.0)
        assert abs(v - 2.0 * a / (1.0 + a)) < 1e-15


def test_pure_visibility():
    assert oracle.qt_visibility_pure(1.0, 1.0) == 1.0
    assert oracle.qt_visibility_pure(0.0, 0.0) == 0.0
    a, b = 0.3, 0.8
    assert abs(oracle.qt_visibility_pure(a, b)
               - 2.0 * math.sqrt(a * b) / (a + b)) < 1e-15


def test_mixed_chopper_is_incoherent_average_of_pure():
    # Averaging the coherent form over the open/blocked mix reproduces
    # the chopper prediction: a share a of fully open plus (1-a) of a
    # blocked arm.
    r, a = 0.2, 0.35
    for chi in np.linspace(0.0, 2.0 * math.pi, 9):
        _, p_open = oracle.qt_mzi(r, 1.0, 1.0, chi)
        _, p_blocked = oracle.qt_mzi(r, 0.0, 1.0, chi)
        expected = a * p_open + (1.0 - a) * p_blocked
        got, _ = oracle.qt_mixed_chopper(r, a, chi)
        assert abs(got - expected) < 1e-12


# ---------------------------------------------------------------------------
# shutter frequency model and parameter solver


def test_shutter_freqs_from_branch_probs():
    r, v = 0.2, 0.4
    for chi in np.linspace(0.0, 2.0 * math.pi, 7):
        b = oracle.qt_shutter_branch_probs(r, v, chi)
        f_open, f_closed = oracle.qt_shutter_freqs(r, v, chi)
        assert abs(b["open"]["O"] / (b["open"]["O"] + b["open"]["H"])
                   - f_open) < 1e-12
        assert abs(b["closed"]["O"] / (b["closed"]["O"] + b["closed"]["H"])
                   - f_closed) < 1e-12


def test_two_population_reduces_to_single():
    r, v, chi = 0.3, 0.5, 1.2
    single = oracle.qt_shutter_freqs(r, v, chi)
    assert np.allclose(oracle.qt_shutter_two_population(r, r, 0.5, v, chi),
                       single, atol=1e-12)
    assert np.allclose(oracle.qt_shutter_two_population(r, 0.9, 1.0, v, chi),
                       single, atol=1e-12)


def test_solve_shutter_params_checkpoint():
    r2, w1 = oracle.solve_shutter_params(0.2, 0.4, 0.43)
    assert abs(r2 - 0.84) < 0.005
    assert abs(w1 - 0.93) < 0.005


def test_solve_shutter_params_satisfies_constraints():
    for r1, v, g in ((0.2, 0.4, 0.43), (0.18, 0.35, 0.42), (0.22, 0.45, 0.44)):
        r2, w1 = oracle.solve_shutter_params(r1, v, g)
        f_open_max, f_closed = oracle.qt_shutter_two_population(
            r1, r2, w1, v, 0.0)
        assert abs(f_open_max - g) < 1e-10
        assert abs(f_closed - g) < 1e-10


def test_solve_shutter_params_bounds():
    with pytest.raises(oracle.ShutterParamError):
        oracle.solve_shutter_params(0.0, 0.4, 0.43)
    with pytest.raises(oracle.ShutterParamError):
        oracle.solve_shutter_params(0.2, 1.4, 0.43)
    with pytest.raises(oracle.ShutterParamError):
        oracle.solve_shutter_params(0.2, 0.4, 1.43)
    with pytest.raises(oracle.ShutterParamError):
        # r1 = 1/(2(1+v)) makes the r2 equation singular
        oracle.solve_shutter_params(1.0 / 2.8, 0.4, 0.43)
