"""Unit tests of the message algebra.

Rotation results are cross-checked against scipy's matrix exponential
of the Pauli combination, an independent route to the same unitaries.
"""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from neutronsim.messages import (SPIN_UP, advance_time, energy_phase_down,
                                 make_message, norm_sq, phase_shift, rf_flip,
                                 rotate_field, spin_rotate_x,
                                 spin_turn_mu_metal)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def assert_close(m, expected, tol=1e-12):
    assert abs(m[0] - expected[0]) < tol and abs(m[1] - expected[1]) < tol, \
        f"{m} != {expected}"


angles = st.floats(-10.0, 10.0, allow_nan=False)


def messages_strategy():
    return st.tuples(angles, angles, angles).map(lambda t: make_message(*t))


# ---------------------------------------------------------------------------
# make_message


def test_make_message_basic():
    assert_close(make_message(0.0, 0.0, 0.0), (1.0, 0.0))
    assert_close(make_message(0.0, 0.0, math.pi), (0.0, 1.0))
    s2 = 1.0 / math.sqrt(2.0)
    assert_close(make_message(math.pi / 2.0, 0.0, math.pi / 2.0),
                 (1j * s2, s2))


@given(angles, angles, angles)
def test_make_message_unit_norm(psi1, psi2, theta):
    assert abs(norm_sq(make_message(psi1, psi2, theta)) - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# time-of-flight phase


def test_advance_time_examples():
    assert_close(advance_time((1.0 + 0.0j, 0.0j), 1.0, math.pi), (-1.0, 0.0))
    s2 = 1.0 / math.sqrt(2.0)
    assert_close(advance_time((1j * s2, s2 + 0.0j), 1.0, math.pi / 2.0),
                 (-s2, 1j * s2))


@given(messages_strategy(), angles, angles)
def test_advance_time_additive(m, t1, t2):
    a = advance_time(advance_time(m, 1.0, t1), 1.0, t2)
    b = advance_time(m, 1.0, t1 + t2)
    assert_close(a, b, tol=1e-10)


def test_phase_shift_is_global_phase():
    m = make_message(0.3, -0.7, 1.1)
    out = phase_shift(m, 0.9)
    p = cmath.exp(0.9j)
    assert_close(out, (p * m[0], p * m[1]))


# ---------------------------------------------------------------------------
# rotations


def test_rotate_field_y_example():
    out = rotate_field(SPIN_UP, (0.0, math.pi / 4.0, 0.0))
    assert_close(out, (math.cos(math.pi / 4.0), -math.sin(math.pi / 4.0)))


def test_rotate_field_z_example():
    assert_close(rotate_field(SPIN_UP, (0.0, 0.0, math.pi / 2.0)), (1j, 0.0))


def test_rotate_field_zero_is_identity():
    m = make_message(0.2, 0.4, 0.8)
    assert rotate_field(m, (0.0, 0.0, 0.0)) == m


@settings(max_examples=50)
@given(messages_strategy(), st.tuples(angles, angles, angles))
def test_rotate_field_matches_matrix_exponential(m, b):
    u = expm(1j * (b[0] * SX + b[1] * SY + b[2] * SZ))
    expected = u @ np.array(m)
    assert_close(rotate_field(m, b), (expected[0], expected[1]), tol=1e-10)


@given(messages_strategy(), angles)
def test_y_rotations_compose(m, beta):
    two = rotate_field(rotate_field(m, (0.0, beta, 0.0)), (0.0, beta, 0.0))
    one = rotate_field(m, (0.0, 2.0 * beta, 0.0))
    assert_close(two, one, tol=1e-10)


def test_spin_rotate_x_examples():
    assert_close(spin_rotate_x(SPIN_UP, math.pi), (0.0, 1j))
    assert_close(spin_rotate_x(SPIN_UP, math.pi / 2.0),
                 (math.cos(math.pi / 4.0), 1j * math.sin(math.pi / 4.0)))


def test_mu_metal_is_quarter_turn():
    m = make_message(0.1, 0.5, 0.9)
    assert spin_turn_mu_metal(m, -1) == rotate_field(m, (0.0, -math.pi / 4.0, 0.0))
    assert spin_turn_mu_metal(m, +1) == rotate_field(m, (0.0, math.pi / 4.0, 0.0))


# ---------------------------------------------------------------------------
# RF coil and energy phase


def test_rf_flip_examples():
    assert_close(rf_flip((1.0 + 0.0j, 0.0j), 0.0), (0.0, -1.0))
    assert_close(rf_flip((0.0j, 1.0 + 0.0j), 0.0), (1.0, 0.0))


@given(messages_strategy(), angles)
def test_rf_flip_twice_negates(m, w):
    out = rf_flip(rf_flip(m, w), w)
    assert_close(out, (-m[0], -m[1]), tol=1e-12)


def test_energy_phase_down_only_touches_down_component():
    m = make_message(0.3, 0.1, 1.4)
    out = energy_phase_down(m, 0.77)
    assert out[0] == m[0]
    assert abs(out[1] - cmath.exp(0.77j) * m[1]) < 1e-15


# ---------------------------------------------------------------------------
# unitarity of everything


@settings(max_examples=50)
@given(messages_strategy(), angles, angles, angles)
def test_all_operations_preserve_norm(m, a, b, c):
    for out in (
        advance_time(m, a, b),
        phase_shift(m, a),
        rotate_field(m, (a, b, c)),
        spin_turn_mu_metal(m, 1),
        spin_rotate_x(m, a),
        rf_flip(m, a),
        energy_phase_down(m, a),
    ):
        assert abs(norm_sq(out) - 1.0) < 1e-12


def test_message_is_plain_tuple():
    m = make_message(0.0, 0.0, 0.0)
    assert isinstance(m, tuple) and len(m) == 2
    with pytest.raises(TypeError):
        m[0] = 2.0
