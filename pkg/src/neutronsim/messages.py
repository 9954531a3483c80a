"""Message algebra for event-based neutron transport.

A message is the two-component complex unit vector carried by each
simulated neutron.  The first component is the spin-up amplitude, the
second the spin-down amplitude; the overall phase tracks the time of
flight.  Messages are plain ``(c_up, c_down)`` tuples of Python complex
numbers so the event loops stay cheap.

All operations here are unitary: they preserve |c_up|^2 + |c_down|^2.
"""

from __future__ import annotations

import cmath
import math

Message = tuple[complex, complex]

SPIN_UP: Message = (1.0 + 0.0j, 0.0j)


def make_message(psi1: float, psi2: float, theta: float) -> Message:
    """Build a unit message from two phase angles and a polar angle.

    Returns ``(e^{i psi1} cos(theta/2), e^{i psi2} sin(theta/2))``.
    """
    return (
        cmath.exp(1j * psi1) * math.cos(theta / 2.0),
        cmath.exp(1j * psi2) * math.sin(theta / 2.0),
    )


def advance_time(m: Message, nu: float, t: float) -> Message:
    """Advance the internal clock: both components pick up ``e^{i nu t}``."""
    p = cmath.exp(1j * nu * t)
    return (p * m[0], p * m[1])


def phase_shift(m: Message, phi: float) -> Message:
    """Apply a global phase ``e^{i phi}`` (phase-shifter foil)."""
    p = cmath.exp(1j * phi)
    return (p * m[0], p * m[1])


def rotate_field(m: Message, b: tuple[float, float, float]) -> Message:
    """Rotate the magnetic moment: ``m <- exp(i(sx*bx + sy*by + sz*bz)) m``.

    ``b`` carries the rotation angles about the x, y and z axes (field
    strength times exposure time already folded in).  The exponential of
    the Pauli combination is evaluated in closed form.
    """
    bx, by, bz = b
    beta = math.sqrt(bx * bx + by * by + bz * bz)
    if beta == 0.0:
        return m
    c = math.cos(beta)
    s = math.sin(beta) / beta
    # exp(i (sigma . b)) = cos|b| I + i sin|b| (sigma . b)/|b|
    u00 = complex(c, s * bz)
    u01 = 1j * s * complex(bx, -by)
    u10 = 1j * s * complex(bx, by)
    u11 = complex(c, -s * bz)
    return (u00 * m[0] + u01 * m[1], u10 * m[0] + u11 * m[1])


def spin_turn_mu_metal(m: Message, sign: int) -> Message:
    """Mu-metal spin turner: rotate by ``sign * pi/2`` about the y axis."""
    return rotate_field(m, (0.0, sign * math.pi / 4.0, 0.0))


def spin_rotate_x(m: Message, alpha: float) -> Message:
    """Spin rotator: rotate the magnetic moment by ``alpha`` about x."""
    return rotate_field(m, (alpha / 2.0, 0.0, 0.0))


def rf_flip(m: Message, omega_t_plus_phi: float) -> Message:
    """Resonant RF coil: swap the spin components, applying half the coil
    phase with opposite signs, ``m <- [[0, e^{iW/2}], [-e^{-iW/2}, 0]] m``.

    Applying the coil twice gives exactly ``-m`` for any phase.
    """
    p = cmath.exp(0.5j * omega_t_plus_phi)
    return (p * m[1], -p.conjugate() * m[0])


def energy_phase_down(m: Message, omega_t_down: float) -> Message:
    """Phase accumulated by the spin-down component only."""
    return (m[0], cmath.exp(1j * omega_t_down) * m[1])


def norm_sq(m: Message) -> float:
    c_up, c_down = m
    return (c_up * c_up.conjugate() + c_down * c_down.conjugate()).real
