"""Quantum-theory predictions used as ground truth.

The interferometer is described by an 8-component state vector: four
paths times two spin directions, path ``j`` occupying the amplitude
pair ``(2j, 2j + 1)``.  ``propagate`` applies a chain of 2x2 matrices,
each acting on a chosen index pair; the chain builders below assemble
the full interferometer variants.  The closed-form probability and
visibility expressions live alongside so tests can cross-check the two
routes against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Amplitude layout: (path0 up, path0 dn, path1 up, path1 dn,
#                    path2 up, path2 dn, path3 up, path3 dn).
# Path 2 feeds the H detector, path 3 the O detector.


@dataclass(frozen=True)
class PairOp:
    """A 2x2 complex matrix acting on one index pair of the 8-vector."""
    matrix: np.ndarray
    pair: tuple[int, int]

    def is_unitary(self, tol: float = 1e-12) -> bool:
        m = self.matrix
        return bool(np.allclose(m.conj().T @ m, np.eye(2), atol=tol))


def propagate(psi: np.ndarray, ops: list[PairOp]) -> np.ndarray:
    """Apply each pair-operator in sequence to a copy of ``psi``."""
    psi = np.asarray(psi, dtype=complex).copy()
    for op in ops:
        i, j = op.pair
        if not (0 <= i < psi.size and 0 <= j < psi.size):
            raise IndexError(f"pair {op.pair} out of range for size {psi.size}")
        a, b = psi[i], psi[j]
        m = op.matrix
        psi[i] = m[0, 0] * a + m[0, 1] * b
        psi[j] = m[1, 0] * a + m[1, 1] * b
    return psi


def _bs_entry(r: float) -> np.ndarray:
    """Splitter matrix [[T, -R], [R, T]] with real amplitudes sqrt(T), sqrt(R)."""
    t_amp = math.sqrt(1.0 - r)
    r_amp = math.sqrt(r)
    return np.array([[t_amp, -r_amp], [r_amp, t_amp]], dtype=complex)


def _bs_exit(r: float) -> np.ndarray:
    """Splitter matrix [[T, R], [-R, T]], the conjugate-transposed layout."""
    t_amp = math.sqrt(1.0 - r)
    r_amp = math.sqrt(r)
    return np.array([[t_amp, r_amp], [-r_amp, t_amp]], dtype=complex)


def _diag(d0: complex, d1: complex) -> np.ndarray:
    return np.array([[d0, 0.0], [0.0, d1]], dtype=complex)


def _rf(omega_t_plus_phi: float) -> np.ndarray:
    # Antidiagonal spin flip with opposite half-phases on the two spin
    # components; with a common phase instead, the coil phase would be a
    # global factor and could never reach the detection probabilities.
    p = np.exp(0.5j * omega_t_plus_phi)
    return np.array([[0.0, p], [-p.conjugate(), 0.0]], dtype=complex)


def mzi_chain(r: float, a: float, b: float, phi0: float, phi1: float) -> list[PairOp]:
    """Interferometer with arm attenuations ``a`` (via BS1) and ``b`` (via BS2).

    Reading in application order: BS0 splits path 0 into paths 0/1,
    BS1/BS2 refract into paths 2/3, the attenuated phase shifters act on
    those, and BS3 recombines them into the H (path 2) and O (path 3)
    exits.
    """
    entry = _bs_entry(r)
    exit_ = _bs_exit(r)
    sa = math.sqrt(a) * np.exp(1j * phi0)
    sb = math.sqrt(b) * np.exp(1j * phi1)
    return [
        PairOp(entry, (0, 2)), PairOp(entry, (1, 3)),          # BS0
        PairOp(entry, (0, 4)), PairOp(entry, (1, 5)),          # BS1
        PairOp(exit_, (2, 6)), PairOp(exit_, (3, 7)),          # BS2
        PairOp(_diag(sa, sa), (4, 5)),                         # arm A: absorb + phi0
        PairOp(_diag(sb, sb), (6, 7)),                         # arm B: absorb + phi1
        PairOp(exit_, (4, 6)), PairOp(exit_, (5, 7)),          # BS3
    ]


def bell_chain(r: float, alpha: float, phi0: float, phi1: float) -> list[PairOp]:
    """Interferometer with mu-metal spin turners and the O-beam spin
    rotator by ``alpha`` about x, as used for the Bell-CHSH test."""
    entry = _bs_entry(r)
    exit_ = _bs_exit(r)
    s2 = 1.0 / math.sqrt(2.0)
    turn_minus = np.array([[s2, -s2], [s2, s2]], dtype=complex)   # exp(-i pi sy/4)
    turn_plus = np.array([[s2, s2], [-s2, s2]], dtype=complex)    # exp(+i pi sy/4)
    c = math.cos(alpha / 2.0)
    s = 1j * math.sin(alpha / 2.0)
    rot_x = np.array([[c, s], [s, c]], dtype=complex)
    pa = np.exp(1j * phi0)
    pb = np.exp(1j * phi1)
    return [
        PairOp(entry, (0, 2)), PairOp(entry, (1, 3)),          # BS0
        PairOp(turn_minus, (0, 1)),                            # mu-metal, arm A
        PairOp(turn_plus, (2, 3)),                             # mu-metal, arm B
        PairOp(entry, (0, 4)), PairOp(entry, (1, 5)),          # BS1
        PairOp(exit_, (2, 6)), PairOp(exit_, (3, 7)),          # BS2
        PairOp(_diag(pa, pa), (4, 5)),                         # phi0
        PairOp(_diag(pb, pb), (6, 7)),                         # phi1
        PairOp(exit_, (4, 6)), PairOp(exit_, (5, 7)),          # BS3
        PairOp(rot_x, (6, 7)),                                 # spin rotator on O
    ]


def rf_chain(r: float, phi0: float, phi1: float, omega: float = 0.0,
             t1: float = 0.0, t2: float = 0.0, phi_rf1: float = 0.0,
             phi_rf2: float = 0.0, t_down: float = 0.0) -> list[PairOp]:
    """Interferometer with RF spin flippers: RF1 in arm A, RF2 and the
    pi/2 x-rotator on the O beam, plus the spin-down phase accumulated
    between RF1 and BS3 (applied on the arm-A pair after BS1, where the
    amplitude actually lives)."""
    entry = _bs_entry(r)
    exit_ = _bs_exit(r)
    s2 = 1.0 / math.sqrt(2.0)
    rot_x_half = np.array([[s2, 1j * s2], [1j * s2, s2]], dtype=complex)
    pa = np.exp(1j * phi0)
    pb = np.exp(1j * phi1)
    return [
        PairOp(entry, (0, 2)), PairOp(entry, (1, 3)),          # BS0
        PairOp(_diag(pa, pa), (0, 1)),                         # phi0 on arm A
        PairOp(_diag(pb, pb), (2, 3)),                         # phi1 on arm B
        PairOp(_rf(omega * t1 + phi_rf1), (0, 1)),             # RF1
        PairOp(entry, (0, 4)), PairOp(entry, (1, 5)),          # BS1
        PairOp(_diag(1.0, np.exp(1j * omega * t_down)), (4, 5)),
        PairOp(exit_, (2, 6)), PairOp(exit_, (3, 7)),          # BS2
        PairOp(exit_, (4, 6)), PairOp(exit_, (5, 7)),          # BS3
        PairOp(_rf(omega * t2 / 2.0 + phi_rf2), (6, 7)),       # RF2
        PairOp(rot_x_half, (6, 7)),                            # spin rotator
    ]


PSI_IN = np.array([1, 0, 0, 0, 0, 0, 0, 0], dtype=complex)


def beam_probs(psi: np.ndarray) -> tuple[float, float]:
    """(p_H, p_O): summed spin populations of paths 2 and 3."""
    p_h = abs(psi[4]) ** 2 + abs(psi[5]) ** 2
    p_o = abs(psi[6]) ** 2 + abs(psi[7]) ** 2
    return p_h, p_o


# ---------------------------------------------------------------------------
# Closed forms


def qt_mzi(r: float, a: float, b: float, chi: float) -> tuple[float, float]:
    """(p_H, p_O) of the plain interferometer; ``chi = phi1 - phi0``."""
    t = 1.0 - r
    p_h = r * (a * t * t + b * r * r - 2.0 * r * t * math.sqrt(a * b) * math.cos(chi))
    p_o = r * r * t * (a + b + 2.0 * math.sqrt(a * b) * math.cos(chi))
    return p_h, p_o


def qt_visibility_pure(a: float, b: float) -> float:
    """O-beam visibility with coherent arm attenuations a, b."""
    if a == 0.0 and b == 0.0:
        return 0.0
    return 2.0 * math.sqrt(a * b) / (a + b)


def qt_mixed_chopper(r: float, a: float, chi: float) -> tuple[float, float]:
    """Chopper (mixed-state) O-beam probability and visibility."""
    t = 1.0 - r
    p_o = t * r * r * (1.0 + a + 2.0 * a * math.cos(chi))
    v = 2.0 * a / (1.0 + a)
    return p_o, v


def qt_bell_p_o(r: float, alpha: float, chi: float) -> float:
    """Probability of a spin-up O-beam neutron; ``chi = phi0 - phi1``."""
    t = 1.0 - r
    return t * r * r * (1.0 + math.cos(alpha + chi))


def qt_bell_E(alpha: float, chi: float) -> float:
    """Spin/path correlation of the ideal Bell-test interferometer."""
    return math.cos(alpha + chi)


def qt_bell_S(a1: float, c1: float, a2: float, c2: float) -> float:
    """CHSH combination E(a1,c1) + E(a1,c2) - E(a2,c1) + E(a2,c2)."""
    return (qt_bell_E(a1, c1) + qt_bell_E(a1, c2)
            - qt_bell_E(a2, c1) + qt_bell_E(a2, c2))


def qt_rf(r: float, chi: float, phi: float) -> tuple[float, float]:
    """(p_O, p_H) of the RF experiment with the compensating coil tuned
    so the residual energy phase vanishes; ``phi = phi_rf2 - phi_rf1/2``.

    Note: at R = 0.2 this gives p_H = 0.2*(0.64 + 0.04) = 0.136, not the
    0.19 sometimes quoted for those parameters.
    """
    t = 1.0 - r
    p_o = t * r * r * (1.0 + math.sin(chi + phi))
    p_h = r * (t * t + r * r)
    return p_o, p_h


def qt_shutter_branch_probs(r: float, v: float, chi: float = 0.0) -> dict:
    """Terminal probabilities of the shutter experiment for both shutter
    states, with the fitted visibility ``v`` on the open-state cross term."""
    t = 1.0 - r
    return {
        "open": {
            "O": 2.0 * t * r * r * (1.0 + v * math.cos(chi)),
            "H": r * (t * t + r * r - 2.0 * v * r * t * math.cos(chi)),
            "BS1": t * t,
            "BS2": t * r,
        },
        "closed": {
            "O": t * r * r,
            "H": r ** 3,
            "Cd": t,
            "BS2": r * t,
        },
    }


def qt_shutter_freqs(r: float, v: float, chi: float) -> tuple[float, float]:
    """Relative O-beam frequencies (f_open(chi), f_closed)."""
    t = 1.0 - r
    f_open = 2.0 * t * r * (1.0 + v * math.cos(chi))
    return f_open, t


def qt_shutter_two_population(r1: float, r2: float, w1: float, v: float,
                              chi: float) -> tuple[float, float]:
    """Relative O-beam frequencies of the two-reflection-population model."""
    w2 = 1.0 - w1
    t1 = 1.0 - r1
    t2 = 1.0 - r2
    num = w1 * t1 * r1 * r1 + w2 * t2 * r2 * r2
    f_open = 2.0 * num / (w1 * r1 + w2 * r2) * (1.0 + v * math.cos(chi))
    f_closed = num / (w1 * r1 * r1 + w2 * r2 * r2)
    return f_open, f_closed


class ShutterParamError(ValueError):
    """Raised when the closed-form population solution violates a bound."""


def solve_shutter_params(r1: float, v: float, g: float) -> tuple[float, float]:
    """Solve the two-population constraints max f_open = f_closed = g.

    Given the first reflection coefficient ``r1``, the open-state
    visibility ``v`` and the common plateau ``g``, returns ``(r2, w1)``.
    Raises ShutterParamError if a bound 0 < r1, r2 < 1, 0 <= v, g <= 1,
    0 < w1 < 1 is violated or the closed form is singular.
    """
    if not 0.0 < r1 < 1.0:
        raise ShutterParamError(f"r1 must satisfy 0 < r1 < 1, got {r1}")
    if not 0.0 <= v <= 1.0:
        raise ShutterParamError(f"v must satisfy 0 <= v <= 1, got {v}")
    if not 0.0 <= g <= 1.0:
        raise ShutterParamError(f"g must satisfy 0 <= g <= 1, got {g}")
    den = 1.0 - 2.0 * (1.0 + v) * r1
    if den == 0.0:
        raise ShutterParamError("singular solution: r1 = 1/(2(1+v))")
    r2 = (1.0 - g - r1) / den
    if not 0.0 < r2 < 1.0:
        raise ShutterParamError(f"r2 = {r2} violates 0 < r2 < 1")
    q = -2.0 * v + 2.0 * g * (v + 1.0) - 1.0
    num = (1.0 - g - r1) * q
    denom = (8.0 * (v + 1.0) ** 3 * r1 ** 4
             - 12.0 * (v + 1.0) ** 2 * r1 ** 3
             + 6.0 * (v + 1.0) * r1 ** 2
             - 2.0 * (g + (g - 1.0) * v) * r1
             - (g - 1.0) * q)
    if denom == 0.0:
        raise ShutterParamError("singular solution: degenerate weight equation")
    w1 = num / denom
    if not 0.0 < w1 < 1.0:
        raise ShutterParamError(f"w1 = {w1} violates 0 < w1 < 1")
    return r2, w1
