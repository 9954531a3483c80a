"""Statistical analysis of detection counts: sinusoid fits, visibility
and correlation estimators."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SinusoidFit:
    """Least-squares fit of y = offset + amplitude * cos(chi - phase).

    Solved on the linear basis {1, cos chi, sin chi} via the normal
    equations, so the result is deterministic and exact for noiseless
    sinusoids.
    """
    offset: float
    amplitude: float
    phase: float

    def __call__(self, chi):
        return self.offset + self.amplitude * np.cos(np.asarray(chi) - self.phase)

    @property
    def visibility(self) -> float:
        if self.offset == 0.0:
            return 0.0
        return abs(self.amplitude) / self.offset


def fit_sinusoid(chi, y) -> SinusoidFit:
    chi = np.asarray(chi, dtype=float)
    y = np.asarray(y, dtype=float)
    design = np.column_stack([np.ones_like(chi), np.cos(chi), np.sin(chi)])
    c0, c1, c2 = np.linalg.lstsq(design, y, rcond=None)[0]
    return SinusoidFit(offset=float(c0),
                       amplitude=float(math.hypot(c1, c2)),
                       phase=float(math.atan2(c2, c1)))


def visibility(chi, counts) -> float:
    """Fringe visibility |amplitude| / offset from the sinusoid fit."""
    return fit_sinusoid(chi, counts).visibility


def modulation_amplitude(chi, counts, a: float) -> float:
    """The attenuation-experiment observable (1 + a) V / 2 from a chi sweep."""
    return (1.0 + a) * visibility(chi, counts) / 2.0


def correlation(n_pp: float, n_mm: float, n_pm: float, n_mp: float) -> float:
    """Correlation from the four counts N(a,c), N(a+pi,c+pi), N(a,c+pi),
    N(a+pi,c): (N_pp + N_mm - N_pm - N_mp) / total."""
    total = n_pp + n_mm + n_pm + n_mp
    if total == 0:
        raise ZeroDivisionError("all four counts are zero")
    return (n_pp + n_mm - n_pm - n_mp) / total


def chsh(e_11: float, e_12: float, e_21: float, e_22: float) -> float:
    """CHSH combination E(a1,c1) + E(a1,c2) - E(a2,c1) + E(a2,c2)."""
    return e_11 + e_12 - e_21 + e_22


def chsh_max(alphas, chis, e_grid) -> tuple[float, tuple]:
    """Max |S| over all setting quadruples of the measured E grid.

    ``e_grid[i][j]`` is E(alphas[i], chis[j]).  Returns (S, settings)
    for the quadruple with the largest |S|; the sign of S is kept.
    """
    e = np.asarray(e_grid, dtype=float)
    best = 0.0
    best_settings = None
    for i1, i2 in itertools.product(range(len(alphas)), repeat=2):
        for j1, j2 in itertools.product(range(len(chis)), repeat=2):
            s = chsh(e[i1, j1], e[i1, j2], e[i2, j1], e[i2, j2])
            if abs(s) > abs(best):
                best = s
                best_settings = (alphas[i1], chis[j1], alphas[i2], chis[j2])
    return best, best_settings


def binomial_stderr(count: float, n: int) -> float:
    """Standard error of a count of n Bernoulli trials."""
    if n <= 0:
        return 0.0
    p = min(max(count / n, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / n)
