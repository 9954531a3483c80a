"""Non-splitter hardware: source, absorbers, chopper, shutter, spin
analyzer and detection counters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .messages import Message, make_message
from .rng import RandomStream


@dataclass
class SourceConfig:
    """Beam preparation: number of particles, coherence noise half-width
    (radians; 0 means fully coherent) and the common initial spin angles."""
    n_particles: int
    coherence_noise_halfwidth: float = 0.0
    initial_spin: tuple[float, float, float] = (0.0, 0.0, 0.0)  # psi1, psi2, theta
    arrival_model: str = "uniform-sequential"  # or "poisson-over-interval"
    n_intervals: int = 1

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if self.coherence_noise_halfwidth < 0.0:
            raise ValueError("coherence_noise_halfwidth must be >= 0")
        if self.arrival_model not in ("uniform-sequential", "poisson-over-interval"):
            raise ValueError(f"unknown arrival_model {self.arrival_model!r}")


@dataclass
class Particle:
    """A message plus trajectory metadata."""
    message: Message
    flight_time: float = 0.0
    arrival_time: float = 0.0
    labels: frozenset = frozenset()


def emit_message(cfg: SourceConfig, rng: RandomStream) -> Message:
    """Create one initial message; phase noise is drawn uniformly from
    [-delta, delta] independently for each of the two phase angles."""
    psi1, psi2, theta = cfg.initial_spin
    d = cfg.coherence_noise_halfwidth
    if d > 0.0:
        psi1 = psi1 + (2.0 * rng.uniform() - 1.0) * d
        psi2 = psi2 + (2.0 * rng.uniform() - 1.0) * d
    return make_message(psi1, psi2, theta)


def arrival_times(cfg: SourceConfig, rng: RandomStream) -> np.ndarray:
    """Chronologically sorted arrival times of the whole beam.

    Uniform draws over [0, n_intervals], one interval being one chopper
    open/close cycle; to a very good approximation the interarrival
    times are then exponential (Poisson arrivals).
    """
    if cfg.arrival_model == "uniform-sequential":
        return np.arange(cfg.n_particles, dtype=float)
    t = rng.uniform_array(cfg.n_particles) * cfg.n_intervals
    t.sort()
    return t


def stochastic_absorb(a: float, u: float) -> bool:
    """True iff the particle passes the stochastic absorber (u < a)."""
    if not 0.0 <= a <= 1.0:
        raise ValueError("pass fraction must be in [0, 1]")
    return u < a


@dataclass
class ChopperConfig:
    """Rotating absorber, open during the leading fraction ``pass_fraction``
    of each unit cycle."""
    pass_fraction: float

    def __post_init__(self):
        if not 0.0 <= self.pass_fraction <= 1.0:
            raise ValueError("pass_fraction must be in [0, 1]")


def chopper_passes(cfg: ChopperConfig, t: float) -> bool:
    """True iff the chopper is open at arrival time ``t`` (cycle units)."""
    if t < 0.0:
        raise ValueError("arrival time must be >= 0")
    return (t - math.floor(t)) < cfg.pass_fraction


RESET_X_TO_ZERO = "reset-x-to-zero"
GAMMA_ZERO_UNTIL_NEXT_OUTPUT = "gamma-zero-until-next-output"
RESET_MODES = (RESET_X_TO_ZERO, GAMMA_ZERO_UNTIL_NEXT_OUTPUT)


@dataclass
class ShutterState:
    """Cd shutter on the arm via BS1; toggles with probability 1/2 at
    each detection and disturbs the splitters when it closes."""
    open: bool = True
    reset_mode: str = RESET_X_TO_ZERO

    def __post_init__(self):
        if self.reset_mode not in RESET_MODES:
            raise ValueError(f"unknown reset_mode {self.reset_mode!r}")

    def on_detection(self, u: float, splitters) -> None:
        if u < 0.5:
            was_open = self.open
            self.open = not self.open
            if was_open:
                for s in splitters:
                    if self.reset_mode == RESET_X_TO_ZERO:
                        s.reset_frequencies()
                    else:
                        s.suspend_learning()


def spin_analyze_up(m: Message, u: float) -> bool:
    """Accept iff the spin-up population exceeds the random number."""
    c_up = m[0]
    return (c_up * c_up.conjugate()).real > u


@dataclass
class Counters:
    """Per-(setting, beam/terminal, label) event counts."""
    counts: dict = field(default_factory=dict)
    emitted: int = 0

    def record(self, setting, terminal: str, label: str = "") -> None:
        key = (setting, terminal, label)
        self.counts[key] = self.counts.get(key, 0) + 1

    def total(self, terminal: str | None = None) -> int:
        if terminal is None:
            return sum(self.counts.values())
        return sum(v for (_, t, _), v in self.counts.items() if t == terminal)

    def get(self, setting, terminal: str, label: str = "") -> int:
        return self.counts.get((setting, terminal, label), 0)
