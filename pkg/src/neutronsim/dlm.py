"""Deterministic-learning-machine beam splitter.

Each splitter is a three-stage event processor: a learning input stage
that tracks the relative arrival frequency of the two input ports with
an exponential moving average and remembers the last message seen on
each port, a linear transformation stage that combines the stored data
into four output amplitudes, and an output stage that picks the exit
port with a uniform random number and re-normalizes the message.
"""

from __future__ import annotations

import math

import numpy as np

from .messages import Message, SPIN_UP


class ColdStartError(RuntimeError):
    """Raised when the selected output branch has zero norm and the
    outgoing message cannot be normalized."""


class DlmSplitter:
    """Event-based beam splitter with learning parameter ``gamma`` and
    reflection probability ``reflection`` (transmission is 1 - R).

    State: ``x0``/``x1`` estimate the port arrival frequencies,
    ``y0``/``y1`` hold the last message per port.  Cold start is
    x = (0, 0) with both registers spin-up.
    """

    __slots__ = ("gamma", "reflection", "x0", "x1", "y0", "y1", "_saved_gamma")

    def __init__(self, gamma: float, reflection: float):
        if not 0.0 <= gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {gamma}")
        if not 0.0 <= reflection <= 1.0:
            raise ValueError(f"reflection must be in [0, 1], got {reflection}")
        self.gamma = gamma
        self.reflection = reflection
        self.x0 = 0.0
        self.x1 = 0.0
        self.y0: Message = SPIN_UP
        self.y1: Message = SPIN_UP
        self._saved_gamma: float | None = None

    def reset_frequencies(self) -> None:
        self.x0 = 0.0
        self.x1 = 0.0

    def suspend_learning(self) -> None:
        """Drop gamma to zero until the next message is sent out."""
        if self._saved_gamma is None:
            self._saved_gamma = self.gamma
        self.gamma = 0.0

    def update(self, port: int, m: Message) -> None:
        """Learning stage: store the message on its port and relax the
        frequency estimate towards the port indicator."""
        g = self.gamma
        if port == 0:
            self.y0 = m
            self.x0 = g * self.x0 + (1.0 - g)
            self.x1 = g * self.x1
        else:
            self.y1 = m
            self.x0 = g * self.x0
            self.x1 = g * self.x1 + (1.0 - g)

    def transform(self, reflection: float | None = None) -> tuple[complex, complex, complex, complex]:
        """Transformation stage.

        Returns the four amplitudes ``(Z01, Z11, Z02, Z12)``: output port
        0/1, spin component 1/2.  Transmission keeps the port, reflection
        crosses it with a factor ``i sqrt(R)``; each register is weighted
        by the square root of its estimated arrival frequency.
        """
        r = self.reflection if reflection is None else reflection
        st = math.sqrt(1.0 - r)
        sr = math.sqrt(r)
        w0 = math.sqrt(self.x0)
        w1 = math.sqrt(self.x1)
        a1 = w0 * self.y0[0]
        a2 = w0 * self.y0[1]
        b1 = w1 * self.y1[0]
        b2 = w1 * self.y1[1]
        return (
            st * a1 + 1j * sr * b1,
            1j * sr * a1 + st * b1,
            st * a2 + 1j * sr * b2,
            1j * sr * a2 + st * b2,
        )

    @staticmethod
    def select_output(z: tuple[complex, complex, complex, complex],
                      u: float) -> tuple[int, Message]:
        """Output stage: port 1 iff ``|Z11|^2 + |Z12|^2 > u``, outgoing
        message is the selected branch normalized to unit length."""
        z01, z11, z02, z12 = z
        w1 = (z11 * z11.conjugate() + z12 * z12.conjugate()).real
        if w1 > u:
            n = math.sqrt(w1)
            if n == 0.0:
                raise ColdStartError("selected output branch has zero norm")
            return 1, (z11 / n, z12 / n)
        w0 = (z01 * z01.conjugate() + z02 * z02.conjugate()).real
        n = math.sqrt(w0)
        if n == 0.0:
            raise ColdStartError("selected output branch has zero norm")
        return 0, (z01 / n, z02 / n)

    def process(self, port: int, m: Message, u: float,
                reflection: float | None = None) -> tuple[int, Message]:
        """Full event: learn, transform, select."""
        self.update(port, m)
        out = self.select_output(self.transform(reflection), u)
        if self._saved_gamma is not None:
            self.gamma = self._saved_gamma
            self._saved_gamma = None
        return out


def learning_trace(p_port0: float, gamma: float, n_events: int,
                   switch_at: int | None = None, p_after: float | None = None,
                   seed: int | None = None, rng=None) -> np.ndarray:
    """Trace of the frequency estimate x0 under Bernoulli port input.

    Events ``n < switch_at`` hit port 0 with probability ``p_port0``,
    later events with probability ``p_after``.  Returns the x0 value
    after each of the ``n_events`` updates.
    """
    if not 0.0 <= p_port0 <= 1.0:
        raise ValueError("p_port0 must be a probability")
    if p_after is not None and not 0.0 <= p_after <= 1.0:
        raise ValueError("p_after must be a probability")
    if rng is None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    s = DlmSplitter(gamma, 0.5)
    draws = rng.random(n_events)
    trace = np.empty(n_events)
    p = p_port0
    for n in range(n_events):
        if switch_at is not None and n == switch_at:
            p = p_after if p_after is not None else p_port0
        s.update(0 if draws[n] < p else 1, SPIN_UP)
        trace[n] = s.x0
    return trace
