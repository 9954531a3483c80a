"""Wiring of the event processors into the interferometry experiments.

Every run is strictly sequential: the source emits a particle only
after the previous one reached a terminal (detector, loss port or
absorber).  Port wiring of the four splitters:

    source -> BS0 port 0
    BS0 out 0 (transmitted, "arm A") -> [absorber/chopper/shutter]
        -> BS1 port 0;  BS1 out 0 -> loss, out 1 -> phase phi0 -> BS3 port 0
    BS0 out 1 (reflected, "arm B")
        -> BS2 port 1;  BS2 out 1 -> loss, out 0 -> phase phi1 -> BS3 port 1
    BS3 out 0 -> H detector, out 1 -> O detector

which reproduces the quantum-oracle path layout (arm A = paths 0/2,
arm B = paths 1/3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import oracle
from .analysis import (SinusoidFit, binomial_stderr, chsh, chsh_max,
                       correlation, fit_sinusoid, modulation_amplitude)
from .components import (Counters, ShutterState, SourceConfig, emit_message,
                         spin_analyze_up)
from .dlm import DlmSplitter
from .messages import SPIN_UP, rf_flip, spin_rotate_x, spin_turn_mu_metal
from .rng import RngStreams

TWO_PI = 2.0 * math.pi

# Terminal labels (conservation: every emitted particle ends in exactly one).
TERMINALS = ("O", "H", "loss_bs1", "loss_bs2", "absorbed", "rejected")


@dataclass
class ExperimentRecord:
    """Counts and derived statistics of one experiment run."""
    experiment: str
    config: dict
    seed: int
    rows: list = field(default_factory=list)
    derived: dict = field(default_factory=dict)


class Interferometer:
    """The four learning beam splitters of one interferometer."""

    def __init__(self, gamma: float, reflection: float,
                 gamma_overrides: dict[int, float] | None = None):
        gammas = {i: gamma for i in range(4)}
        if gamma_overrides:
            gammas.update(gamma_overrides)
        self.splitters = [DlmSplitter(gammas[i], reflection) for i in range(4)]
        self.bs0, self.bs1, self.bs2, self.bs3 = self.splitters


def _check_conservation(counters: Counters) -> None:
    total = counters.total()
    if total != counters.emitted:
        raise AssertionError(
            f"particle conservation violated: emitted {counters.emitted}, "
            f"terminal {total}")


def _sorted_settings(values) -> list[float]:
    """Unique, sorted angles mod 2*pi (12-decimal rounding)."""
    out = sorted({round(v % TWO_PI, 12) for v in values})
    return [float(v) for v in out]


def _closed_under_pi(values) -> list[float]:
    return _sorted_settings(list(values) + [v + math.pi for v in values])


# ---------------------------------------------------------------------------
# Plain interferometer


def run_mzi(r: float, gamma: float, delta_noise: float, chi_grid,
            n: int, seed: int, reset_per_setting: bool = False,
            nu: float = 0.0) -> ExperimentRecord:
    """Fringe scan of the plain interferometer.

    Arm A keeps phase 0, arm B gets phase chi, so chi = phi1 - phi0 as
    in the closed-form prediction.
    """
    chi_grid = [float(c) for c in chi_grid]
    streams = RngStreams(seed)
    src_cfg = SourceConfig(n_particles=n, coherence_noise_halfwidth=delta_noise)
    ifm = Interferometer(gamma, r)
    bs0, bs1, bs2, bs3 = ifm.splitters
    us = streams.splitter.uniform
    counters = Counters()
    for chi in chi_grid:
        if reset_per_setting:
            ifm = Interferometer(gamma, r)
            bs0, bs1, bs2, bs3 = ifm.splitters
        pb = complex(math.cos(chi), math.sin(chi))
        for _ in range(n):
            counters.emitted += 1
            msg = emit_message(src_cfg, streams.source)
            port, m = bs0.process(0, msg, us())
            if port == 0:
                port, m = bs1.process(0, m, us())
                if port == 0:
                    counters.record(chi, "loss_bs1")
                    continue
                port, m = bs3.process(0, m, us())
            else:
                port, m = bs2.process(1, m, us())
                if port == 1:
                    counters.record(chi, "loss_bs2")
                    continue
                m = (pb * m[0], pb * m[1])
                port, m = bs3.process(1, m, us())
            counters.record(chi, "O" if port == 1 else "H")
    _check_conservation(counters)

    rows = []
    for chi in chi_grid:
        p_h, p_o = oracle.qt_mzi(r, 1.0, 1.0, chi)
        for beam, p in (("O", p_o), ("H", p_h)):
            c = counters.get(chi, beam)
            rows.append({"chi": chi, "beam": beam, "label": "", "count": c,
                         "normalized": c / n, "oracle": p,
                         "stderr": binomial_stderr(c, n)})
    derived = {"terminal_counts": _terminal_totals(counters)}
    if chi_grid:
        o_counts = [counters.get(chi, "O") / n for chi in chi_grid]
        fit = fit_sinusoid(chi_grid, o_counts)
        derived["o_fit"] = {"offset": fit.offset, "amplitude": fit.amplitude,
                            "phase": fit.phase, "visibility": fit.visibility}
    record = ExperimentRecord(
        "mzi",
        {"r": r, "gamma": gamma, "delta_noise": delta_noise,
         "chi_grid": chi_grid, "n": n, "nu": nu,
         "reset_per_setting": reset_per_setting},
        seed, rows, derived)
    return record


def _terminal_totals(counters: Counters) -> dict:
    """Aggregate terminal counts over all settings, plus emitted."""
    totals = {t: 0 for t in TERMINALS}
    for (_, terminal, _), c in counters.counts.items():
        totals[terminal] += c
    totals["emitted"] = counters.emitted
    return totals


# ---------------------------------------------------------------------------
# Stochastic absorber and chopper


def run_absorber(kind: str, r: float, gamma: float, a_grid, n_pc: int,
                 n_c: int, chi_grid, seed: int) -> ExperimentRecord:
    """Attenuation scan: modulation amplitude (1+a)V/2 versus the pass
    fraction ``a`` of the absorber ("stochastic") or chopper ("chopper").

    The chopper run sends n_pc particles per open/close cycle with
    Poisson arrival times over n_c cycles.
    """
    if kind not in ("stochastic", "chopper"):
        raise ValueError(f"unknown absorber kind {kind!r}")
    a_grid = [float(a) for a in a_grid]
    chi_grid = [float(c) for c in chi_grid]
    n = n_pc * n_c
    streams = RngStreams(seed)
    us = streams.splitter.uniform
    ua = streams.absorber.uniform
    counters = Counters()
    ifm = Interferometer(gamma, r)
    bs0, bs1, bs2, bs3 = ifm.splitters
    for a in a_grid:
        for chi in chi_grid:
            if kind == "chopper":
                times = streams.arrival.uniform_array(n) * n_c
                times.sort()
            pb = complex(math.cos(chi), math.sin(chi))
            key = (a, chi)
            for i in range(n):
                counters.emitted += 1
                port, m = bs0.process(0, SPIN_UP, us())
                if port == 0:
                    if kind == "stochastic":
                        passed = ua() < a
                    else:
                        ti = times[i]
                        passed = (ti - math.floor(ti)) < a
                    if not passed:
                        counters.record(key, "absorbed")
                        continue
                    port, m = bs1.process(0, m, us())
                    if port == 0:
                        counters.record(key, "loss_bs1")
                        continue
                    port, m = bs3.process(0, m, us())
                else:
                    port, m = bs2.process(1, m, us())
                    if port == 1:
                        counters.record(key, "loss_bs2")
                        continue
                    m = (pb * m[0], pb * m[1])
                    port, m = bs3.process(1, m, us())
                counters.record(key, "O" if port == 1 else "H")
    _check_conservation(counters)

    rows = []
    amplitudes = []
    for a in a_grid:
        o_counts = [counters.get((a, chi), "O") / n for chi in chi_grid]
        amp = modulation_amplitude(chi_grid, o_counts, a)
        amplitudes.append(amp)
        for chi in chi_grid:
            if kind == "stochastic":
                p_h, p_o = oracle.qt_mzi(r, a, 1.0, chi)
            else:
                p_o, _ = oracle.qt_mixed_chopper(r, a, chi)
                t = 1.0 - r
                p_h = (r * (a * t * t + r * r)
                       - 2.0 * a * r * r * t * math.cos(chi))
            for beam in ("O", "H"):
                c = counters.get((a, chi), beam)
                p = p_o if beam == "O" else p_h
                rows.append({"a": a, "chi": chi, "beam": beam, "label": "",
                             "count": c, "normalized": c / n, "oracle": p,
                             "stderr": binomial_stderr(c, n)})
    pure = [math.sqrt(a) for a in a_grid]
    mixed = list(a_grid)
    record = ExperimentRecord(
        "absorber",
        {"kind": kind, "r": r, "gamma": gamma, "a_grid": a_grid,
         "n_pc": n_pc, "n_c": n_c, "chi_grid": chi_grid},
        seed, rows,
        {"modulation_amplitude": dict(zip(map(str, a_grid), amplitudes)),
         "rms_vs_sqrt_a": _rms(amplitudes, pure),
         "rms_vs_linear_a": _rms(amplitudes, mixed),
         "terminal_counts": _terminal_totals(counters)})
    return record


def _rms(x, y) -> float:
    d = np.asarray(x) - np.asarray(y)
    return float(np.sqrt(np.mean(d * d)))


# ---------------------------------------------------------------------------
# Bell-CHSH experiment


def _transit_bell(splitters, pa, pb, alpha, us, ua, counters, key,
                  phi_rf1=None, phi_rf2=None) -> None:
    """One particle through the Bell/RF interferometer variant.

    ``pa``/``pb`` are the precomputed arm phase factors.  With
    ``phi_rf1`` None the mu-metal pair is active (Bell layout), else
    RF coils (energy-manipulation layout).  O-beam particles pass the
    spin rotator by ``alpha`` about x and the spin-up analyzer.
    """
    bs0, bs1, bs2, bs3 = splitters
    counters.emitted += 1
    port, m = bs0.process(0, SPIN_UP, us())
    if port == 0:
        if phi_rf1 is None:
            m = spin_turn_mu_metal(m, -1)
        else:
            m = rf_flip(m, phi_rf1)
        port, m = bs1.process(0, m, us())
        if port == 0:
            counters.record(key, "loss_bs1")
            return
        m = (pa * m[0], pa * m[1])
        port, m = bs3.process(0, m, us())
    else:
        if phi_rf1 is None:
            m = spin_turn_mu_metal(m, +1)
        port, m = bs2.process(1, m, us())
        if port == 1:
            counters.record(key, "loss_bs2")
            return
        m = (pb * m[0], pb * m[1])
        port, m = bs3.process(1, m, us())
    if port == 0:
        counters.record(key, "H")
        return
    if phi_rf2 is not None:
        m = rf_flip(m, phi_rf2)
    m = spin_rotate_x(m, alpha)
    if spin_analyze_up(m, ua()):
        counters.record(key, "O")
    else:
        counters.record(key, "rejected")


def run_bell(r: float, gamma: float, alpha_grid, chi_grid, n: int,
             seed: int) -> ExperimentRecord:
    """Spin/path correlation scan.

    The grids are closed under +pi internally so every E(alpha, chi)
    has its three partner counts.  Arm A carries phase chi (phi0),
    arm B phase 0, matching E = cos(alpha + chi) with chi = phi0 - phi1.
    """
    alphas = _closed_under_pi(alpha_grid)
    chis = _closed_under_pi(chi_grid)
    streams = RngStreams(seed)
    us = streams.splitter.uniform
    ua = streams.analyzer.uniform
    counters = Counters()
    ifm = Interferometer(gamma, r)
    for alpha in alphas:
        for chi in chis:
            pa = complex(math.cos(chi), math.sin(chi))
            for _ in range(n):
                _transit_bell(ifm.splitters, pa, 1.0 + 0.0j, alpha, us, ua,
                              counters, (alpha, chi))
    _check_conservation(counters)
    return _bell_record("bell", r, gamma, alphas, chis, n, seed, counters,
                        {"alpha_grid": list(alphas), "chi_grid": list(chis),
                         "r": r, "gamma": gamma, "n": n})


def _bell_record(name, r, gamma, alphas, chis, n, seed, counters,
                 config) -> ExperimentRecord:
    rows = []
    for alpha in alphas:
        for chi in chis:
            c = counters.get((alpha, chi), "O")
            tot = (c + counters.get((alpha, chi), "H")
                   + counters.get((alpha, chi), "loss_bs1")
                   + counters.get((alpha, chi), "loss_bs2")
                   + counters.get((alpha, chi), "rejected"))
            rows.append({"alpha": alpha, "chi": chi, "beam": "O", "label": "",
                         "count": c,
                         "normalized": c / tot if tot else 0.0,
                         "oracle": oracle.qt_bell_p_o(r, alpha, chi),
                         "stderr": binomial_stderr(c, tot)})
    pi = math.pi
    e_grid = np.empty((len(alphas), len(chis)))
    for i, alpha in enumerate(alphas):
        for j, chi in enumerate(chis):
            ap = round((alpha + pi) % TWO_PI, 12)
            cp = round((chi + pi) % TWO_PI, 12)
            e_grid[i, j] = correlation(
                counters.get((alpha, chi), "O"),
                counters.get((ap, cp), "O"),
                counters.get((alpha, cp), "O"),
                counters.get((ap, chi), "O"))
    s_max, s_settings = chsh_max(alphas, chis, e_grid)
    derived = {"alphas": list(alphas), "chis": list(chis),
               "E": e_grid.tolist(), "S_max": s_max,
               "S_max_settings": list(s_settings),
               "terminal_counts": _terminal_totals(counters)}
    # S at the canonical CHSH quadruple whenever the grid contains it.
    canonical = tuple(round(v % TWO_PI, 12)
                      for v in (0.0, pi / 4.0, pi / 2.0, -pi / 4.0))
    a1, c1, a2, c2 = canonical
    if a1 in alphas and a2 in alphas and c1 in chis and c2 in chis:
        derived["S_canonical"] = chsh(
            e_grid[alphas.index(a1), chis.index(c1)],
            e_grid[alphas.index(a1), chis.index(c2)],
            e_grid[alphas.index(a2), chis.index(c1)],
            e_grid[alphas.index(a2), chis.index(c2)])
        derived["S_canonical_settings"] = list(canonical)
    return ExperimentRecord(name, config, seed, rows, derived)


def run_bell_random_chi(r: float, gamma: float, alpha_grid, chi_grid,
                        n_per_alpha: int, seed: int) -> ExperimentRecord:
    """Bell scan with chi drawn per particle from the setting grid.

    Counts are keyed by the drawn chi; the correlation amplitude halves
    relative to the fixed-chi protocol.
    """
    alphas = _closed_under_pi(alpha_grid)
    chis = _closed_under_pi(chi_grid)
    streams = RngStreams(seed)
    us = streams.splitter.uniform
    ua = streams.analyzer.uniform
    uc = streams.setting.uniform
    counters = Counters()
    ifm = Interferometer(gamma, r)
    n_chi = len(chis)
    phase = [complex(math.cos(c), math.sin(c)) for c in chis]
    for alpha in alphas:
        for _ in range(n_per_alpha):
            j = min(int(uc() * n_chi), n_chi - 1)
            _transit_bell(ifm.splitters, phase[j], 1.0 + 0.0j, alpha, us, ua,
                          counters, (alpha, chis[j]))
    _check_conservation(counters)
    record = _bell_record("bell-random-chi", r, gamma, alphas, chis,
                          n_per_alpha, seed, counters,
                          {"alpha_grid": list(alphas), "chi_grid": list(chis),
                           "r": r, "gamma": gamma, "n_per_alpha": n_per_alpha})
    e = np.asarray(record.derived["E"])
    phases = np.add.outer(alphas, chis).ravel()
    fit = fit_sinusoid(phases, e.ravel())
    record.derived["e_fit_amplitude"] = fit.amplitude
    return record


# ---------------------------------------------------------------------------
# RF (spin/phase/energy) experiment


def run_rf(r: float, gamma: float, phi_grid, chi_grid, n: int,
           seed: int) -> ExperimentRecord:
    """Double-coil energy-manipulation scan over (phi, chi).

    phi is realized as the phase of the second coil with the first coil
    phase zero; the compensating phase is tuned away, so the prediction
    is p_O = TR^2 [1 + sin(chi + phi)].
    """
    phis = _sorted_settings(phi_grid)
    chis = _sorted_settings(chi_grid)
    streams = RngStreams(seed)
    us = streams.splitter.uniform
    ua = streams.analyzer.uniform
    counters = Counters()
    ifm = Interferometer(gamma, r)
    for phi in phis:
        for chi in chis:
            pa = complex(math.cos(chi), math.sin(chi))
            for _ in range(n):
                _transit_bell(ifm.splitters, pa, 1.0 + 0.0j, math.pi / 2.0,
                              us, ua, counters, (phi, chi),
                              phi_rf1=0.0, phi_rf2=phi)
    _check_conservation(counters)
    rows = []
    for phi in phis:
        for chi in chis:
            p_o, p_h = oracle.qt_rf(r, chi, phi)
            for beam, p in (("O", p_o), ("H", p_h)):
                c = counters.get((phi, chi), beam)
                rows.append({"phi": phi, "chi": chi, "beam": beam,
                             "label": "", "count": c, "normalized": c / n,
                             "oracle": p, "stderr": binomial_stderr(c, n)})
    return ExperimentRecord(
        "rf",
        {"r": r, "gamma": gamma, "phi_grid": list(phis),
         "chi_grid": list(chis), "n": n},
        seed, rows, {"terminal_counts": _terminal_totals(counters)})


# ---------------------------------------------------------------------------
# Low-counting-rate experiment


def run_low_count(r: float, gamma: float, chi_settings, budget: int,
                  n_replicas: int, seed: int) -> ExperimentRecord:
    """Interference patterns from a small number of neutrons.

    Each replica steps through the phase settings at regular intervals
    (``budget`` emissions per setting) with its own processor state and
    RNG substream; O counts per setting are fit to a sinusoid, per
    replica and for the replica average.
    """
    chi_settings = [float(c) for c in chi_settings]
    all_counts = np.zeros((n_replicas, len(chi_settings)), dtype=int)
    for rep in range(n_replicas):
        streams = RngStreams(seed, cell=rep)
        us = streams.splitter.uniform
        ifm = Interferometer(gamma, r)
        bs0, bs1, bs2, bs3 = ifm.splitters
        counters = Counters()
        for j, chi in enumerate(chi_settings):
            pb = complex(math.cos(chi), math.sin(chi))
            for _ in range(budget):
                counters.emitted += 1
                port, m = bs0.process(0, SPIN_UP, us())
                if port == 0:
                    port, m = bs1.process(0, m, us())
                    if port == 0:
                        counters.record(chi, "loss_bs1")
                        continue
                    port, m = bs3.process(0, m, us())
                else:
                    port, m = bs2.process(1, m, us())
                    if port == 1:
                        counters.record(chi, "loss_bs2")
                        continue
                    m = (pb * m[0], pb * m[1])
                    port, m = bs3.process(1, m, us())
                counters.record(chi, "O" if port == 1 else "H")
            all_counts[rep, j] = counters.get(chi, "O")
        _check_conservation(counters)

    mean_counts = all_counts.mean(axis=0)
    std_counts = all_counts.std(axis=0, ddof=1) if n_replicas > 1 else \
        np.zeros(len(chi_settings))
    avg_fit = fit_sinusoid(chi_settings, mean_counts)
    replica_fits = [fit_sinusoid(chi_settings, c) for c in all_counts]
    rows = []
    for rep in range(n_replicas):
        for j, chi in enumerate(chi_settings):
            _, p_o = oracle.qt_mzi(r, 1.0, 1.0, chi)
            c = int(all_counts[rep, j])
            rows.append({"replica": rep, "chi": chi, "beam": "O",
                         "label": "", "count": c,
                         "normalized": c / budget, "oracle": p_o,
                         "stderr": binomial_stderr(c, budget)})
    return ExperimentRecord(
        "lowcount",
        {"r": r, "gamma": gamma, "chi_settings": chi_settings,
         "budget": budget, "n_replicas": n_replicas},
        seed, rows,
        {"mean_counts": mean_counts.tolist(),
         "std_counts": std_counts.tolist(),
         "avg_fit": {"offset": avg_fit.offset,
                     "amplitude": avg_fit.amplitude,
                     "phase": avg_fit.phase},
         "replica_fits": [{"offset": f.offset, "amplitude": f.amplitude,
                           "phase": f.phase} for f in replica_fits]})


# ---------------------------------------------------------------------------
# Shutter (time-dependent beam blocking) experiment


def run_shutter(reflection, gamma: float, chi_grid, n: int, mode: str,
                seed: int, reset_mode: str = "reset-x-to-zero"
                ) -> ExperimentRecord:
    """Interferometer with a Cd shutter on arm A.

    ``reflection`` is a single coefficient or a ``(r1, r2, w1)``
    two-population triple assigning each particle its own reflection.
    ``mode`` is always_open, always_closed or random_toggle; toggling
    happens with probability 1/2 at each O/H detection and closing the
    shutter disturbs the splitters per ``reset_mode``.
    """
    if mode not in ("always_open", "always_closed", "random_toggle"):
        raise ValueError(f"unknown shutter mode {mode!r}")
    chi_grid = [float(c) for c in chi_grid]
    two_pop = not isinstance(reflection, (int, float))
    if two_pop:
        r1, r2, w1 = reflection
        r_base = r1
    else:
        r_base = float(reflection)
    streams = RngStreams(seed)
    us = streams.splitter.uniform
    ush = streams.shutter.uniform
    upop = streams.source.uniform
    counters = Counters()
    ifm = Interferometer(gamma, r_base)
    bs0, bs1, bs2, bs3 = ifm.splitters
    shutter = ShutterState(open=(mode != "always_closed"),
                           reset_mode=reset_mode)
    toggling = mode == "random_toggle"
    for chi in chi_grid:
        pb = complex(math.cos(chi), math.sin(chi))
        for _ in range(n):
            counters.emitted += 1
            rr = (r1 if upop() < w1 else r2) if two_pop else None
            port, m = bs0.process(0, SPIN_UP, us(), rr)
            if port == 0:
                if not shutter.open:
                    counters.record(chi, "absorbed")
                    continue
                port, m = bs1.process(0, m, us(), rr)
                if port == 0:
                    counters.record(chi, "loss_bs1")
                    continue
                port, m = bs3.process(0, m, us(), rr)
            else:
                port, m = bs2.process(1, m, us(), rr)
                if port == 1:
                    counters.record(chi, "loss_bs2")
                    continue
                m = (pb * m[0], pb * m[1])
                port, m = bs3.process(1, m, us(), rr)
            label = "open" if shutter.open else "closed"
            counters.record(chi, "O" if port == 1 else "H", label)
            if toggling:
                shutter.on_detection(ush(), ifm.splitters)
    _check_conservation(counters)

    labels = {"always_open": ("open",), "always_closed": ("closed",),
              "random_toggle": ("open", "closed")}[mode]
    rows = []
    freqs = {}
    for label in labels:
        freqs[label] = []
        for chi in chi_grid:
            c_o = counters.get(chi, "O", label)
            c_h = counters.get(chi, "H", label)
            tot = c_o + c_h
            f = c_o / tot if tot else 0.0
            freqs[label].append(f)
            if two_pop:
                f_open, f_closed = oracle.qt_shutter_two_population(
                    r1, r2, w1, 1.0, chi)
            else:
                f_open, f_closed = oracle.qt_shutter_freqs(r_base, 1.0, chi)
            p_oracle = f_open if label == "open" else f_closed
            for beam, c in (("O", c_o), ("H", c_h)):
                rows.append({"chi": chi, "beam": beam, "label": label,
                             "count": c, "normalized": f if beam == "O" else
                             (1.0 - f if tot else 0.0),
                             "oracle": p_oracle if beam == "O" else
                             1.0 - p_oracle,
                             "stderr": binomial_stderr(c_o, tot)})
    derived = {"chi_grid": chi_grid,
               "terminal_counts": _terminal_totals(counters)}
    for label, f in freqs.items():
        fit = fit_sinusoid(chi_grid, f)
        derived[label] = {
            "relative_frequency": f,
            "fit": {"offset": fit.offset, "amplitude": fit.amplitude,
                    "phase": fit.phase},
            "visibility": fit.visibility,
            "max": max(f),
            "mean": float(np.mean(f)),
        }
    config = {"gamma": gamma, "chi_grid": chi_grid, "n": n, "mode": mode,
              "reset_mode": reset_mode}
    if two_pop:
        config.update({"r1": r1, "r2": r2, "w1": w1})
    else:
        config["r"] = r_base
    return ExperimentRecord("shutter", config, seed, rows, derived)
