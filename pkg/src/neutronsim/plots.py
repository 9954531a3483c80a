"""Figure rendering for the CLI report path.

Each experiment gets one PNG next to the delimited output, comparing
simulation counts with the built-in theory curves.  Uses the Agg
backend so rendering works headless.
"""

from __future__ import annotations

import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _rows(record, **match):
    out = [r for r in record.rows
           if all(r.get(k) == v for k, v in match.items())]
    return out


def _fringe_axes(ax, chi, sim, theory, label):
    ax.plot(chi, sim, "o", label=f"simulation ({label})")
    if theory is not None:
        dense = np.linspace(min(chi), max(chi), 200)
        ax.plot(dense, theory(dense), "-", label="theory")
    ax.set_xlabel("phase shift chi (rad)")
    ax.legend(fontsize=8)


def plot_record(record, path) -> None:
    """Render the figure for one experiment record to ``path``."""
    fn = _PLOTTERS.get(record.experiment)
    if fn is None:
        raise ValueError(f"no figure defined for {record.experiment!r}")
    fig = fn(record)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


def _plot_mzi(record):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    chi = record.config["chi_grid"]
    for ax, beam in zip(axes, ("O", "H")):
        rows = _rows(record, beam=beam)
        sim = [r["normalized"] for r in rows]
        th = np.array([r["oracle"] for r in rows])
        ax.plot(chi, sim, "o", label="simulation")
        ax.plot(chi, th, "-", label="theory")
        ax.set_title(f"{beam}-beam")
        ax.set_xlabel("chi (rad)")
        ax.set_ylabel("normalized count")
        ax.legend(fontsize=8)
    return fig


def _plot_absorber(record):
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    amp = record.derived["modulation_amplitude"]
    a = np.array([float(k) for k in amp])
    ax.plot(a, [amp[k] for k in amp], "o", label="simulation")
    dense = np.linspace(0, 1, 200)
    ax.plot(dense, np.sqrt(dense), "-", label="sqrt(a) (pure state)")
    ax.plot(dense, dense, "--", label="a (mixed state)")
    ax.set_xlabel("pass fraction a")
    ax.set_ylabel("modulation amplitude (1+a)V/2")
    ax.set_title(record.config["kind"])
    ax.legend(fontsize=8)
    return fig


def _plot_bell(record):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    alphas = record.derived["alphas"]
    chis = np.array(record.derived["chis"])
    e = np.array(record.derived["E"])
    for i, alpha in enumerate(alphas):
        ax.plot(chis, e[i], "o--", label=f"alpha={alpha:.2f}")
    dense = np.linspace(0, 2 * math.pi, 200)
    ax.plot(dense, np.cos(dense), "k-", lw=0.8, label="cos(alpha+chi)")
    ax.set_xlabel("chi (rad)")
    ax.set_ylabel("correlation E")
    ax.legend(fontsize=7)
    return fig


def _plot_rf(record):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    phis = record.config["phi_grid"]
    chis = np.array(record.config["chi_grid"])
    for phi in phis:
        rows = _rows(record, beam="O", phi=phi)
        ax.plot(chis, [r["normalized"] for r in rows], "o--",
                label=f"phi={phi:.2f}")
    ax.set_xlabel("chi (rad)")
    ax.set_ylabel("O-beam normalized count")
    ax.legend(fontsize=7)
    return fig


def _plot_lowcount(record):
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    chi = np.array(record.config["chi_settings"])
    mean = record.derived["mean_counts"]
    std = record.derived["std_counts"]
    ax.errorbar(chi, mean, yerr=std, fmt="o", label="replica mean")
    f = record.derived["avg_fit"]
    dense = np.linspace(min(chi), max(chi), 200)
    ax.plot(dense, f["offset"] + f["amplitude"] * np.cos(dense - f["phase"]),
            "-", label="sinusoid fit")
    ax.set_xlabel("chi (rad)")
    ax.set_ylabel("O-beam count")
    ax.legend(fontsize=8)
    return fig


def _plot_shutter(record):
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    chi = record.derived["chi_grid"]
    for label, marker in (("open", "o"), ("closed", "s")):
        if label in record.derived:
            ax.plot(chi, record.derived[label]["relative_frequency"],
                    marker, label=f"shutter {label}")
    ax.set_xlabel("chi (rad)")
    ax.set_ylabel("O / (O + H)")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    return fig


def plot_learning_trace(traces, path) -> None:
    """Learning curves x0(n) for one or more (gamma, trace) pairs."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for gamma, trace in traces:
        ax.plot(np.arange(1, len(trace) + 1), trace, lw=0.8,
                label=f"gamma={gamma}")
    ax.set_xlabel("event number")
    ax.set_ylabel("x0")
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)


_PLOTTERS = {
    "mzi": _plot_mzi,
    "absorber": _plot_absorber,
    "bell": _plot_bell,
    "bell-random-chi": _plot_bell,
    "rf": _plot_rf,
    "lowcount": _plot_lowcount,
    "shutter": _plot_shutter,
}
