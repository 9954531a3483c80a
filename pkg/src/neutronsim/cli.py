"""Command-line interface.

One subcommand per experiment plus ``oracle`` (pure theory
predictions) and ``learning-trace``.  The report path writes a
delimited table (or JSON) and, with ``--plot``, a PNG figure next to
it.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments, io, oracle
from .config import (SCHEMAS, ConfigError, _cross_checks, parse_config,
                     validate_config)
from .dlm import learning_trace

EXPERIMENTS = ("mzi", "absorber", "bell", "rf", "lowcount", "shutter")


def _add_common(parser):
    parser.add_argument("--config", help="YAML config file")
    parser.add_argument("--seed", type=int, help="master RNG seed")
    parser.add_argument("--out", help="output file path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--plot", action="store_true",
                        help="also render a PNG figure next to --out")


def _override(parser, *names, **kwargs):
    for name in names:
        parser.add_argument(name, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neutronsim",
        description="Event-by-event simulation of single-neutron "
                    "interferometry experiments.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("mzi", help="plain interferometer fringe scan")
    _add_common(p)
    _override(p, "--r", "--gamma", type=float)
    _override(p, "--n", type=int)
    p.add_argument("--chi-points", type=int, help="equally spaced chi grid")
    p.add_argument("--delta-noise", help="source phase noise, e.g. '60 deg'")
    p.add_argument("--reset-per-setting", action="store_true", default=None)

    p = sub.add_parser("absorber", help="stochastic absorber / chopper scan")
    _add_common(p)
    p.add_argument("--kind", choices=("stochastic", "chopper"))
    _override(p, "--r", "--gamma", type=float)
    _override(p, "--n-pc", "--n-c", "--chi-points", type=int)

    p = sub.add_parser("bell", help="spin/path correlation and CHSH scan")
    _add_common(p)
    _override(p, "--r", "--gamma", type=float)
    _override(p, "--n", type=int)
    p.add_argument("--random-chi", action="store_true", default=None,
                   help="draw chi per particle from the setting grid")

    p = sub.add_parser("rf", help="double-coil energy-manipulation scan")
    _add_common(p)
    _override(p, "--r", "--gamma", type=float)
    _override(p, "--n", type=int)
    _override(p, "--phi-points", "--chi-points", type=int)

    p = sub.add_parser("lowcount", help="few-neutron replica experiment")
    _add_common(p)
    _override(p, "--r", "--gamma", type=float)
    _override(p, "--budget", "--n-replicas", type=int)

    p = sub.add_parser("shutter", help="time-dependent beam blocking")
    _add_common(p)
    _override(p, "--r", "--r1", "--r2", "--w1", "--gamma", type=float)
    _override(p, "--n", "--chi-points", type=int)
    p.add_argument("--mode", choices=("always_open", "always_closed",
                                      "random_toggle"))
    p.add_argument("--reset-mode", choices=("reset-x-to-zero",
                                            "gamma-zero-until-next-output"))

    p = sub.add_parser("learning-trace",
                       help="internal frequency x0 versus event number")
    _add_common(p)
    _override(p, "--p0", "--p-after", "--gamma", type=float)
    _override(p, "--n-events", "--switch-at", type=int)

    po = sub.add_parser("oracle", help="pure theory predictions")
    osub = po.add_subparsers(dest="oracle_command")
    q = osub.add_parser("shutter-solve",
                        help="two-population parameters from R1, v, g")
    q.add_argument("--r1", type=float, required=True)
    q.add_argument("--v", type=float, required=True)
    q.add_argument("--g", type=float, required=True)
    q = osub.add_parser("mzi", help="interferometer beam probabilities")
    q.add_argument("--r", type=float, required=True)
    q.add_argument("--chi", required=True, help="e.g. '60 deg'")
    q.add_argument("--a", type=float, default=1.0)
    q.add_argument("--b", type=float, default=1.0)
    q = osub.add_parser("bell", help="correlation E and O-beam probability")
    q.add_argument("--r", type=float, required=True)
    q.add_argument("--alpha", required=True)
    q.add_argument("--chi", required=True)
    return parser


def _collect_overrides(args, keys) -> dict:
    out = {}
    for cli_key, cfg_key in keys.items():
        value = getattr(args, cli_key, None)
        if value is not None:
            out[cfg_key] = value
    return out


_OVERRIDE_KEYS = {
    "mzi": {"r": "r", "gamma": "gamma", "n": "n",
            "chi_points": "chi_grid", "delta_noise": "delta_noise",
            "reset_per_setting": "reset_per_setting"},
    "absorber": {"kind": "kind", "r": "r", "gamma": "gamma", "n_pc": "n_pc",
                 "n_c": "n_c", "chi_points": "chi_grid"},
    "bell": {"r": "r", "gamma": "gamma", "n": "n",
             "random_chi": "random_chi"},
    "rf": {"r": "r", "gamma": "gamma", "n": "n",
           "phi_points": "phi_grid", "chi_points": "chi_grid"},
    "lowcount": {"r": "r", "gamma": "gamma", "budget": "budget",
                 "n_replicas": "n_replicas"},
    "shutter": {"r": "r", "r1": "r1", "r2": "r2", "w1": "w1",
                "gamma": "gamma", "n": "n", "chi_points": "chi_grid",
                "mode": "mode", "reset_mode": "reset_mode"},
    "learning-trace": {"p0": "p_port0", "p_after": "p_after",
                       "gamma": "gamma", "n_events": "n_events",
                       "switch_at": "switch_at"},
}


def _load_config(args, experiment) -> dict:
    overrides = _collect_overrides(args, _OVERRIDE_KEYS[experiment])
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.config:
        with open(args.config) as fh:
            raw_text = fh.read()
        cfg = parse_config(raw_text, experiment)
        cfg.pop("experiment")
        # Config values are canonical already; convert just the overrides.
        schema = dict(SCHEMAS[experiment])
        for key, value in overrides.items():
            if key == "seed":
                cfg["seed"] = int(value)
            else:
                conv, _ = schema[key]
                cfg[key] = conv(value, f"{experiment}.{key}")
        _cross_checks(experiment, cfg)
        return cfg
    return validate_config(experiment, overrides)


def _run(experiment, cfg):
    seed = cfg["seed"]
    if experiment == "mzi":
        return experiments.run_mzi(cfg["r"], cfg["gamma"], cfg["delta_noise"],
                                   cfg["chi_grid"], cfg["n"], seed,
                                   cfg["reset_per_setting"])
    if experiment == "absorber":
        return experiments.run_absorber(cfg["kind"], cfg["r"], cfg["gamma"],
                                        cfg["a_grid"], cfg["n_pc"],
                                        cfg["n_c"], cfg["chi_grid"], seed)
    if experiment == "bell":
        if cfg["random_chi"]:
            return experiments.run_bell_random_chi(
                cfg["r"], cfg["gamma"], cfg["alpha_grid"], cfg["chi_grid"],
                cfg["n"], seed)
        return experiments.run_bell(cfg["r"], cfg["gamma"],
                                    cfg["alpha_grid"], cfg["chi_grid"],
                                    cfg["n"], seed)
    if experiment == "rf":
        return experiments.run_rf(cfg["r"], cfg["gamma"], cfg["phi_grid"],
                                  cfg["chi_grid"], cfg["n"], seed)
    if experiment == "lowcount":
        return experiments.run_low_count(cfg["r"], cfg["gamma"],
                                         cfg["chi_settings"], cfg["budget"],
                                         cfg["n_replicas"], seed)
    if experiment == "shutter":
        if cfg.get("r") is not None:
            reflection = cfg["r"]
        else:
            reflection = (cfg["r1"], cfg["r2"], cfg["w1"])
        return experiments.run_shutter(reflection, cfg["gamma"],
                                       cfg["chi_grid"], cfg["n"],
                                       cfg["mode"], seed, cfg["reset_mode"])
    raise ValueError(experiment)


def _summary(record) -> str:
    d = record.derived
    if record.experiment == "mzi" and "o_fit" in d:
        return (f"O-beam fit: visibility {d['o_fit']['visibility']:.4f}, "
                f"offset {d['o_fit']['offset']:.4f}")
    if record.experiment == "absorber":
        return (f"modulation amplitude RMS: vs sqrt(a) "
                f"{d['rms_vs_sqrt_a']:.4f}, vs a {d['rms_vs_linear_a']:.4f}")
    if record.experiment.startswith("bell"):
        parts = [f"S_max {d['S_max']:.4f}"]
        if "S_canonical" in d:
            parts.append(f"S(canonical) {d['S_canonical']:.4f}")
        if "e_fit_amplitude" in d:
            parts.append(f"E amplitude {d['e_fit_amplitude']:.4f}")
        return ", ".join(parts)
    if record.experiment == "rf":
        return f"{len(record.rows)} rows"
    if record.experiment == "lowcount":
        f = d["avg_fit"]
        return (f"replica-average fit: offset {f['offset']:.2f}, "
                f"amplitude {f['amplitude']:.2f}")
    if record.experiment == "shutter":
        parts = []
        for label in ("open", "closed"):
            if label in d:
                parts.append(f"{label}: mean {d[label]['mean']:.4f}, "
                             f"visibility {d[label]['visibility']:.4f}")
        return "; ".join(parts)
    return ""


def _emit(record, args) -> None:
    if args.out:
        io.write_results(record, args.out, args.format)
        if args.plot:
            from . import plots
            plots.plot_record(record, _plot_path(args.out))
    else:
        text = (io.record_to_csv(record) if args.format == "csv"
                else io.record_to_json(record))
        sys.stdout.write(text)


def _plot_path(out: str) -> str:
    stem = out.rsplit(".", 1)[0] if "." in out.split("/")[-1] else out
    return stem + ".png"


def _run_learning_trace(args) -> int:
    cfg = _load_config(args, "learning-trace")
    trace = learning_trace(cfg["p_port0"], cfg["gamma"], cfg["n_events"],
                           cfg["switch_at"], cfg["p_after"], cfg["seed"])
    provenance = json.dumps({"experiment": "learning-trace",
                             "config": {k: v for k, v in cfg.items()},
                             "seed": cfg["seed"]}, sort_keys=True)
    lines = [f"# config: {provenance}", "event,x0"]
    lines += [f"{i + 1},{x:.17g}" for i, x in enumerate(trace)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        if args.plot:
            from . import plots
            plots.plot_learning_trace([(cfg["gamma"], trace)],
                                      _plot_path(args.out))
    else:
        sys.stdout.write(text)
    return 0


def _run_oracle(args) -> int:
    cmd = args.oracle_command
    if cmd == "shutter-solve":
        r2, w1 = oracle.solve_shutter_params(args.r1, args.v, args.g)
        print(f"R2 = {r2:.2f} ({r2:.10g})")
        print(f"W1 = {w1:.2f} ({w1:.10g})")
        return 0
    if cmd == "mzi":
        from .config import parse_angle
        chi = parse_angle(args.chi, "--chi")
        p_h, p_o = oracle.qt_mzi(args.r, args.a, args.b, chi)
        print(f"p_H = {p_h:.10g}")
        print(f"p_O = {p_o:.10g}")
        return 0
    if cmd == "bell":
        from .config import parse_angle
        alpha = parse_angle(args.alpha, "--alpha")
        chi = parse_angle(args.chi, "--chi")
        print(f"E = {oracle.qt_bell_E(alpha, chi):.10g}")
        print(f"p_O = {oracle.qt_bell_p_o(args.r, alpha, chi):.10g}")
        return 0
    print("error: missing oracle subcommand", file=sys.stderr)
    return 2


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.command == "oracle":
            return _run_oracle(args)
        if args.command == "learning-trace":
            return _run_learning_trace(args)
        cfg = _load_config(args, args.command)
        record = _run(args.command, cfg)
        _emit(record, args)
        summary = _summary(record)
        if args.out and summary:
            print(summary)
        return 0
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
