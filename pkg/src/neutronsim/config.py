"""Run configuration: YAML parsing, per-experiment schemas, validation.

Angles in config files must carry an explicit unit suffix ("60 deg" or
"1.5 rad"); the canonical internal unit is radians.  Phase grids may be
given either as a list of angles or as an integer N meaning N equally
spaced points over [0, 2*pi).
"""

from __future__ import annotations

import math

import yaml


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending path."""


def parse_angle(value, path: str) -> float:
    """One angle with a required 'deg' or 'rad' suffix (numbers without
    a suffix are rejected to avoid silent unit mistakes)."""
    if isinstance(value, str):
        parts = value.split()
        if len(parts) == 2:
            try:
                x = float(parts[0])
            except ValueError:
                raise ConfigError(f"{path}: bad angle number {parts[0]!r}")
            if parts[1] == "deg":
                return math.radians(x)
            if parts[1] == "rad":
                return x
        raise ConfigError(
            f"{path}: angle {value!r} needs a 'deg' or 'rad' suffix")
    raise ConfigError(
        f"{path}: angle must be a string like '60 deg' or '1.5 rad', "
        f"got {value!r}")


def parse_angle_grid(value, path: str) -> list:
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected angle grid, got {value!r}")
    if isinstance(value, int):
        if value < 1:
            raise ConfigError(f"{path}: grid size must be >= 1, got {value}")
        return [2.0 * math.pi * k / value for k in range(value)]
    if isinstance(value, list):
        return [parse_angle(v, f"{path}[{i}]") for i, v in enumerate(value)]
    raise ConfigError(f"{path}: expected integer or list of angles")


def _number(value, path, lo=None, hi=None, hi_open=False, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if integer and not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if lo is not None and value < lo:
        raise ConfigError(f"{path}: value {value} below minimum {lo}")
    if hi is not None and (value >= hi if hi_open else value > hi):
        op = "must be <" if hi_open else "must be <="
        raise ConfigError(f"{path}: value {value} out of range ({op} {hi})")
    return float(value) if not integer else int(value)


def _choice(value, path, options):
    if value not in options:
        raise ConfigError(f"{path}: {value!r} not one of {sorted(options)}")
    return value


def _bool(value, path):
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected true/false, got {value!r}")
    return value


# Field converters: callable(raw_value, path) -> canonical value.
def _gamma(v, p):
    return _number(v, p, lo=0.0, hi=1.0, hi_open=True)


def _fraction(v, p):
    return _number(v, p, lo=0.0, hi=1.0)


def _count(v, p):
    return _number(v, p, lo=1, integer=True)


def _float_grid(v, p):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{p}: expected a non-empty list of numbers")
    return [_fraction(x, f"{p}[{i}]") for i, x in enumerate(v)]


# Per-experiment schemas: field -> (converter, default); default=REQUIRED
# marks mandatory fields.  Canonical defaults mirror the headline runs.
REQUIRED = object()

SCHEMAS = {
    "mzi": {
        "r": (_fraction, 0.2),
        "gamma": (_gamma, 0.99),
        "delta_noise": (parse_angle, "0 rad"),
        "chi_grid": (parse_angle_grid, 16),
        "n": (_count, 100000),
        "reset_per_setting": (_bool, False),
    },
    "absorber": {
        "kind": (lambda v, p: _choice(v, p, {"stochastic", "chopper"}),
                 REQUIRED),
        "r": (_fraction, 0.2),
        "gamma": (_gamma, 0.98),
        "a_grid": (_float_grid, [k / 10.0 for k in range(1, 11)]),
        "n_pc": (_count, 1000),
        "n_c": (_count, 10),
        "chi_grid": (parse_angle_grid, 8),
    },
    "bell": {
        "r": (_fraction, 0.2),
        "gamma": (_gamma, 0.99),
        "alpha_grid": (parse_angle_grid, ["0 rad", "90 deg"]),
        "chi_grid": (parse_angle_grid, ["45 deg", "-45 deg"]),
        "n": (_count, 10000),
        "random_chi": (_bool, False),
    },
    "rf": {
        "r": (_fraction, 0.5),
        "gamma": (_gamma, 0.99),
        "phi_grid": (parse_angle_grid, 8),
        "chi_grid": (parse_angle_grid, 8),
        "n": (_count, 10000),
    },
    "lowcount": {
        "r": (_fraction, 0.2),
        "gamma": (_gamma, 0.5),
        "chi_settings": (parse_angle_grid, 5),
        "budget": (_count, 2500),
        "n_replicas": (_count, 30),
    },
    "shutter": {
        "r": (_fraction, None),
        "r1": (_fraction, None),
        "r2": (_fraction, None),
        "w1": (_fraction, None),
        "w2": (_fraction, None),
        "gamma": (_gamma, 0.12),
        "chi_grid": (parse_angle_grid, 16),
        "n": (_count, 500000),
        "mode": (lambda v, p: _choice(
            v, p, {"always_open", "always_closed", "random_toggle"}),
            "random_toggle"),
        "reset_mode": (lambda v, p: _choice(
            v, p, {"reset-x-to-zero", "gamma-zero-until-next-output"}),
            "reset-x-to-zero"),
    },
    "learning-trace": {
        "p_port0": (_fraction, 0.8),
        "gamma": (_gamma, 0.99),
        "n_events": (_count, 2000),
        "switch_at": (_count, 1000),
        "p_after": (_fraction, 0.2),
    },
}


def validate_config(experiment: str, raw: dict) -> dict:
    """Apply the experiment schema: defaults, conversion, range checks,
    unknown-key rejection, cross-field rules."""
    if experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    schema = SCHEMAS[experiment]
    if not isinstance(raw, dict):
        raise ConfigError(f"{experiment}: config must be a mapping")
    common = {"seed": (_count, 1)}
    out = {}
    for key, value in raw.items():
        if key in schema:
            conv, _ = schema[key]
        elif key in common:
            conv, _ = common[key]
        else:
            raise ConfigError(f"{experiment}.{key}: unknown key")
        if value is None:
            raise ConfigError(f"{experiment}.{key}: missing value")
        out[key] = conv(value, f"{experiment}.{key}")
    for key, (conv, default) in {**schema, **common}.items():
        if key in out:
            continue
        if default is REQUIRED:
            raise ConfigError(f"{experiment}.{key}: required field missing")
        if default is None:
            continue
        out[key] = conv(default, f"{experiment}.{key}") \
            if not isinstance(default, (int, float, bool, list)) or \
            conv in (parse_angle, parse_angle_grid) else default
    _cross_checks(experiment, out)
    return out


def _cross_checks(experiment: str, cfg: dict) -> None:
    if experiment == "shutter":
        single = cfg.get("r") is not None
        two = any(cfg.get(k) is not None for k in ("r1", "r2", "w1", "w2"))
        if single and two:
            raise ConfigError(
                "shutter.r: give either r or the r1/r2/w1 population triple")
        if not single and not two:
            raise ConfigError("shutter.r: reflection specification missing")
        if two:
            for k in ("r1", "r2", "w1"):
                if cfg.get(k) is None:
                    raise ConfigError(f"shutter.{k}: required for the "
                                      "two-population model")
            if cfg.get("w2") is not None and \
                    abs(cfg["w1"] + cfg["w2"] - 1.0) > 1e-12:
                raise ConfigError(
                    f"shutter.w2: weights must sum to 1, got "
                    f"{cfg['w1']} + {cfg['w2']}")
    if experiment == "mzi" and not cfg["chi_grid"]:
        return


def parse_config(text: str, experiment: str | None = None) -> dict:
    """Parse a YAML config document into a validated run configuration.

    The document either nests parameters under a single experiment key
    or carries an ``experiment: name`` entry at top level.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}")
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping")
    doc = dict(doc)
    name = doc.pop("experiment", None)
    if name is None and len(doc) == 1 and next(iter(doc)) in SCHEMAS:
        name, doc = next(iter(doc.items()))
        doc = doc or {}
    if name is None:
        name = experiment
    if name is None:
        raise ConfigError("experiment: missing experiment name")
    if experiment is not None and name != experiment:
        raise ConfigError(
            f"experiment: config is for {name!r}, expected {experiment!r}")
    cfg = validate_config(name, doc)
    cfg["experiment"] = name
    return cfg
