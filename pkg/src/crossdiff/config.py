"""Run configuration: presets, INI-style parsing and validation.

Grammar (``configparser`` INI dialect, ``#`` comments)::

    [run]
    preset = exp1            # exp1 | exp2a | exp2b | custom
    method = particle        # particle | fem | both
    n = 200
    T = 0.01
    snapshot_times = 0.005, 0.01
    out = results

    [domain]
    a = -1
    b = 1

    [model]
    a11 = 1   ...   beta22 = 0
    drift = linear           # zero | constant | linear
    drift_slope = -3
    drift_center = 0.5
    drift_value = 0

    [initial]
    kind = contact           # contact | gaussian
    t_star = 0.01
    x0 = 0
    sigma = 0.02
    center1 = 0.4
    center2 = 0.6

    [kernel]
    epsilon = ...            # default epsilon_factor * (1/n)**0.75
    epsilon_factor = 0.15
    epsilon_tilde = 1e-6

    [particles]
    dt = ...                 # default dt_factor * epsilon**2
    dt_factor = 0.1
    tol = 4e-6
    max_fixed_point_iters = 50
    init = nnls              # nnls | simple
    redistribute_every = 0   # 0 disables
    redistribute_gap = 0     # in units of epsilon; 0 disables

    [fem]
    delta = 0
    cutoff_eps = 1e-6
    fp_tol = 1e-8
    max_fp_iters = 100

Preset values are applied first, explicit keys override them, then
epsilon and dt are derived unless given. The FEM run uses the same dt as
the particle run. A ``[manifest]`` section is ignored on input, so a
written manifest can be fed back as a configuration.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParseError, ValidationError
from .exact import ExactContactSolution, exact_pair, support_radius
from .model import ModelCoefficients, make_drift

METHODS = ("particle", "fem", "both")
PRESETS = ("exp1", "exp2a", "exp2b", "custom")
INITIAL_KINDS = ("contact", "gaussian")
COEFF_NAMES = ("a11", "a12", "a21", "a22", "c1", "c2", "b1", "b2", "alpha1", "alpha2",
               "beta11", "beta12", "beta21", "beta22")


@dataclass
class RunConfig:
    preset: str = "custom"
    method: str = "particle"
    n: int = 200
    T: Optional[float] = None
    snapshot_times: tuple = ()
    out: str = "results"
    seed: int = 0  # reserved; every pipeline is deterministic
    domain: Optional[tuple] = None
    coefficients: dict = field(default_factory=lambda: {name: 0.0 for name in COEFF_NAMES})
    drift: str = "zero"
    drift_slope: float = 0.0
    drift_center: float = 0.0
    drift_value: float = 0.0
    initial: Optional[str] = None
    t_star: float = 0.01
    x0: float = 0.0
    sigma: float = 0.001
    center1: float = 0.4
    center2: float = 0.6
    epsilon: Optional[float] = None
    epsilon_factor: float = 0.5
    epsilon_tilde: float = 1e-6
    dt: Optional[float] = None
    dt_factor: float = 0.5
    tol: float = 4e-6
    max_fixed_point_iters: int = 50
    init: str = "nnls"
    redistribute_every: int = 0
    redistribute_gap: float = 0.0
    delta: float = 0.0
    cutoff_eps: float = 1e-6
    fp_tol: float = 1e-8
    max_fp_iters: int = 100

    @property
    def dx(self) -> float:
        return 1.0 / self.n

    def coeffs(self) -> ModelCoefficients:
        drift = make_drift(self.drift, slope=self.drift_slope, center=self.drift_center,
                           value=self.drift_value)
        return ModelCoefficients(**self.coefficients, q=drift)

    def exact_solution(self) -> Optional[ExactContactSolution]:
        """The closed-form reference, when the configuration admits one."""
        if self.initial != "contact":
            return None
        c = self.coefficients
        porous = all(c[k] == 1.0 for k in ("a11", "a12", "a21", "a22")) and \
            all(c[k] == 0.0 for k in COEFF_NAMES[4:])
        if not porous:
            return None
        a, b = self.domain
        if a != -b:
            return None
        return ExactContactSolution(self.t_star, self.x0, b)

    def initial_data(self):
        """Pair of callables (u10, u20)."""
        if self.initial == "contact":
            sol = ExactContactSolution(self.t_star, self.x0, max(abs(v) for v in self.domain))
            return (lambda x: exact_pair(sol, x, 0.0)[0], lambda x: exact_pair(sol, x, 0.0)[1])
        s = self.sigma
        c1, c2 = self.center1, self.center2
        return (lambda x: np.exp(-((np.asarray(x) - c1) / s) ** 2),
                lambda x: np.exp(-((np.asarray(x) - c2) / s) ** 2))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _preset_values(name: str) -> dict:
    if name == "exp1":
        return dict(domain=(-1.0, 1.0), T=0.01, initial="contact", t_star=0.01, x0=0.0,
                    coefficients=dict({k: 0.0 for k in COEFF_NAMES}, a11=1.0, a12=1.0, a21=1.0, a22=1.0),
                    drift="zero", epsilon_factor=0.15, dt_factor=0.1, delta=0.0)
    if name in ("exp2a", "exp2b"):
        A = (3.0, 3.0, 1.0, 1.0) if name == "exp2a" else (1.0, 1.0, 1.0, 1.0)
        b = (0.0, 0.0) if name == "exp2a" else (1.0, 10.0)
        coeffs = {k: 0.0 for k in COEFF_NAMES}
        coeffs.update(zip(("a11", "a12", "a21", "a22"), A))
        coeffs.update(b1=b[0], b2=b[1])
        return dict(domain=(0.0, 1.0), T=0.01 if name == "exp2a" else 0.02, initial="gaussian",
                    sigma=0.001, center1=0.4, center2=0.6, coefficients=coeffs,
                    drift="linear", drift_slope=-3.0, drift_center=0.5,
                    epsilon_factor=0.5, dt_factor=0.5, delta=1e-3)
    return {}


def _float(s):
    return float(s)


def _int(s):
    v = float(s)
    if v != int(v):
        raise ValueError(f"expected an integer, got {s!r}")
    return int(v)


def _floats(s):
    s = s.strip().strip("[]()")
    return tuple(float(p) for p in s.replace(";", ",").split(",") if p.strip())


def _word(s):
    return s.strip().lower()


_KEYS = {
    "run": {"preset": _word, "method": _word, "n": _int, "t": _float, "snapshot_times": _floats,
            "out": str.strip, "seed": _int},
    "domain": {"a": _float, "b": _float},
    "model": dict({k: _float for k in COEFF_NAMES}, drift=_word, drift_slope=_float,
                  drift_center=_float, drift_value=_float),
    "initial": {"kind": _word, "t_star": _float, "x0": _float, "sigma": _float,
                "center1": _float, "center2": _float},
    "kernel": {"epsilon": _float, "epsilon_factor": _float, "epsilon_tilde": _float},
    "particles": {"dt": _float, "dt_factor": _float, "tol": _float, "max_fixed_point_iters": _int,
                  "init": _word, "redistribute_every": _int, "redistribute_gap": _float},
    "fem": {"delta": _float, "cutoff_eps": _float, "fp_tol": _float, "max_fp_iters": _int},
}
_IGNORED_SECTIONS = ("manifest", "results")


def _parse_text(text: str) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str.lower
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside of a [section]", line=exc.lineno, column=1) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ParseError(f"cannot parse {line!r}", line=lineno, column=1) from None
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        raise ParseError(str(exc).splitlines()[0], line=lineno, column=1 if lineno else None) from None

    raw = {}
    errors = []
    for section in parser.sections():
        sec = section.lower()
        if sec in _IGNORED_SECTIONS:
            continue
        if sec not in _KEYS:
            errors.append(f"[{section}]")
            continue
        for key, value in parser.items(section):
            conv = _KEYS[sec].get(key)
            if conv is None:
                errors.append(f"{sec}.{key}")
                continue
            try:
                raw[(sec, key)] = conv(value)
            except ValueError as exc:
                errors.append(f"{sec}.{key} ({exc})")
    if errors:
        raise ValidationError("unknown or malformed keys: " + ", ".join(errors), errors)
    return raw


def resolve(raw: dict) -> RunConfig:
    """Apply preset defaults, explicit keys and derived values, then validate."""
    preset = raw.get(("run", "preset"), "custom")
    cfg = RunConfig(preset=preset)
    if preset not in PRESETS:
        raise ValidationError(f"unknown preset {preset!r}", ["preset"])
    for name, value in _preset_values(preset).items():
        setattr(cfg, name, value)
    cfg.coefficients = dict(cfg.coefficients)

    a, b = (cfg.domain if cfg.domain is not None else (None, None))
    for (sec, key), value in raw.items():
        if sec == "domain":
            if key == "a":
                a = value
            else:
                b = value
        elif sec == "model" and key in COEFF_NAMES:
            cfg.coefficients[key] = value
        elif sec == "initial" and key == "kind":
            cfg.initial = value
        elif sec == "run" and key == "t":
            cfg.T = value
        elif (sec, key) != ("run", "preset"):
            setattr(cfg, key, value)
    cfg.domain = None if a is None or b is None else (float(a), float(b))

    if cfg.epsilon is None and cfg.n:
        cfg.epsilon = cfg.epsilon_factor * cfg.dx ** 0.75
    if cfg.dt is None and cfg.epsilon is not None:
        cfg.dt = cfg.dt_factor * cfg.epsilon ** 2
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Raise ValidationError naming every violated field."""
    bad = []

    def check(ok, name):
        if not ok:
            bad.append(name)

    check(cfg.method in METHODS, "method")
    check(cfg.preset in PRESETS, "preset")
    check(isinstance(cfg.n, int) and cfg.n >= 2, "n")
    check(cfg.T is not None and math.isfinite(cfg.T) and cfg.T >= 0, "T")
    check(cfg.domain is not None and cfg.domain[0] < cfg.domain[1], "domain")
    check(cfg.initial in INITIAL_KINDS, "initial")
    for k, v in cfg.coefficients.items():
        check(math.isfinite(v) and (k in ("b1", "b2") or v >= 0), k)
    check(cfg.drift in ("zero", "constant", "linear"), "drift")
    check(cfg.epsilon is not None and cfg.epsilon > 0, "epsilon")
    check(cfg.epsilon_tilde > 0, "epsilon_tilde")
    check(cfg.dt is not None and cfg.dt > 0, "dt")
    check(cfg.tol > 0, "tol")
    check(cfg.max_fixed_point_iters > 0, "max_fixed_point_iters")
    check(cfg.init in ("nnls", "simple"), "init")
    check(cfg.redistribute_every >= 0, "redistribute_every")
    check(cfg.redistribute_gap >= 0, "redistribute_gap")
    check(cfg.delta >= 0, "delta")
    check(cfg.cutoff_eps > 0, "cutoff_eps")
    check(cfg.fp_tol > 0, "fp_tol")
    check(cfg.max_fp_iters > 0, "max_fp_iters")
    if cfg.initial == "gaussian":
        check(cfg.sigma > 0, "sigma")
    if cfg.initial == "contact":
        check(cfg.t_star > 0, "t_star")
        if cfg.t_star > 0:
            check(abs(cfg.x0) < support_radius(cfg.t_star, 0.0), "x0")
        if cfg.domain is not None and cfg.T is not None and cfg.t_star > 0 and cfg.T >= 0:
            R = min(abs(cfg.domain[0]), abs(cfg.domain[1]))
            check(support_radius(cfg.t_star, cfg.T) < R, "T")
    if cfg.T is not None and cfg.T >= 0:
        check(all(0 <= t <= cfg.T for t in cfg.snapshot_times), "snapshot_times")
    if bad:
        bad = list(dict.fromkeys(bad))
        raise ValidationError("invalid configuration: " + ", ".join(bad), bad)


def load_config(source: str) -> RunConfig:
    """Load from a file path, or from inline configuration text."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    elif "\n" in source or "[" in source:
        text = source
    else:
        raise FileNotFoundError(source)
    return resolve(_parse_text(text))


_FIELD_KEYS = {key: (sec, key) for sec, keys in _KEYS.items() for key in keys if sec != "domain"}
_FIELD_KEYS.update(T=("run", "t"), initial=("initial", "kind"))
del _FIELD_KEYS["t"], _FIELD_KEYS["kind"]


def preset_config(preset: str, **overrides) -> RunConfig:
    """Resolved configuration for a preset; keyword names are RunConfig field names.

    ``coefficients`` may be a partial dict; ``domain`` a pair (a, b).
    """
    raw = {("run", "preset"): preset}
    for key, value in overrides.items():
        if key == "domain":
            raw[("domain", "a")], raw[("domain", "b")] = map(float, value)
        elif key == "coefficients":
            raw.update({("model", k): float(v) for k, v in value.items()})
        elif key == "snapshot_times":
            raw[("run", "snapshot_times")] = tuple(float(t) for t in value)
        elif key in _FIELD_KEYS:
            raw[_FIELD_KEYS[key]] = value
        else:
            raise ValidationError(f"unknown configuration field {key!r}", [key])
    return resolve(raw)


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (tuple, list)):
        return ", ".join(_fmt(float(x)) for x in v)
    return str(v)


def dump_config(cfg: RunConfig) -> str:
    """Render a fully resolved configuration in the input grammar."""
    sections = {
        "run": [("preset", cfg.preset), ("method", cfg.method), ("n", cfg.n), ("T", cfg.T),
                ("snapshot_times", tuple(cfg.snapshot_times)), ("out", cfg.out), ("seed", cfg.seed)],
        "domain": [("a", cfg.domain[0]), ("b", cfg.domain[1])],
        "model": [(k, cfg.coefficients[k]) for k in COEFF_NAMES] + [
            ("drift", cfg.drift), ("drift_slope", cfg.drift_slope), ("drift_center", cfg.drift_center),
            ("drift_value", cfg.drift_value)],
        "initial": [("kind", cfg.initial), ("t_star", cfg.t_star), ("x0", cfg.x0), ("sigma", cfg.sigma),
                    ("center1", cfg.center1), ("center2", cfg.center2)],
        "kernel": [("epsilon", cfg.epsilon), ("epsilon_factor", cfg.epsilon_factor),
                   ("epsilon_tilde", cfg.epsilon_tilde)],
        "particles": [("dt", cfg.dt), ("dt_factor", cfg.dt_factor), ("tol", cfg.tol),
                      ("max_fixed_point_iters", cfg.max_fixed_point_iters), ("init", cfg.init),
                      ("redistribute_every", cfg.redistribute_every),
                      ("redistribute_gap", cfg.redistribute_gap)],
        "fem": [("delta", cfg.delta), ("cutoff_eps", cfg.cutoff_eps), ("fp_tol", cfg.fp_tol),
                ("max_fp_iters", cfg.max_fp_iters)],
    }
    lines = []
    for name, items in sections.items():
        lines.append(f"[{name}]")
        lines.extend(f"{k} = {_fmt(v)}" for k, v in items)
        lines.append("")
    return "\n".join(lines)
