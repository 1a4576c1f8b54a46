"""Scenario configuration: flat ``key = value`` text with dotted keys.

Blank lines and ``#`` comments are ignored. Every key has a default; keys
left at ``None`` ("auto") take the scenario's own default. Unknown keys and
unparsable values raise :class:`ConfigError` naming the key and line.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from typing import Callable

from .errors import ConfigError

SEED_ENV = "OPDYN_SEED"


def _int(s: str) -> int:
    return int(s)


def _float(s: str) -> float:
    return float(s)


def _complex(s: str) -> complex:
    return complex(s.replace(" ", "").replace("i", "j"))


def _ints(s: str) -> tuple:
    return tuple(int(x) for x in s.split(",") if x.strip())


def _weights(s: str) -> tuple:
    vals = tuple(_complex(x) for x in s.split(",") if x.strip())
    if not vals:
        raise ValueError("empty weight list")
    return vals


def _str(s: str) -> str:
    return s


@dataclass
class ScenarioConfig:
    """All tunables of a scenario run (dotted config key in brackets).

    scenario [scenario.name]: scenario to run.
    d [truncation.d]: matrix size; auto = 16 for lifted probes, 64 for base-space ones.
    ambient_factor [truncation.ambient_factor]: auto = 8 for lifted HCC probes, 2 for base-space ones.
    weights [operator.weights]: comma-separated weights; one value means constant. Default 1.
    alpha, beta [witness.alpha, witness.beta]: eigenvalue parameters of shift witnesses. Default 0.5.
    lam [model.lambda]: scalar part in the ideal-contrast scenario. Default 1.
    k [model.k]: Tarbard model order. Default 3.
    budget [probe.budget]: orbit length N for iterate and transitivity probes. Default 60.
    schedule [probe.schedule]: HCC schedule; auto = 1,2,4,8 (1,2,3,4 for dw and ex5_3).
    tol [probe.tol]: HCC witness tolerance; auto = 1e-2.
    eta [probe.eta]: annulus margin. Default 0.1.
    angles [probe.angles]: lambda-grid angles; auto = 24 (48 for thm2_2).
    density_eps [probe.density_eps]: density slack. Default 0.5.
    eps [spectrum.eps]: clustering radius; auto = 5% of the spectral diameter.
    trials [run.trials]: seeded repetitions in randomized scenarios. Default 10.
    seed [run.seed]: auto = $OPDYN_SEED, else 0.
    out [output.dir]: report directory. Default opdyn-out.
    """

    scenario: str = "ex2_1"
    d: int | None = None
    ambient_factor: int | None = None
    weights: tuple = (1 + 0j,)
    alpha: complex = 0.5 + 0j
    beta: complex = 0.5 + 0j
    lam: complex = 1 + 0j
    k: int = 3
    budget: int = 60
    schedule: tuple | None = None
    tol: float | None = None
    eta: float = 0.1
    angles: int | None = None
    density_eps: float = 0.5
    eps: float | None = None
    trials: int = 10
    seed: int | None = None
    out: str = "opdyn-out"

    def weight_arg(self):
        """Weights as accepted by the shift specs (scalar for a constant sequence)."""
        return self.weights[0] if len(self.weights) == 1 else self.weights

    def echo(self) -> dict:
        return {key: getattr(self, name) for key, (name, _) in KEYS.items()}


KEYS: dict[str, tuple[str, Callable]] = {
    "scenario.name": ("scenario", _str),
    "truncation.d": ("d", _int),
    "truncation.ambient_factor": ("ambient_factor", _int),
    "operator.weights": ("weights", _weights),
    "witness.alpha": ("alpha", _complex),
    "witness.beta": ("beta", _complex),
    "model.lambda": ("lam", _complex),
    "model.k": ("k", _int),
    "probe.budget": ("budget", _int),
    "probe.schedule": ("schedule", _ints),
    "probe.tol": ("tol", _float),
    "probe.eta": ("eta", _float),
    "probe.angles": ("angles", _int),
    "probe.density_eps": ("density_eps", _float),
    "spectrum.eps": ("eps", _float),
    "run.trials": ("trials", _int),
    "run.seed": ("seed", _int),
    "output.dir": ("out", _str),
}


def _validate(name: str, value, key: str, line):
    checks = {
        "d": lambda v: v >= 2,
        "ambient_factor": lambda v: v >= 1,
        "k": lambda v: v >= 1,
        "budget": lambda v: v >= 1,
        "schedule": lambda v: len(v) > 0 and v[0] >= 1 and all(b > a for a, b in zip(v, v[1:])),
        "tol": lambda v: v > 0,
        "eta": lambda v: 0 < v < 1,
        "angles": lambda v: v >= 1,
        "density_eps": lambda v: 0 <= v < 1,
        "eps": lambda v: v > 0,
        "trials": lambda v: v >= 1,
        "seed": lambda v: v >= 0,
    }
    ok = checks.get(name)
    if ok is not None and not ok(value):
        raise ConfigError(f"value {value!r} out of range", key=key, line=line)


def set_value(cfg: ScenarioConfig, key: str, raw: str, line: int | None = None) -> None:
    key = key.strip()
    if key not in KEYS:
        raise ConfigError(f"unknown key (known: {', '.join(KEYS)})", key=key, line=line)
    name, parse = KEYS[key]
    raw = raw.strip()
    if raw.lower() == "auto" and ScenarioConfig.__dataclass_fields__[name].default is None:
        setattr(cfg, name, None)
        return
    try:
        value = parse(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse {raw!r}: {exc}", key=key, line=line) from None
    _validate(name, value, key, line)
    setattr(cfg, name, value)


def parse_config(text: str, cfg: ScenarioConfig | None = None) -> ScenarioConfig:
    cfg = ScenarioConfig() if cfg is None else cfg
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, raw = body.split("=", 1)
        set_value(cfg, key, raw, lineno)
    return cfg


def load_config(path: str, cfg: ScenarioConfig | None = None) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), cfg)


def apply_overrides(cfg: ScenarioConfig, pairs) -> ScenarioConfig:
    """Apply ``key=value`` strings (as given to ``--set``)."""
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        set_value(cfg, key, raw)
    return cfg


def resolve_seed(cli_seed: int | None, cfg: ScenarioConfig, environ=os.environ) -> int:
    """``--seed`` beats the config file, which beats $OPDYN_SEED; the fallback is 0."""
    if cli_seed is not None:
        return int(cli_seed)
    if cfg.seed is not None:
        return int(cfg.seed)
    env = environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer", key="run.seed") from None
    return 0


def with_defaults(cfg: ScenarioConfig, **defaults) -> ScenarioConfig:
    """Copy of ``cfg`` with ``None`` fields filled from ``defaults``."""
    out = dataclasses.replace(cfg)
    for name, value in defaults.items():
        if getattr(out, name) is None:
            setattr(out, name, value)
    return out


__all__ = ["ScenarioConfig", "KEYS", "parse_config", "load_config", "apply_overrides",
           "resolve_seed", "with_defaults", "set_value"]
