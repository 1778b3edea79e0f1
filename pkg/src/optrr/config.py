"""Declarative run configuration: JSON schema validation plus physical checks.

Numbers in configs are decimal strings (or JSON numbers for integers);
potential terms are explicit (power, coefficient) pairs, never expressions.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from mpmath import mpf

from .basis import GAMMA_POLE_OFFSET
from .potentials import Potential, PotentialError
from .precision import PrecisionConfig, PrecisionError, workdps
from . import qes as qes_mod

ENV_PRECISION = "OPTRR_PRECISION"

COMMANDS = ("solve", "sweep", "qes", "compare", "splitting")
FORMATS = ("json", "csv", "both")

_SCHEMA_PATH = Path(__file__).with_name("config_schema.json")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    precision: PrecisionConfig
    raw: dict
    potential: Potential = None
    strategy: str = "auto"
    omega: object = None
    gamma: object = None
    trace_scope: str = None
    n: int = None
    n_list: list = None
    moment_powers: list = field(default_factory=list)
    states: list = field(default_factory=lambda: [0])
    reference: object = None          # None | "self" | "qes" | dict
    qes: dict = None
    splitting: dict = None
    compare: dict = None
    out_dir: Path = Path("results")
    format: str = "both"


def default_precision_digits():
    env = os.environ.get(ENV_PRECISION)
    if env is None:
        return PrecisionConfig().digits
    try:
        return int(env)
    except ValueError as exc:
        raise ConfigError(f"{ENV_PRECISION} must be an integer, got {env!r}") from exc


def load_config(path, overrides=None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data, overrides or {})


def _schema_validate(data):
    import jsonschema
    with open(_SCHEMA_PATH, "r", encoding="utf-8") as fh:
        schema = json.load(fh)
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config schema violation at {path}: {exc.message}") from exc


def parse_config(data, overrides=None) -> RunConfig:
    overrides = overrides or {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _schema_validate(data)
    command = data["command"]
    digits = overrides.get("precision") or data.get("precision") or default_precision_digits()
    try:
        precision = PrecisionConfig(int(digits))
    except (PrecisionError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg = RunConfig(command=command, precision=precision, raw=data)
    cfg.out_dir = Path(overrides.get("out") or data.get("out", "results"))
    cfg.format = overrides.get("format") or data.get("format", "both")
    if cfg.format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    cfg.strategy = data.get("strategy", "auto")
    cfg.omega = data.get("omega")
    cfg.gamma = data.get("gamma")
    cfg.trace_scope = data.get("trace_scope")
    cfg.moment_powers = list(data.get("moment_powers", []))
    cfg.states = list(data.get("states", [0]))
    cfg.qes = data.get("qes")
    cfg.splitting = data.get("splitting")
    cfg.compare = data.get("compare")
    cfg.reference = data.get("reference")
    cfg.n = data.get("n")
    cfg.n_list = data.get("n_list")

    if command in ("solve", "sweep"):
        cfg.potential = _build_potential(data.get("potential"), cfg)
        _check_physics(cfg)
        if command == "solve" and cfg.n is None:
            raise ConfigError("solve requires n")
        if command == "sweep":
            if not cfg.n_list:
                raise ConfigError("sweep requires a nonempty n_list")
            if sorted(cfg.n_list) != cfg.n_list:
                raise ConfigError("n_list must be ascending")
    elif command == "qes":
        if not cfg.qes:
            raise ConfigError("qes command requires a qes block")
        build_family(cfg.qes)
    elif command == "splitting":
        if not cfg.splitting:
            raise ConfigError("splitting command requires a splitting block")
        g = _number(cfg.splitting.get("g"), "splitting.g")
        with workdps(cfg.precision):
            if mpf(g) <= 0:
                raise ConfigError("splitting.g must be positive")
        if int(cfg.splitting.get("n", 0)) < 2:
            raise ConfigError("splitting.n must be >= 2")
    elif command == "compare":
        if not cfg.compare:
            raise ConfigError("compare command requires a compare block")
        for key in ("result", "golden"):
            if key not in cfg.compare:
                raise ConfigError(f"compare block requires {key!r}")
    return cfg


def _number(value, where):
    if value is None:
        raise ConfigError(f"{where} is required")
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{where} must be a number or decimal string")
    return value


def _build_potential(block, cfg: RunConfig) -> Potential:
    if block is None:
        if cfg.reference == "qes" and cfg.qes:
            family = build_family(cfg.qes)
            with workdps(cfg.precision):
                sols = qes_mod.exact_energies(family, cfg.precision)
                index = int(cfg.qes.get("solution", 0))
                if index >= len(sols):
                    raise ConfigError(
                        f"qes.solution index {index} out of range ({len(sols)} solutions)")
                return sols[index].potential
        raise ConfigError("potential block is required (or derivable from a qes reference)")
    kind = block["kind"]
    terms = tuple((_term_power(k), _number(c, "term coefficient"))
                  for k, c in block["terms"])
    try:
        if kind == "1d":
            return Potential("1d", terms, parity=block.get("parity", "even"),
                             kinetic_scale=block.get("kinetic_scale", 1))
        return Potential("radial", terms, l=int(block.get("l", 0)),
                         kinetic_scale=block.get("kinetic_scale", 1))
    except PotentialError as exc:
        raise ConfigError(str(exc)) from exc


def _term_power(k):
    if isinstance(k, str):
        k = float(k)
    return k


def _check_physics(cfg: RunConfig):
    with workdps(cfg.precision):
        if cfg.omega is not None and mpf(_number(cfg.omega, "omega")) <= 0:
            raise ConfigError("omega must be positive")
        if cfg.potential.kind == "radial":
            bound = cfg.potential.gamma_lower_bound()
            if cfg.gamma is not None:
                g = mpf(_number(cfg.gamma, "gamma"))
                if g <= bound + GAMMA_POLE_OFFSET:
                    raise ConfigError(
                        f"gamma={g} violates the lower bound {bound} for this potential")
        elif cfg.gamma is not None:
            raise ConfigError("gamma applies only to radial potentials")


def build_family(block):
    name = block.get("family")
    try:
        if name == "sextic-1d":
            return qes_mod.Sextic1D(int(block["p"]), int(block.get("nu", 0)),
                                    block.get("lam", 1))
        if name == "sextic-radial":
            return qes_mod.SexticRadial(int(block["p"]), int(block.get("l", 0)),
                                        block.get("lam", 1))
        if name == "harmonium":
            return qes_mod.Harmonium(int(block["p"]), int(block.get("l", 0)),
                                     block.get("lam", 1))
        if name == "spiked":
            return qes_mod.Spiked(int(block["p"]), int(block.get("l", 0)),
                                  block.get("omega", 1))
    except (KeyError, ValueError, qes_mod.QESError) as exc:
        raise ConfigError(f"invalid qes block: {exc}") from exc
    raise ConfigError(f"unknown qes family {name!r}")
