"""Flat ``section.key = value`` run configurations."""

import math
import re
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .bounds import ProblemSpec
from .errors import InvalidSpec
from .geometry import Annulus, Ball, Cone2D, Constant, ExteriorOfBall, FullSpace, RadialPower
from .nonlinearity import MaxPowers, PowerQ, SingularOneMinusU, SumPowers

COMMANDS = ("classify", "bound", "deadcore", "verify", "cone-example")

# key -> (kind, default); kind is "int", "float", "floats", "radii" or a tuple of allowed words
SCHEMA = {
    "command": (COMMANDS, None),
    "problem.N": ("int", None),
    "problem.p": ("float", 0.0),
    "f.family": (("power", "sum", "max", "singular"), None),
    "f.q": ("float", None),
    "f.r": ("float", None),
    "weight.kind": (("constant", "radial_power"), "constant"),
    "weight.c": ("float", 1.0),
    "weight.beta": ("float", None),
    "domain.shape": (("full", "ball", "exterior", "annulus", "cone2d"), "full"),
    "domain.R": ("float", None),
    "domain.R1": ("float", None),
    "domain.R2": ("float", None),
    "domain.theta0": ("float", None),
    "bound.center": ("floats", None),
    "bound.radii": ("radii", None),
    "verify.a": ("float", 10.0),
    "verify.b": ("float", 1.0),
    "verify.pairs": ("int", 50),
    "verify.seed": ("int", 0),
    "verify.grid_n": ("int", 33),
    "verify.samples": ("int", 1024),
    "cone.theta0": ("float", None),
    "cone.q": ("float", None),
}

_PI = re.compile(r"^(?:(?P<k>[-+]?\d+(?:\.\d*)?)\s*\*\s*)?pi(?:\s*/\s*(?P<m>\d+(?:\.\d*)?))?$")


class ConfigError(InvalidSpec):
    pass


def _number(text: str) -> float:
    t = text.strip()
    m = _PI.match(t)
    if m:
        k = float(m.group("k")) if m.group("k") else 1.0
        d = float(m.group("m")) if m.group("m") else 1.0
        return k * math.pi / d
    try:
        v = float(t)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None
    if math.isnan(v):
        raise ConfigError("nan is not allowed")
    return v


def _convert(key, kind, text):
    if isinstance(kind, tuple):
        if text not in kind:
            raise ConfigError(f"{key} must be one of {', '.join(kind)}; got {text!r}")
        return text
    if kind == "int":
        v = _number(text)
        if v != int(v):
            raise ConfigError(f"{key} must be an integer; got {text!r}")
        return int(v)
    if kind == "float":
        return _number(text)
    if kind == "floats":
        return tuple(_number(t) for t in text.split(","))
    # radii: comma list or start:stop:count
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key} range must be start:stop:count")
        a, b, n = _number(parts[0]), _number(parts[1]), _convert(key, "int", parts[2])
        if n < 1:
            raise ConfigError(f"{key} needs a positive count")
        return tuple(float(v) for v in np.linspace(a, b, n))
    return tuple(_number(t) for t in text.split(","))


def _render(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not config values")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, tuple):
        return ",".join(_render(x) for x in v)
    return repr(float(v))


@dataclass
class RunConfig:
    values: Dict[str, object] = field(default_factory=dict)

    @property
    def command(self) -> Optional[str]:
        return self.values.get("command")

    def get(self, key):
        if key not in SCHEMA:
            raise KeyError(key)
        if key in self.values:
            return self.values[key]
        return SCHEMA[key][1]

    def require(self, key):
        v = self.get(key)
        if v is None:
            raise ConfigError(f"missing required key {key}")
        return v

    def echo(self) -> Dict[str, object]:
        return {k: self.values[k] for k in sorted(self.values)}


def parse(text: str) -> RunConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _convert(key, SCHEMA[key][0], val)
    return RunConfig(values)


def serialize(cfg: RunConfig) -> str:
    return "".join(f"{k} = {_render(cfg.values[k])}\n" for k in sorted(cfg.values))


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def build_nonlinearity(cfg: RunConfig):
    fam = cfg.require("f.family")
    q = cfg.require("f.q")
    if fam == "power":
        return PowerQ(q)
    if fam == "singular":
        return SingularOneMinusU(q)
    r = cfg.require("f.r")
    return SumPowers(q, r) if fam == "sum" else MaxPowers(q, r)


def build_weight(cfg: RunConfig):
    if cfg.get("weight.kind") == "constant":
        return Constant(cfg.get("weight.c"))
    return RadialPower(cfg.require("weight.beta"))


def build_domain(cfg: RunConfig):
    shape = cfg.get("domain.shape")
    if shape == "full":
        return FullSpace()
    if shape == "ball":
        return Ball(cfg.require("domain.R"))
    if shape == "exterior":
        return ExteriorOfBall(cfg.require("domain.R"))
    if shape == "annulus":
        return Annulus(cfg.require("domain.R1"), cfg.require("domain.R2"))
    return Cone2D(cfg.require("domain.theta0"))


def build_spec(cfg: RunConfig) -> ProblemSpec:
    return ProblemSpec(
        N=cfg.require("problem.N"), p=cfg.get("problem.p"), f=build_nonlinearity(cfg),
        weight=build_weight(cfg), domain=build_domain(cfg),
    )
