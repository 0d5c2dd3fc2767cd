"""Named scalar function families for concentration and cumulative-hazard inputs.

Process parameters are restricted to a small set of closed-form families so
that configs stay declarative (no expression parsing) while covering the
standard experiment c(t) = 2 exp(-t), A0(t) = t and the obvious variants.

Config form: ``{"family": "exp_decay", "params": [2.0, 1.0]}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError

FAMILIES = ("constant", "linear", "power", "exp_decay", "exp_ramp", "piecewise_linear")


@dataclass(frozen=True)
class ParamFunction:
    """One member of a named family, evaluable on scalars or arrays.

    Families (params):
      constant (v)            -> v
      linear (a)              -> a * t
      power (a, b)            -> a * t**b
      exp_decay (c0, r)       -> c0 * exp(-r * t)
      exp_ramp (a, r)         -> a * (1 - exp(-r * t))
      piecewise_linear (t0, v0, t1, v1, ...) -> linear interpolation through knots
    """

    family: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown function family: {self.family!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        n = len(self.params)
        expected = {"constant": 1, "linear": 1, "power": 2, "exp_decay": 2, "exp_ramp": 2}
        if self.family in expected and n != expected[self.family]:
            raise ConfigError(
                f"family {self.family!r} takes {expected[self.family]} params, got {n}"
            )
        if self.family == "piecewise_linear":
            if n < 4 or n % 2 != 0:
                raise ConfigError("piecewise_linear needs an even number (>= 4) of params")
            ts = np.asarray(self.params[0::2])
            if np.any(np.diff(ts) <= 0):
                raise ConfigError("piecewise_linear knot locations must strictly increase")

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        fam, p = self.family, self.params
        if fam == "constant":
            out = np.full_like(t, p[0])
        elif fam == "linear":
            out = p[0] * t
        elif fam == "power":
            out = p[0] * np.power(t, p[1])
        elif fam == "exp_decay":
            out = p[0] * np.exp(-p[1] * t)
        elif fam == "exp_ramp":
            out = p[0] * -np.expm1(-p[1] * t)
        else:
            out = np.interp(t, p[0::2], p[1::2])
        return out if out.ndim else float(out)

    def derivative(self, t):
        """Pointwise derivative; piecewise_linear uses the right-hand slope."""
        t = np.asarray(t, dtype=float)
        fam, p = self.family, self.params
        if fam == "constant":
            out = np.zeros_like(t)
        elif fam == "linear":
            out = np.full_like(t, p[0])
        elif fam == "power":
            out = p[0] * p[1] * np.power(t, p[1] - 1.0)
        elif fam == "exp_decay":
            out = -p[0] * p[1] * np.exp(-p[1] * t)
        elif fam == "exp_ramp":
            out = p[0] * p[1] * np.exp(-p[1] * t)
        else:
            ts = np.asarray(p[0::2])
            vs = np.asarray(p[1::2])
            slopes = np.diff(vs) / np.diff(ts)
            idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(slopes) - 1)
            out = slopes[idx]
        return out if out.ndim else float(out)

    def inverse(self, y) -> Optional[np.ndarray]:
        """Analytic inverse where the family is strictly increasing, else None."""
        fam, p = self.family, self.params
        y = np.asarray(y, dtype=float)
        if fam == "linear" and p[0] > 0:
            out = y / p[0]
        elif fam == "power" and p[0] > 0 and p[1] > 0:
            out = np.power(y / p[0], 1.0 / p[1])
        elif fam == "exp_ramp" and p[0] > 0 and p[1] > 0:
            # y = a (1 - e^{-rt})  =>  t = -ln(1 - y/a) / r
            out = -np.log1p(-y / p[0]) / p[1]
        elif fam == "piecewise_linear":
            vs = np.asarray(p[1::2])
            if np.any(np.diff(vs) <= 0):
                return None
            out = np.interp(y, vs, np.asarray(p[0::2]))
        else:
            return None
        return out if out.ndim else float(out)

    def breakpoints(self) -> tuple:
        """Interior knots where the function is not smooth."""
        if self.family == "piecewise_linear":
            return self.params[0::2]
        return ()

    # -- serialization ------------------------------------------------------

    def to_config(self) -> dict:
        return {"family": self.family, "params": list(self.params)}

    @classmethod
    def from_config(cls, cfg: dict) -> "ParamFunction":
        if not isinstance(cfg, dict) or "family" not in cfg:
            raise ConfigError(f"function config must be {{family, params}}, got {cfg!r}")
        params: Sequence = cfg.get("params", ())
        if params and isinstance(params[0], (list, tuple)):
            # accept [[t, v], ...] knot pairs for piecewise_linear
            params = [x for pair in params for x in pair]
        return cls(cfg["family"], tuple(params))


def constant(v: float) -> ParamFunction:
    return ParamFunction("constant", (v,))


def linear(a: float) -> ParamFunction:
    return ParamFunction("linear", (a,))


def power(a: float, b: float) -> ParamFunction:
    return ParamFunction("power", (a, b))


def exp_decay(c0: float, r: float) -> ParamFunction:
    return ParamFunction("exp_decay", (c0, r))


def exp_ramp(a: float, r: float) -> ParamFunction:
    return ParamFunction("exp_ramp", (a, r))


def piecewise_linear(knots: Sequence) -> ParamFunction:
    flat = []
    for k in knots:
        if isinstance(k, (list, tuple)):
            flat.extend(k)
        else:
            flat.append(k)
    return ParamFunction("piecewise_linear", tuple(flat))
