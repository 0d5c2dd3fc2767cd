"""Atomic random measures and beta-process parameters.

An AtomicMeasure is a finite collection of (location, weight) atoms on
[0, t0]; its distribution function is the right-continuous step function
t -> sum of weights at locations <= t.  BetaProcessParams bundles the
concentration function c, the cumulative hazard A0 and the horizon t0 that
parameterize every sampler in this package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BracketError, ConfigError
from .functions import ParamFunction
from .rng import RngStream

_VALIDATION_GRID = 2049


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite atomic measure; atoms kept in insertion order until normalize().

    Ties in location are preserved as distinct atoms (stable sort), matching
    the measure semantics: nothing is merged.
    """

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if loc.shape != w.shape or loc.ndim != 1:
            raise ValueError("locations and weights must be 1-D arrays of equal length")
        if not np.all(np.isfinite(loc)):
            raise ValueError("atom locations must be finite")
        if not (np.all(np.isfinite(w)) and np.all(w >= 0)):
            raise ValueError("atom weights must be finite and nonnegative")
        loc.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_atoms(cls, atoms) -> "AtomicMeasure":
        """Build from an iterable of (location, weight) pairs."""
        atoms = list(atoms)
        if not atoms:
            return cls.empty()
        loc, w = zip(*atoms)
        return cls(np.asarray(loc, dtype=float), np.asarray(w, dtype=float))

    @classmethod
    def empty(cls) -> "AtomicMeasure":
        return cls(np.empty(0), np.empty(0))

    def __len__(self) -> int:
        return self.locations.size

    @property
    def atoms(self) -> list:
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def normalize(self) -> "AtomicMeasure":
        """Atoms sorted by location; equal locations keep insertion order."""
        order = np.argsort(self.locations, kind="stable")
        return AtomicMeasure(self.locations[order], self.weights[order])

    def is_normalized(self) -> bool:
        return bool(np.all(np.diff(self.locations) >= 0))

    def distribution_function(self, t):
        """Sum of weights at locations <= t (right-continuous, nondecreasing)."""
        if not self.is_normalized():
            raise ValueError("measure must be normalized first")
        t = np.asarray(t, dtype=float)
        if len(self) == 0:
            out = np.zeros_like(t)
            return out if out.ndim else float(out)
        cum = np.cumsum(self.weights)
        idx = np.searchsorted(self.locations, t, side="right")
        out = np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)
        return out if out.ndim else float(out)


def distribution_function(m: AtomicMeasure, t):
    return m.distribution_function(t)


@dataclass(frozen=True)
class BetaProcessParams:
    """Concentration c(.), cumulative hazard A0(.), horizon t0.

    Requires c > 0 on [0, t0] and A0 continuous, nondecreasing with
    A0(0) = 0 and 0 < A0(t0) < inf.  Both are checked on a dense grid at
    construction, so invalid configs fail fast rather than mid-sampling.
    """

    c: ParamFunction
    A0: ParamFunction
    t0: float
    A0_total: float = field(init=False)

    def __post_init__(self):
        if not np.isfinite(self.t0) or self.t0 <= 0:
            raise ConfigError("t0 must be a positive finite number")
        grid = np.linspace(0.0, self.t0, _VALIDATION_GRID)
        cv = np.asarray(self.c(grid))
        if not np.all(np.isfinite(cv)) or np.any(cv <= 0):
            raise ConfigError("c(t) must be positive and finite on [0, t0]")
        av = np.asarray(self.A0(grid))
        if not np.all(np.isfinite(av)):
            raise ConfigError("A0(t) must be finite on [0, t0]")
        total = float(av[-1])
        scale = max(abs(total), 1.0)
        if np.any(np.diff(av) < -1e-12 * scale):
            raise ConfigError("A0 must be nondecreasing on [0, t0]")
        if abs(float(av[0])) > 1e-12 * scale:
            raise ConfigError("A0(0) must be 0")
        if total <= 0:
            raise ConfigError("A0(t0) must be positive")
        object.__setattr__(self, "A0_total", total)

    def to_config(self) -> dict:
        return {"c": self.c.to_config(), "A0": self.A0.to_config(), "t0": self.t0}

    @classmethod
    def from_config(cls, cfg: dict) -> "BetaProcessParams":
        try:
            c = ParamFunction.from_config(cfg["c"])
            a0 = ParamFunction.from_config(cfg["A0"])
            t0 = float(cfg["t0"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"params config needs c, A0, t0: {exc}") from exc
        return cls(c, a0, t0)


def sample_base_locations(p: BetaProcessParams, n: int, rng: RngStream) -> np.ndarray:
    """n i.i.d. locations from the normalized hazard measure A0(dt)/A0(t0).

    Uses the family's analytic inverse when available, otherwise bisection on
    A0(t) = u * A0(t0) to 1e-12 absolute tolerance in t.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u = rng.generator().random(n)
    return _invert_hazard(p, u)


def _invert_hazard(p: BetaProcessParams, u: np.ndarray) -> np.ndarray:
    target = u * p.A0_total
    inv = p.A0.inverse(target)
    if inv is not None:
        return np.clip(np.asarray(inv, dtype=float), 0.0, p.t0)
    lo = np.zeros_like(target)
    hi = np.full_like(target, p.t0)
    flo = np.asarray(p.A0(lo)) - target
    fhi = np.asarray(p.A0(hi)) - target
    if np.any(flo > 1e-12 * p.A0_total) or np.any(fhi < -1e-12 * p.A0_total):
        raise BracketError("A0 does not bracket the requested quantile on [0, t0]")
    while np.max(hi - lo) > 1e-12:
        mid = 0.5 * (lo + hi)
        fm = np.asarray(p.A0(mid)) - target
        take_hi = fm >= 0
        hi = np.where(take_hi, mid, hi)
        lo = np.where(take_hi, lo, mid)
    return 0.5 * (lo + hi)


def gamma_arrivals(n: int, rng: RngStream) -> np.ndarray:
    """Arrival times of a unit-rate Poisson process: cumulative sums of
    i.i.d. unit exponentials, strictly increasing."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.cumsum(rng.generator().exponential(1.0, size=n))
