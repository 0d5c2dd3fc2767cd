"""Distances between finite measures and truncation-based convergence checks.

The Levy distance between two right-continuous nondecreasing step functions
is the smallest h such that each function stays inside the other's h-band:

    d_L(F, G) = inf { h >= 0 : F(x-h) - h <= G(x) <= F(x+h) + h  for all x }.

Feasibility in h is monotone, and for step functions the sup over x is
attained on a finite critical set, so the infimum is found by bisection.

Whole-line comparisons weight measures by a falling ramp tied to a ladder of
order statistics: the k-th truncation multiplies each atom by a ramp that is
1 below rung k-1, falls linearly to 0 at rung k, and stays 0 beyond, keeping
all mass left of rung k.  The composite distance sums the per-truncation
Levy distances with geometric weights d_L / (2^k (1 + d_L)), so the value is
bounded by 1 and each unevaluated term by 2^-k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import AtomicMeasure, BetaProcessParams, _invert_hazard
from .rng import RngStream

_LEVY_TOL = 1e-9


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous nondecreasing step function, 0 left of all breakpoints."""

    xs: np.ndarray  # strictly increasing breakpoint locations
    ys: np.ndarray  # cumulative value at and beyond each breakpoint

    def __post_init__(self):
        xs = np.atleast_1d(np.asarray(self.xs, dtype=float))
        ys = np.atleast_1d(np.asarray(self.ys, dtype=float))
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError("xs and ys must be 1-D arrays of equal length")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("breakpoints must strictly increase")
        if np.any(np.diff(ys) < 0) or (ys.size and ys[0] < 0):
            raise ValueError("cumulative values must be nonnegative and nondecreasing")
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_measure(cls, m: AtomicMeasure) -> "StepFunction":
        m = m if m.is_normalized() else m.normalize()
        if len(m) == 0:
            return cls(np.zeros(1), np.zeros(1))
        cum = np.cumsum(m.weights)
        xs, first = np.unique(m.locations, return_index=True)
        last = np.append(first[1:], len(cum)) - 1
        return cls(xs, cum[last])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.xs, t, side="right")
        vals = np.concatenate([[0.0], self.ys])
        out = vals[idx]
        return out if out.ndim else float(out)

    @property
    def total(self) -> float:
        return float(self.ys[-1]) if self.ys.size else 0.0


def _band_violation(fa: StepFunction, fb: StepFunction, h: float) -> float:
    """sup over x of fa(x - h) - fb(x), attained on a finite critical set."""
    cand1 = fa.ys - fb(fa.xs + h)  # x just past a breakpoint of fa shifted right
    cand2 = fa(fb.xs - h) - fb.ys  # x at a breakpoint of fb
    return max(cand1.max(initial=0.0), cand2.max(initial=0.0))


def _feasible(f1: StepFunction, f2: StepFunction, h: float) -> bool:
    return _band_violation(f1, f2, h) <= h and _band_violation(f2, f1, h) <= h


def levy_distance(f1: StepFunction, f2: StepFunction, tol: float = _LEVY_TOL) -> float:
    """Levy distance by bisection on h, to absolute tolerance tol."""
    if _feasible(f1, f2, 0.0):
        return 0.0
    span = float(max(f1.xs.max(), f2.xs.max()) - min(f1.xs.min(), f2.xs.min()))
    hi = max(f1.total, f2.total, span, tol)
    if not _feasible(f1, f2, hi):  # numerical belt: widen once
        hi *= 2.0
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _feasible(f1, f2, mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class TruncationLadder:
    """Strictly increasing rungs (order statistics of a dedicated base draw)
    shared by every measure under comparison; rung 0 is the left edge."""

    rungs: np.ndarray
    left_edge: float = 0.0

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.rungs, dtype=float))
        if np.any(np.diff(r) <= 0):
            raise ValueError("ladder rungs must strictly increase")
        if r[0] <= self.left_edge:
            raise ValueError("first rung must lie right of the left edge")
        r.flags.writeable = False
        object.__setattr__(self, "rungs", r)

    def __len__(self) -> int:
        return self.rungs.size

    @classmethod
    def from_hazard(cls, p: BetaProcessParams, k: int, rng: RngStream,
                    left_edge: float = 0.0) -> "TruncationLadder":
        """Order statistics of k i.i.d. draws from the normalized hazard."""
        if k < 1:
            raise ValueError("need at least one rung")
        draws = np.sort(_invert_hazard(p, rng.generator().random(k)))
        return cls(draws, left_edge)


def truncation_ramp(ladder: TruncationLadder, k: int, t):
    """Ramp k: 1 below rung k-1, linear down to 0 at rung k, 0 beyond.

    Normalized by the rung gap so the ramp is continuous (a plain falling
    segment of unnormalized width would jump at the plateau edge).
    """
    if not 1 <= k <= len(ladder):
        raise ValueError(f"k must be in 1..{len(ladder)}")
    lower = ladder.left_edge if k == 1 else float(ladder.rungs[k - 2])
    upper = float(ladder.rungs[k - 1])
    if upper <= lower:
        raise ValueError("degenerate ladder rung")
    t = np.asarray(t, dtype=float)
    out = np.clip((upper - t) / (upper - lower), 0.0, 1.0)
    return out if out.ndim else float(out)


def truncate_measure(m: AtomicMeasure, ladder: TruncationLadder, k: int) -> StepFunction:
    """Step function of the measure reweighted by ramp k; constant at and
    beyond rung k."""
    m = m if m.is_normalized() else m.normalize()
    ramped = AtomicMeasure(m.locations, m.weights * truncation_ramp(ladder, k, m.locations))
    return StepFunction.from_measure(ramped)


def metric_d(
    m1: AtomicMeasure, m2: AtomicMeasure, ladder: TruncationLadder, k_max: int
) -> tuple[float, float]:
    """Partial sum of the composite metric over truncations 1..k_max.

    Returns (value, tail_bound); the exact metric lies in
    [value, value + tail_bound] since every further term is below 2^-k.
    """
    if not 1 <= k_max <= len(ladder):
        raise ValueError("k_max must be within the ladder")
    value = 0.0
    for k in range(1, k_max + 1):
        dl = levy_distance(truncate_measure(m1, ladder, k), truncate_measure(m2, ladder, k))
        value += dl / (2.0**k * (1.0 + dl))
    return value, 2.0**-k_max


def integrate_test_function(m: AtomicMeasure, f) -> float:
    """Integral of f against the measure: sum of weight * f(location)."""
    if len(m) == 0:
        return 0.0
    try:
        vals = np.asarray(f(m.locations), dtype=float)
        if vals.shape != m.locations.shape:
            raise TypeError
    except (TypeError, ValueError):
        vals = np.fromiter((float(f(x)) for x in m.locations), dtype=float, count=len(m))
    return float(m.weights @ vals)


def convergence_diagnostic(
    measures_by_n,
    reference: AtomicMeasure,
    ladder: TruncationLadder,
    k_max: int,
) -> list[dict]:
    """Per-truncation Levy distances to a reference for a family of measures.

    measures_by_n: iterable of (n, AtomicMeasure) built on one shared draw.
    Returns one row per (n, k): {n, k, d_L, d, tail_bound}.
    """
    rows = []
    for n, m in measures_by_n:
        d_val, tail = metric_d(m, reference, ladder, k_max)
        for k in range(1, k_max + 1):
            dl = levy_distance(
                truncate_measure(m, ladder, k), truncate_measure(reference, ladder, k)
            )
            rows.append({"n": n, "k": k, "d_L": dl, "d": d_val, "tail_bound": tail})
    return rows
