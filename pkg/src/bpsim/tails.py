"""Fast evaluation and inversion of beta-process jump tail masses.

The building block is

    T(c, x) = integral over s in (x, 1) of s^(-1) (1-s)^(c-1) ds,

the tail of the (improper) jump-size intensity for concentration c.  Two
complementary expansions cover (0, 1):

  x <= cut:  T = -ln x - psi(c) - euler_gamma - sum_{k>=1} a_k x^k / k,
             a_k = prod_{j<=k} (j - c) / j    (binomial series, ratio x)
  x >  cut:  T = sum_{k>=0} y^(c+k) / (c+k),  y = 1 - x   (ratio y)

Both vectorize over c and x, exit early once the geometric tail bound is
negligible, and hold ~1e-13 relative accuracy over the concentration ranges
hazard models use.  On top of T this module provides the pooled tail of a
mixture sum_k W_k T(c_k, x) (the location-dependent case, where the mixture
is a quadrature over locations) and safeguarded Newton inverses of both;
series samplers spend nearly all their time here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import SamplerError

_CUT = 0.2
_LOG_TERMS = 120
_POW_MAX_TERMS = 4000
_POW_BLOCK = 40
_EPS = 1e-17


def tail_integral(c, x):
    """T(c, x) for x in (0, 1], elementwise over broadcast inputs."""
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    scalar = c.ndim == 0 and x.ndim == 0
    c, x = np.broadcast_arrays(np.atleast_1d(c), np.atleast_1d(x))
    if np.any(x <= 0) or np.any(x > 1):
        raise ValueError("tail_integral requires x in (0, 1]")
    out = np.empty(x.shape, dtype=float)
    small = x <= _CUT
    if small.any():
        acc, _ = _log_series(c[small], x[small])
        out[small] = (
            -np.log(x[small]) - sp.digamma(c[small]) - np.euler_gamma - acc
        )
    if (~small).any():
        out[~small] = _tail_power_branch(c[~small], 1.0 - x[~small])
    return float(out[0]) if scalar else out


def _log_series(c, x):
    """Binomial-series correction of the small-x branch:
    (sum a_k x^k / k, sum a_k x^k), with early exit once |a_k| decays and the
    geometric remainder is negligible."""
    acc = np.zeros_like(x)
    dacc = np.zeros_like(x)
    a = np.ones_like(c)
    xp = np.ones_like(x)
    c_max = float(c.max(initial=0.0))
    x_max = float(x.max(initial=0.0))
    for k in range(1, _LOG_TERMS + 1):
        a = a * (k - c) / k
        xp = xp * x
        acc += a * xp / k
        dacc += a * xp
        if k >= c_max and k % 8 == 0:
            # |a| is decreasing from here on, so the remainder is geometric
            rem = float(np.max(np.abs(a))) * x_max / (1.0 - x_max)
            if rem * x_max**k <= _EPS:
                break
    return acc, dacc


def _tail_power_branch(c, y):
    # sum in blocks on gathered subarrays, dropping elements whose geometric
    # tail bound has fallen below the target accuracy
    with np.errstate(divide="ignore"):
        yp = np.exp(c * np.log(y))
    yp[y == 0.0] = 0.0
    total = np.zeros_like(y)
    idx = np.arange(y.size)
    cc, yy, pp = c, y, yp
    k = 0
    while idx.size and k < _POW_MAX_TERMS:
        acc = np.zeros_like(yy)
        for _ in range(_POW_BLOCK):
            acc += pp / (cc + k)
            pp = pp * yy
            k += 1
        total[idx] += acc
        bound = pp / ((cc + k) * (1.0 - yy))
        keep = bound > _EPS * (total[idx] + 1e-300)
        if not keep.all():
            idx = idx[keep]
            cc, yy, pp = cc[keep], yy[keep], pp[keep]
    return total


def limit_tail(params, z, x):
    """Jump tail mass at concentration c(z), scaled by the total hazard mass:
    A0(t0) * c(z) * T(c(z), x).  Strictly decreasing in x, diverging at 0+."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x >= 1):
        raise ValueError("limit_tail requires x in (0, 1)")
    c = np.asarray(params.c(z), dtype=float)
    out = params.A0_total * c * tail_integral(c, x)
    return out if out.ndim else float(out)


def finite_tail(params, n, theta, x):
    """Tail of the size-n finite approximation at location theta:
    1 - I_x(c/n, c(1 - 1/n)), the Beta survival function at x."""
    if n < 2:
        raise ValueError("finite approximation needs n >= 2")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x > 1):
        raise ValueError("finite_tail requires x in (0, 1]")
    c = np.asarray(params.c(theta), dtype=float)
    if np.any(c <= 0):
        raise ValueError("concentration must be positive")
    out = 1.0 - sp.betainc(c / n, c * (1.0 - 1.0 / n), x)
    return out if out.ndim else float(out)


def _safeguarded_newton(u, lo, hi, fdf, tol, increasing, max_iter=60):
    """Newton iteration on f(u) = 0 with bisection fallback inside [lo, hi].

    fdf(u_active, active_indices) -> (f, df).  `increasing` gives the sign of
    df, used to shrink the bracket.  Only unconverged elements are revisited.
    """
    u = u.copy()
    active = np.arange(u.size)
    for _ in range(max_iter):
        f, df = fdf(u[active], active)
        keep = np.abs(f) > tol[active]
        if not keep.any():
            break
        active = active[keep]
        f = f[keep]
        df = df[keep]
        ua = u[active]
        above = (f > 0) == increasing  # current u sits right of the root
        hi[active] = np.where(above, np.minimum(hi[active], ua), hi[active])
        lo[active] = np.where(~above, np.maximum(lo[active], ua), lo[active])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            un = ua - f / df
        bad = ~np.isfinite(un) | (un <= lo[active]) | (un >= hi[active])
        un[bad] = 0.5 * (lo[active][bad] + hi[active][bad])
        stuck = un == ua
        un[stuck] = 0.5 * (lo[active][stuck] + hi[active][stuck])
        u[active] = un
    return u


def _verify_solved(f_residual, tol, what):
    bad = np.abs(f_residual) > 1e3 * tol
    if bad.any():
        idx = np.flatnonzero(bad)
        raise SamplerError(
            f"{what} did not converge at index {idx[0]} "
            f"(residual {f_residual[idx[0]]:.3g}, {idx.size} total)"
        )


def invert_scalar_tails(c, targets):
    """Solve T(c_i, x_i) = targets_i elementwise; targets must be > 0.

    Accurate to ~1e-12 relative in x wherever x is representable; raises
    SamplerError naming the first failing index if an inversion stalls.
    """
    c = np.asarray(c, dtype=float)
    t = np.asarray(targets, dtype=float)
    shape = np.broadcast_shapes(c.shape, t.shape)
    c = np.broadcast_to(c, shape).ravel()
    t = np.broadcast_to(t, shape).ravel()
    if np.any(t <= 0):
        raise ValueError("tail targets must be positive")
    x = np.empty_like(t)
    split = tail_integral(c, np.full_like(t, _CUT))
    small = t >= split  # tail mass large -> x at or below the cut
    if small.any():
        cs, ts = c[small], t[small]
        base = sp.digamma(cs) + np.euler_gamma

        def fdf(u, idx):
            acc, dacc = _log_series(cs[idx], np.exp(u))
            return -u - base[idx] - acc - ts[idx], -1.0 - dacc

        u0 = np.minimum(-(ts + base), np.log(_CUT) - 1e-9)
        u = _safeguarded_newton(
            u0,
            u0 - 80.0,
            np.full_like(u0, np.log(_CUT)),
            fdf,
            tol=1e-13 * (1.0 + ts),
            increasing=False,
        )
        resid, _ = fdf(u, np.arange(u.size))
        _verify_solved(resid, 1e-13 * (1.0 + ts), "tail inversion (small branch)")
        x[small] = np.exp(u)
    big = ~small
    if big.any():
        cb, tb = c[big], t[big]

        def fdf(w, idx):
            y = np.exp(w)
            val = _tail_power_branch(cb[idx], y)
            with np.errstate(over="ignore"):
                dval = np.exp(cb[idx] * w) / (1.0 - y)
            return val - tb[idx], dval

        w_hi = np.log(1.0 - _CUT)
        w0 = np.minimum((np.log(tb) + np.log(cb)) / cb, w_hi - 1e-9)
        w = _safeguarded_newton(
            w0,
            np.full_like(w0, -760.0),
            np.full_like(w0, w_hi),
            fdf,
            tol=1e-13 * tb,
            increasing=True,
        )
        resid, _ = fdf(w, np.arange(w.size))
        _verify_solved(resid, 1e-13 * tb, "tail inversion (near-1 branch)")
        x[big] = -np.expm1(w)
    return x.reshape(shape)


@dataclass(frozen=True)
class TailMixture:
    """Tail mass pooled over locations: L(x) = sum_k W_k T(c_k, x).

    Nodes and weights come from a quadrature of c(z) dA0(z) over the horizon,
    making L(x) the expected number of jumps of size above x.  The small-x
    series coefficients pool across components, so evaluating or inverting L
    costs the same as a single-component tail.
    """

    cs: np.ndarray
    ws: np.ndarray
    base: float  # sum W_k (psi(c_k) + euler_gamma)
    mass: float  # sum W_k = total expected hazard c dA0
    pooled: np.ndarray  # pooled series coefficients A_k = sum_j W_j a_k(c_j)
    tail_absmax: np.ndarray  # running max of |pooled| from each index on
    big_w: np.ndarray  # precomputed ln(1-x) grid for the near-1 inverse
    big_l: np.ndarray  # L on that grid (increasing)

    @classmethod
    def from_nodes(cls, cs, ws) -> "TailMixture":
        cs = np.asarray(cs, dtype=float)
        ws = np.asarray(ws, dtype=float)
        a = np.ones_like(cs)
        pooled = np.empty(_LOG_TERMS)
        for k in range(1, _LOG_TERMS + 1):
            a = a * (k - cs) / k
            pooled[k - 1] = float(ws @ a)
        tail_absmax = np.maximum.accumulate(np.abs(pooled)[::-1])[::-1]
        big_w = np.linspace(-80.0, np.log(1.0 - _CUT), 256)
        vals = _tail_power_branch(
            np.repeat(cs, big_w.size), np.tile(np.exp(big_w), cs.size)
        ).reshape(cs.size, big_w.size)
        return cls(
            cs=cs,
            ws=ws,
            base=float(ws @ (sp.digamma(cs) + np.euler_gamma)),
            mass=float(ws.sum()),
            pooled=pooled,
            tail_absmax=tail_absmax,
            big_w=big_w,
            big_l=ws @ vals,
        )

    def _series(self, x):
        acc = np.zeros_like(x)
        dacc = np.zeros_like(x)
        xp = np.ones_like(x)
        x_max = float(x.max(initial=0.0))
        for k, coef in enumerate(self.pooled, start=1):
            xp = xp * x
            acc += coef * xp / k
            dacc += coef * xp
            if k % 8 == 0 and k < _LOG_TERMS:
                rem = self.tail_absmax[k] * x_max ** (k + 1) / (1.0 - x_max)
                if rem <= _EPS * (1.0 + self.mass):
                    break
        return acc, dacc

    def value(self, x):
        """L(x), elementwise over x in (0, 1]."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if np.any(x <= 0) or np.any(x > 1):
            raise ValueError("mixture tail requires x in (0, 1]")
        out = np.empty_like(x)
        small = x <= _CUT
        if small.any():
            xs = x[small]
            acc, _ = self._series(xs)
            out[small] = -self.mass * np.log(xs) - self.base - acc
        if (~small).any():
            out[~small] = self._value_big(1.0 - x[~small])
        return float(out[0]) if scalar else out

    def _value_big(self, y):
        vals = _tail_power_branch(
            np.repeat(self.cs, y.size), np.tile(y, self.cs.size)
        ).reshape(self.cs.size, y.size)
        return self.ws @ vals

    def invert(self, targets):
        """Solve L(x) = target elementwise for targets > 0."""
        t = np.atleast_1d(np.asarray(targets, dtype=float))
        if np.any(t <= 0):
            raise ValueError("tail targets must be positive")
        x = np.empty_like(t)
        split = float(self.big_l[-1])  # L at the branch cut
        small = t >= split
        if small.any():
            ts = t[small]

            def fdf(u, idx):
                acc, dacc = self._series(np.exp(u))
                return -self.mass * u - self.base - acc - ts[idx], -self.mass - dacc

            u0 = np.minimum(-(ts + self.base) / self.mass, np.log(_CUT) - 1e-9)
            u = _safeguarded_newton(
                u0,
                u0 - 80.0,
                np.full_like(u0, np.log(_CUT)),
                fdf,
                tol=1e-13 * (1.0 + ts),
                increasing=False,
            )
            resid, _ = fdf(u, np.arange(u.size))
            _verify_solved(resid, 1e-13 * (1.0 + ts), "pooled tail inversion")
            x[small] = np.exp(u)
        big = ~small
        if big.any():
            x[big] = self._invert_big(t[big])
        out = x.reshape(np.shape(targets))
        return float(out) if np.ndim(targets) == 0 else out

    def _invert_big(self, t):
        # few queries land here (only the smallest arrivals); Newton on
        # ln(1-x) from an interpolated start against the precomputed grid
        if np.any(t < self.big_l[0]):
            raise SamplerError("tail inversion failed to bracket near x = 1")

        def fdf(w, idx):
            y = np.exp(w)
            val = self._value_big(y) - t[idx]
            dval = (self.ws @ np.exp(np.outer(self.cs, w))) / (1.0 - y)
            return val, dval

        w0 = np.interp(t, self.big_l, self.big_w)
        w = _safeguarded_newton(
            w0,
            np.full_like(w0, self.big_w[0] - 1.0),
            np.full_like(w0, self.big_w[-1] + 1e-12),
            fdf,
            tol=1e-13 * t,
            increasing=True,
        )
        return 1.0 - np.exp(w)
