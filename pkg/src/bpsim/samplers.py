"""Finite-sample approximations of the beta process.

Six algorithms, all pure functions of (params, settings, RngStream) returning
a normalized AtomicMeasure on [0, t0]:

  sample_new_vague        quantile-coupled arrivals (the cheap default)
  sample_beta_dirichlet   the same draw split across Dirichlet coordinates
  sample_ferguson_klass   inverse of the pooled jump tail + location inversion
  sample_wolpert_ickstadt per-location jump tail inversion
  sample_damien_laud_smith  compound-Poisson increments on a partition
  sample_lee_kim          Poisson number of jumps, Beta(eps, c) sizes
  sample_lee              Poisson-thinned Beta(eps, c) jump field

The lower-level *_weights / *_jumps helpers take explicit (theta, gamma)
inputs so coupled experiments can reuse one recorded draw across settings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import special as sp

from .errors import SamplerError
from .functions import ParamFunction
from .measures import AtomicMeasure, BetaProcessParams, _invert_hazard
from .rng import RngStream
from .special import beta_quantile
from .tails import TailMixture, finite_tail, invert_scalar_tails, limit_tail

_POISSON_RATE_CAP = 1e12

__all__ = [
    "SamplerSettings",
    "levy_tail_finite",
    "levy_tail_limit",
    "new_vague_weights",
    "wolpert_ickstadt_jumps",
    "sample_new_vague",
    "sample_beta_dirichlet",
    "sample_ferguson_klass",
    "sample_wolpert_ickstadt",
    "sample_damien_laud_smith",
    "sample_lee_kim",
    "sample_lee",
    "sample_path",
    "ALGORITHMS",
]


@dataclass(frozen=True)
class SamplerSettings:
    """Per-algorithm tuning knobs; only the relevant fields are read."""

    n: int = 200
    epsilon: float = 0.01
    m: int = 200
    dirichlet_gammas: Optional[tuple] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        if self.m < 1:
            raise ValueError("m must be >= 1")


# -- tail functions (thin wrappers so callers need not import tails) ---------


def levy_tail_finite(p: BetaProcessParams, n: int, theta, x):
    """Tail of the size-n approximation at location theta; decreasing in x,
    1 at x -> 0+ and 0 at x = 1."""
    return finite_tail(p, n, theta, x)


def levy_tail_limit(p: BetaProcessParams, z, x):
    """Limiting jump tail mass at location z, for x in (0, 1)."""
    return limit_tail(p, z, x)


# -- the new finite approximation --------------------------------------------


def new_vague_weights(p: BetaProcessParams, n: int, theta, gammas) -> np.ndarray:
    """Weights of the quantile-coupled approximation for given locations and
    arrival times: the (1 - gamma_i / (A0_total n))-quantile of
    Beta(c_i/n, c_i(1 - 1/n)), and 0 once arrivals pass the total mass."""
    if n < 2:
        raise ValueError("the quantile sampler needs n >= 2")
    theta = np.asarray(theta, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    c = np.asarray(p.c(theta), dtype=float)
    levels = 1.0 - gammas / (p.A0_total * n)
    w = np.zeros_like(levels)
    pos = levels > 0
    if pos.any():
        w[pos] = beta_quantile(c[pos] / n, c[pos] * (1.0 - 1.0 / n), levels[pos])
    return w


def sample_new_vague(p: BetaProcessParams, n: int, rng: RngStream) -> AtomicMeasure:
    """Draw locations i.i.d. from the normalized hazard and weights from the
    quantile coupling of unit-rate Poisson arrivals."""
    gen = rng.generator()
    theta = _invert_hazard(p, gen.random(n))
    gam = np.cumsum(gen.exponential(1.0, size=n))
    return AtomicMeasure(theta, new_vague_weights(p, n, theta, gam)).normalize()


def sample_beta_dirichlet(
    p: BetaProcessParams,
    gammas: Sequence[ParamFunction],
    n: int,
    rng: RngStream,
) -> list[AtomicMeasure]:
    """One new-vague draw split across Dirichlet coordinates.

    Coordinate j gets weight V_j(theta_i) * w_i with V(theta_i) Dirichlet
    distributed with parameters (gamma_1(theta_i), ..., gamma_J(theta_i)); the
    coordinates sum back to the base weights exactly.
    """
    if not gammas:
        raise ValueError("need at least one Dirichlet parameter function")
    gen = rng.generator()
    theta = _invert_hazard(p, gen.random(n))
    gam = np.cumsum(gen.exponential(1.0, size=n))
    base = new_vague_weights(p, n, theta, gam)

    shape = np.stack([np.asarray(g(theta), dtype=float) for g in gammas])
    if np.any(shape <= 0) or not np.all(np.isfinite(shape)):
        raise ValueError("Dirichlet parameters must be positive and finite")
    draws = gen.gamma(shape)
    totals = draws.sum(axis=0)
    dead = totals == 0.0  # all-coordinate underflow for tiny parameters
    if dead.any():
        draws[:, dead] = 1.0
        totals[dead] = float(len(gammas))
    v = draws / totals
    order = np.argsort(theta, kind="stable")
    return [AtomicMeasure(theta[order], (vj * base)[order]) for vj in v]


# -- series representations (pooled and per-location tail inversion) ---------


def _hazard_panels(p: BetaProcessParams, per_segment: int):
    """Panel boundaries over [0, t0], split at family knots, refined
    geometrically near 0 when the hazard density is singular there."""
    knots = sorted(
        {0.0, p.t0}
        | {float(b) for b in p.c.breakpoints() if 0.0 < b < p.t0}
        | {float(b) for b in p.A0.breakpoints() if 0.0 < b < p.t0}
    )
    bounds = []
    singular = p.A0.family == "power" and p.A0.params[1] < 1.0
    for left, right in zip(knots[:-1], knots[1:]):
        if left == 0.0 and singular:
            geo = right * 2.0 ** -np.arange(40, 0, -1)
            bounds.extend([left] + list(geo))
        else:
            bounds.extend(np.linspace(left, right, per_segment + 1)[:-1])
    bounds.append(p.t0)
    return np.unique(np.asarray(bounds))


_GL8 = np.polynomial.legendre.leggauss(8)
_GL8_X01 = 0.5 * (_GL8[0] + 1.0)
_GL8_W01 = 0.5 * _GL8[1]


def _panel_nodes(bounds: np.ndarray):
    """GL-8 nodes/weights per panel for integrals against dz."""
    widths = np.diff(bounds)
    z = bounds[:-1, None] + widths[:, None] * _GL8_X01[None, :]
    w = widths[:, None] * _GL8_W01[None, :]
    return z, w


class _HazardCdf:
    """Inverse-CDF sampler for densities rho(z) dz = c(z) A0'(z) dz.

    Panel masses are exact Gauss-Legendre sums; inversion locates the panel
    and bisects inside it against the partial Gauss-Legendre integral, so the
    result is accurate to ~1e-12 * t0 for the named families.
    """

    def __init__(self, p: BetaProcessParams, per_segment: int = 48):
        self.p = p
        self.bounds = _hazard_panels(p, per_segment)
        z, w = _panel_nodes(self.bounds)
        dens = np.asarray(p.c(z)) * np.asarray(p.A0.derivative(z))
        self.panel_mass = (w * dens).sum(axis=1)
        self.cum = np.concatenate([[0.0], np.cumsum(self.panel_mass)])
        self.total = float(self.cum[-1])

    def _density(self, z):
        return np.asarray(self.p.c(z)) * np.asarray(self.p.A0.derivative(z))

    def invert(self, u: np.ndarray) -> np.ndarray:
        """Locations t with CDF(t) = u * total, elementwise."""
        target = u * self.total
        idx = np.clip(np.searchsorted(self.cum, target, side="right") - 1, 0, len(self.panel_mass) - 1)
        lo = self.bounds[idx]
        hi = self.bounds[idx + 1]
        rem = target - self.cum[idx]
        left = self.bounds[idx]
        t = 0.5 * (lo + hi)
        for _ in range(50):
            span = t - left
            zz = left[:, None] + span[:, None] * _GL8_X01[None, :]
            part = (span[:, None] * _GL8_W01[None, :] * self._density(zz)).sum(axis=1)
            over = part >= rem
            hi = np.where(over, t, hi)
            lo = np.where(over, lo, t)
            t = 0.5 * (lo + hi)
        return t


@lru_cache(maxsize=8)
def _hazard_cdf(p: BetaProcessParams) -> _HazardCdf:
    return _HazardCdf(p)


_GL16 = np.polynomial.legendre.leggauss(16)


@lru_cache(maxsize=8)
def _jump_mixture(p: BetaProcessParams) -> TailMixture:
    """Quadrature of the pooled jump tail over locations: the workhorse of
    the pooled-series jump sampler.  Uses its own coarse node set; the named
    families are smooth per segment, so 6 x GL-16 panels are ample."""
    bounds = _hazard_panels(p, per_segment=6)
    widths = np.diff(bounds)
    z = (bounds[:-1, None] + widths[:, None] * 0.5 * (_GL16[0] + 1.0)[None, :]).ravel()
    w = (widths[:, None] * 0.5 * _GL16[1][None, :]).ravel()
    cz = np.asarray(p.c(z))
    wz = w * np.asarray(p.A0.derivative(z)) * cz
    return TailMixture.from_nodes(cz, wz)


def wolpert_ickstadt_jumps(p: BetaProcessParams, theta, gammas) -> np.ndarray:
    """Jump sizes solving limit_tail(theta_i, J_i) = gamma_i."""
    theta = np.asarray(theta, dtype=float)
    gam = np.asarray(gammas, dtype=float)
    c = np.asarray(p.c(theta), dtype=float)
    return invert_scalar_tails(c, gam / (p.A0_total * c))


def sample_wolpert_ickstadt(p: BetaProcessParams, n: int, rng: RngStream) -> AtomicMeasure:
    """Locations i.i.d. from the normalized hazard; i-th jump size inverts the
    location's own tail at the i-th Poisson arrival."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.generator()
    theta = _invert_hazard(p, gen.random(n))
    gam = np.cumsum(gen.exponential(1.0, size=n))
    jumps = wolpert_ickstadt_jumps(p, theta, gam)
    return AtomicMeasure(theta, jumps).normalize()


def ferguson_klass_jumps(p: BetaProcessParams, gammas) -> np.ndarray:
    """Nonincreasing jump sizes solving pooled_tail(J_i) = gamma_i."""
    gam = np.asarray(gammas, dtype=float)
    return _jump_mixture(p).invert(gam)


def ferguson_klass_locations(p: BetaProcessParams, jumps, uniforms) -> np.ndarray:
    """Locations solving the conditional location CDF given each jump size.

    The CDF in t is proportional to the integral over (0, t] of
    c(z) (1-s)^c(z) dA0(z) with s the jump size; panels are integrated by
    Gauss-Legendre and the crossing panel is bisected.
    """
    jumps = np.asarray(jumps, dtype=float)
    u = np.asarray(uniforms, dtype=float)
    cdf = _hazard_cdf(p)
    z, w = _panel_nodes(cdf.bounds)
    cz = np.asarray(p.c(z))
    wz = w * np.asarray(p.A0.derivative(z)) * cz
    out = np.empty_like(jumps)
    logym = np.log1p(-jumps)  # ln(1 - s), factor exp(c ln(1-s)) reweights panels
    chunk = max(1, int(2e6 // max(z.size, 1)))
    for start in range(0, jumps.size, chunk):
        sl = slice(start, min(start + chunk, jumps.size))
        lq = logym[sl]
        # panel masses per query: sum_m wz[p,m] exp(c[p,m] * ln(1-s_q))
        mass = np.einsum("pm,qpm->qp", wz, np.exp(cz[None, :, :] * lq[:, None, None]))
        cum = np.cumsum(mass, axis=1)
        total = cum[:, -1]
        target = u[sl] * total
        idx = np.empty(lq.size, dtype=int)
        for i in range(lq.size):
            idx[i] = np.searchsorted(cum[i], target[i], side="left")
        idx = np.clip(idx, 0, mass.shape[1] - 1)
        rem = target - np.where(idx > 0, np.take_along_axis(cum, np.maximum(idx - 1, 0)[:, None], 1)[:, 0], 0.0)
        left = cdf.bounds[idx]
        lo = cdf.bounds[idx]
        hi = cdf.bounds[idx + 1]
        t = 0.5 * (lo + hi)
        for _ in range(50):
            span = t - left
            zz = left[:, None] + span[:, None] * _GL8_X01[None, :]
            dens = np.asarray(p.c(zz))
            dens = dens * np.exp(dens * lq[:, None]) * np.asarray(p.A0.derivative(zz))
            part = (span[:, None] * _GL8_W01[None, :] * dens).sum(axis=1)
            over = part >= rem
            hi = np.where(over, t, hi)
            lo = np.where(over, lo, t)
            t = 0.5 * (lo + hi)
        out[sl] = t
    return out


def sample_ferguson_klass(p: BetaProcessParams, n: int, rng: RngStream) -> AtomicMeasure:
    """Jump sizes from the pooled tail inverse at Poisson arrivals, locations
    from the per-jump conditional location CDF."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.generator()
    gam = np.cumsum(gen.exponential(1.0, size=n))
    jumps = ferguson_klass_jumps(p, gam)
    theta = ferguson_klass_locations(p, jumps, gen.random(n))
    return AtomicMeasure(theta, jumps).normalize()


# -- partition / thinning algorithms -----------------------------------------


def sample_damien_laud_smith(
    p: BetaProcessParams, m: int, n: int, rng: RngStream
) -> AtomicMeasure:
    """Compound-Poisson approximation of the process increments on an
    equal-width partition in m cells, each using n mixing draws; the cell
    increment lands on the cell's right endpoint."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    gen = rng.generator()
    edges = np.linspace(0.0, p.t0, m + 1)
    lam = np.diff(np.asarray(p.A0(edges)))
    z = _invert_hazard(p, gen.random(m * n)).reshape(m, n)
    c = np.asarray(p.c(z), dtype=float)
    x = gen.beta(1.0, c)
    with np.errstate(divide="ignore"):
        log_rate = np.log(lam)[:, None] - np.log(x) - np.log(n)
    if np.any(log_rate > np.log(_POISSON_RATE_CAP)):
        raise SamplerError("compound-Poisson rate overflow (draw too close to 0)")
    y = gen.poisson(np.exp(log_rate))
    weights = (x * y).sum(axis=1)
    keep = weights > 0
    return AtomicMeasure(edges[1:][keep], weights[keep]).normalize()


def sample_lee_kim(p: BetaProcessParams, epsilon: float, rng: RngStream) -> AtomicMeasure:
    """Poisson total jump count at rate (total hazard)/epsilon, locations from
    the density proportional to c dA0, sizes Beta(epsilon, c(location))."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    gen = rng.generator()
    cdf = _hazard_cdf(p)
    lam = cdf.total / epsilon
    count = int(gen.poisson(lam))
    if count == 0:
        return AtomicMeasure.empty()
    theta = np.sort(cdf.invert(gen.random(count)))
    c = np.asarray(p.c(theta), dtype=float)
    sizes = gen.beta(epsilon, c)
    return AtomicMeasure(theta, sizes)


def lee_thinning_log_rate(p: BetaProcessParams, c, x, n: int, epsilon: float):
    """Log of the Poisson thinning rate: the candidate-jump density ratio
    b(x; 1, c) / b(x; eps, c) collapses to c B(eps, c) x^(-eps), evaluated in
    log space for stability at the tiny x a Beta(eps, c) draw produces."""
    return (
        np.log(p.A0_total)
        + np.log(c)
        + sp.betaln(epsilon, c)
        - epsilon * np.log(x)
        - np.log(n)
    )


def sample_lee(
    p: BetaProcessParams, n: int, epsilon: float, rng: RngStream
) -> AtomicMeasure:
    """Beta(eps, c) candidate jumps thinned by a Poisson count whose rate is
    the density ratio, computed in log space; zero-count atoms are dropped.
    Weights x*y may exceed 1 by construction."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    gen = rng.generator()
    theta = _invert_hazard(p, gen.random(n))
    c = np.asarray(p.c(theta), dtype=float)
    x = gen.beta(epsilon, c)
    log_rate = lee_thinning_log_rate(p, c, x, n, epsilon)
    if np.any(log_rate > np.log(_POISSON_RATE_CAP)):
        raise SamplerError("thinning rate overflow (beta draw too close to 0)")
    y = gen.poisson(np.exp(log_rate))
    w = x * y
    keep = w > 0
    return AtomicMeasure(theta[keep], w[keep]).normalize()


# -- dispatch -----------------------------------------------------------------

ALGORITHMS = ("new", "fk", "dls", "wi", "lk", "lee")


def sample_path(
    algorithm: str,
    p: BetaProcessParams,
    settings: SamplerSettings,
    rng: RngStream,
):
    """Run one algorithm by name; beta-Dirichlet runs return a list."""
    if algorithm == "new":
        if settings.dirichlet_gammas:
            return sample_beta_dirichlet(p, settings.dirichlet_gammas, settings.n, rng)
        return sample_new_vague(p, settings.n, rng)
    if algorithm == "fk":
        return sample_ferguson_klass(p, settings.n, rng)
    if algorithm == "dls":
        return sample_damien_laud_smith(p, settings.m, settings.n, rng)
    if algorithm == "wi":
        return sample_wolpert_ickstadt(p, settings.n, rng)
    if algorithm == "lk":
        return sample_lee_kim(p, settings.epsilon, rng)
    if algorithm == "lee":
        return sample_lee(p, settings.n, settings.epsilon, rng)
    raise ValueError(f"unknown algorithm: {algorithm!r}")
