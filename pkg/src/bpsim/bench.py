"""Monte Carlo comparison harness for the samplers.

A run draws R replicate paths of one algorithm (replicate r uses stream_id r
of the configured seed), evaluates each path's distribution function on a
time grid, and reports the largest absolute deviation of the per-point mean
and standard deviation from the exact process moments, plus wall time.

Reduction is exact (math.fsum in replicate order), so the statistics are
bit-identical whatever the worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BpsimError, ConfigError, SamplerError
from .functions import ParamFunction
from .measures import BetaProcessParams
from .rng import RngStream
from .samplers import ALGORITHMS, SamplerSettings, sample_path
from .special import integrate

DEFAULT_GRID = tuple(round(0.1 * i, 10) for i in range(1, 11))

SD_BASELINES = ("auto", "reference", "general")


def exact_mean(p: BetaProcessParams, t):
    """E[A(t)] = A0(t) for every beta process."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > p.t0):
        raise ValueError("t must lie in [0, t0]")
    out = np.asarray(p.A0(t), dtype=float)
    return out if out.ndim else float(out)


def _is_reference_experiment(p: BetaProcessParams) -> bool:
    """The standard comparison setup: c(t) = 2 exp(-t), A0(t) = t on [0, 1]."""
    return (
        p.c.family == "exp_decay"
        and p.c.params == (2.0, 1.0)
        and p.A0.family == "linear"
        and p.A0.params == (1.0,)
        and p.t0 == 1.0
    )


def exact_sd(p: BetaProcessParams, t, form: str = "auto"):
    """Baseline standard deviation of A(t).

    form="general": sqrt of the process variance integral of
    dA0(z) / (c(z) + 1), valid for any parameters.
    form="reference": sqrt(t/3), the baseline published for the standard
    comparison experiment (it equals the general form only when c == 2).
    form="auto": reference curve when the params match that experiment,
    general otherwise.
    """
    if form not in SD_BASELINES:
        raise ValueError(f"unknown sd baseline {form!r}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > p.t0):
        raise ValueError("t must lie in [0, t0]")
    if form == "reference" or (form == "auto" and _is_reference_experiment(p)):
        out = np.sqrt(t / 3.0)
        return out if out.ndim else float(out)

    def variance(upper: float) -> float:
        if upper == 0.0:
            return 0.0
        return integrate(
            lambda z: np.asarray(p.A0.derivative(z)) / (np.asarray(p.c(z)) + 1.0),
            0.0,
            upper,
        )

    flat = np.atleast_1d(t)
    out = np.sqrt([variance(float(u)) for u in flat])
    return float(out[0]) if t.ndim == 0 else out


@dataclass(frozen=True)
class BenchConfig:
    algorithm: str
    params: BetaProcessParams
    settings: SamplerSettings = field(default_factory=SamplerSettings)
    replications: int = 3000
    grid: tuple = DEFAULT_GRID
    seed: int = 0
    workers: int = 1
    sd_baseline: str = "auto"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm: {self.algorithm!r}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        g = tuple(float(x) for x in self.grid)
        if not g or any(b <= a for a, b in zip(g, g[1:])):
            raise ConfigError("grid must be nonempty and strictly increasing")
        if g[0] < 0 or g[-1] > self.params.t0:
            raise ConfigError("grid must lie within [0, t0]")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.sd_baseline not in SD_BASELINES:
            raise ConfigError(f"sd_baseline must be one of {SD_BASELINES}")
        if self.settings.dirichlet_gammas:
            raise ConfigError("benchmarks take scalar-measure algorithms only")
        object.__setattr__(self, "grid", g)

    def parameters_label(self) -> str:
        s = self.settings
        if self.algorithm in ("new", "fk", "wi"):
            return f"n={s.n}"
        if self.algorithm == "dls":
            return f"m={s.m}, n={s.n}"
        if self.algorithm == "lk":
            return f"eps={s.epsilon:g}"
        return f"n={s.n}, eps={s.epsilon:g}"


@dataclass(frozen=True)
class BenchResult:
    algorithm: str
    parameters: str
    max_mean_error: float
    max_sd_error: float
    wall_time_seconds: float
    seed: int
    replications: int
    grid: tuple
    mean_curve: tuple
    sd_curve: tuple
    exact_mean_curve: tuple
    exact_sd_curve: tuple


def _replicate_block(cfg: BenchConfig, start: int, count: int) -> np.ndarray:
    grid = np.asarray(cfg.grid)
    out = np.empty((count, grid.size))
    for j in range(count):
        stream = RngStream(cfg.seed, start + j)
        try:
            m = sample_path(cfg.algorithm, cfg.params, cfg.settings, stream)
        except BpsimError as exc:
            raise SamplerError(f"replication {start + j} aborted: {exc}") from exc
        out[j] = m.distribution_function(grid)
    return out


def run_benchmark(cfg: BenchConfig) -> BenchResult:
    """Draw cfg.replications paths and compare grid statistics to the exact
    moments.  Statistics depend only on (config, seed), not worker count."""
    r = cfg.replications
    if r < 2:
        raise ConfigError("need at least 2 replications for sd statistics")
    grid = np.asarray(cfg.grid)

    t_start = time.perf_counter()
    if cfg.workers == 1:
        paths = _replicate_block(cfg, 0, r)
    else:
        block = max(1, math.ceil(r / (cfg.workers * 4)))
        starts = list(range(0, r, block))
        counts = [min(block, r - s) for s in starts]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            blocks = list(pool.map(_replicate_block, [cfg] * len(starts), starts, counts))
        paths = np.concatenate(blocks, axis=0)
    wall = time.perf_counter() - t_start

    means = np.array([math.fsum(paths[:, j]) / r for j in range(grid.size)])
    sds = np.array(
        [
            math.sqrt(math.fsum((paths[:, j] - means[j]) ** 2) / (r - 1))
            for j in range(grid.size)
        ]
    )
    ex_mean = np.atleast_1d(exact_mean(cfg.params, grid))
    ex_sd = np.atleast_1d(exact_sd(cfg.params, grid, cfg.sd_baseline))
    return BenchResult(
        algorithm=cfg.algorithm,
        parameters=cfg.parameters_label(),
        max_mean_error=float(np.max(np.abs(means - ex_mean))),
        max_sd_error=float(np.max(np.abs(sds - ex_sd))),
        wall_time_seconds=wall,
        seed=cfg.seed,
        replications=r,
        grid=tuple(grid.tolist()),
        mean_curve=tuple(means.tolist()),
        sd_curve=tuple(sds.tolist()),
        exact_mean_curve=tuple(ex_mean.tolist()),
        exact_sd_curve=tuple(ex_sd.tolist()),
    )


# -- reporting ----------------------------------------------------------------

_CSV_COLUMNS = (
    "algorithm",
    "parameters",
    "max_mean_error",
    "max_sd_error",
    "time_seconds",
    "replications",
    "seed",
)


def emit_table(results, fmt: str = "csv") -> str:
    """Render results as CSV (machine) or a markdown table (human)."""
    results = list(results)
    if not results:
        raise ValueError("no results to render")
    if fmt == "csv":
        import csv
        import io

        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_CSV_COLUMNS)
        for res in results:
            writer.writerow(
                [
                    res.algorithm,
                    res.parameters,
                    repr(res.max_mean_error),
                    repr(res.max_sd_error),
                    repr(res.wall_time_seconds),
                    res.replications,
                    res.seed,
                ]
            )
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            "| Algorithm | Parameters | max. mean error | max. s.d. error | Time |",
            "|---|---|---|---|---|",
        ]
        for res in results:
            lines.append(
                f"| {res.algorithm} | {res.parameters} | {res.max_mean_error:.4f} "
                f"| {res.max_sd_error:.4f} | {res.wall_time_seconds:.2f} |"
            )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def emit_curves(results) -> str:
    """CSV of per-grid-point statistics: the input for mean-curve figures."""
    import csv
    import io

    results = list(results)
    if not results:
        raise ValueError("no results to render")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "t", "mean", "sd", "exact_mean", "exact_sd"])
    for res in results:
        for t, mu, sd, em, es in zip(
            res.grid, res.mean_curve, res.sd_curve, res.exact_mean_curve, res.exact_sd_curve
        ):
            writer.writerow([res.algorithm, repr(t), repr(mu), repr(sd), repr(em), repr(es)])
    return buf.getvalue()


def config_from_dict(doc: dict) -> BenchConfig:
    """Build a BenchConfig from a plain-JSON dictionary."""
    try:
        params = BetaProcessParams.from_config(doc["params"])
    except KeyError as exc:
        raise ConfigError("bench config needs a params block") from exc
    settings_doc = dict(doc.get("settings", {}))
    gammas = settings_doc.pop("dirichlet_gammas", None)
    if gammas is not None:
        settings_doc["dirichlet_gammas"] = tuple(
            ParamFunction.from_config(g) for g in gammas
        )
    try:
        settings = SamplerSettings(**settings_doc)
    except TypeError as exc:
        raise ConfigError(f"bad settings block: {exc}") from exc
    known = {
        "algorithm": doc.get("algorithm"),
        "params": params,
        "settings": settings,
    }
    for key in ("replications", "seed", "workers"):
        if key in doc:
            known[key] = int(doc[key])
    if "grid" in doc:
        known["grid"] = tuple(doc["grid"])
    if "sd_baseline" in doc:
        known["sd_baseline"] = doc["sd_baseline"]
    if known["algorithm"] is None:
        raise ConfigError("bench config needs an algorithm")
    return BenchConfig(**known)
