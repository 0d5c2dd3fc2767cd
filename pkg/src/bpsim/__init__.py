"""Finite approximations of the beta process: samplers, convergence metrics,
and a Monte Carlo benchmark harness."""

from .bench import (
    BenchConfig,
    BenchResult,
    emit_curves,
    emit_table,
    exact_mean,
    exact_sd,
    run_benchmark,
)
from .errors import (
    BpsimError,
    BracketError,
    ConfigError,
    SamplerError,
    ToleranceError,
)
from .functions import ParamFunction, constant, exp_decay, exp_ramp, linear, piecewise_linear, power
from .measures import (
    AtomicMeasure,
    BetaProcessParams,
    distribution_function,
    gamma_arrivals,
    sample_base_locations,
)
from .metrics import (
    StepFunction,
    TruncationLadder,
    convergence_diagnostic,
    integrate_test_function,
    levy_distance,
    metric_d,
    truncate_measure,
    truncation_ramp,
)
from .rng import RngStream
from .samplers import (
    ALGORITHMS,
    SamplerSettings,
    levy_tail_finite,
    levy_tail_limit,
    new_vague_weights,
    sample_beta_dirichlet,
    sample_damien_laud_smith,
    sample_ferguson_klass,
    sample_lee,
    sample_lee_kim,
    sample_new_vague,
    sample_path,
    sample_wolpert_ickstadt,
    wolpert_ickstadt_jumps,
)
from .special import QuadratureSpec, beta_quantile, find_root, integrate, log_gamma, reg_inc_beta

__version__ = "0.1.0"
