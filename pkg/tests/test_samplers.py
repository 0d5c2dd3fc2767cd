"""Sampler tests: frozen tail values, analytic special cases, coupling
identities, and distributional sanity checks."""

import math

import numpy as np
import pytest

from bpsim.errors import SamplerError
from bpsim.functions import constant, exp_decay, linear, piecewise_linear
from bpsim.measures import AtomicMeasure, BetaProcessParams
from bpsim.rng import RngStream
from bpsim.samplers import (
    SamplerSettings,
    ferguson_klass_jumps,
    ferguson_klass_locations,
    lee_thinning_log_rate,
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
from bpsim.special import integrate, log_gamma

REFERENCE = BetaProcessParams(exp_decay(2.0, 1.0), linear(1.0), 1.0)
HOMOG1 = BetaProcessParams(constant(1.0), linear(1.0), 1.0)
HOMOG2 = BetaProcessParams(constant(2.0), linear(1.0), 1.0)

# 1 - I_0.5(0.02, 1.98), frozen from a 40-digit incomplete-beta evaluation and
# re-derived below by quadrature of the finite-tail integrand.
FINITE_TAIL_C2_N100_X05 = 0.0039925876059355332206
# 2 (ln 2 - 1/2)
LIMIT_TAIL_C2_X05 = 0.38629436111989061883


class TestFiniteTail:
    def test_zero_at_one(self):
        assert levy_tail_finite(HOMOG2, 100, 0.3, 1.0) == 0.0

    def test_tends_to_one_at_origin(self):
        # full Beta mass in the limit; at x = 1e-300 the gap is x^(c/n) scale
        seq = [levy_tail_finite(HOMOG2, 100, 0.3, x) for x in (1e-5, 1e-50, 1e-300)]
        assert np.all(np.diff(seq) > 0)
        assert seq[-1] == pytest.approx(1.0, abs=1e-5)

    def test_quadrature_oracle(self):
        c, n, x = 2.0, 100, 0.5
        a, b = c / n, c * (1.0 - 1.0 / n)
        norm = math.exp(log_gamma(c) - log_gamma(a) - log_gamma(b))
        tail = norm * integrate(lambda s: s ** (a - 1.0) * (1.0 - s) ** (b - 1.0), x, 1.0)
        assert tail == pytest.approx(FINITE_TAIL_C2_N100_X05, rel=1e-9)
        assert levy_tail_finite(HOMOG2, n, 0.3, x) == pytest.approx(
            FINITE_TAIL_C2_N100_X05, rel=1e-10
        )

    def test_decreasing_in_x(self):
        x = np.linspace(0.01, 0.99, 31)
        vals = levy_tail_finite(REFERENCE, 50, 0.4, x)
        assert np.all(np.diff(vals) < 0)

    def test_needs_n_at_least_two(self):
        with pytest.raises(ValueError):
            levy_tail_finite(REFERENCE, 1, 0.3, 0.5)


class TestLimitTail:
    def test_log_form_for_unit_concentration(self):
        assert levy_tail_limit(HOMOG1, 0.2, math.exp(-2.0)) == pytest.approx(2.0, rel=1e-12)

    def test_antiderivative_oracle(self):
        assert levy_tail_limit(HOMOG2, 0.8, 0.5) == pytest.approx(
            LIMIT_TAIL_C2_X05, rel=1e-12
        )

    def test_strictly_decreasing(self):
        x = np.linspace(0.02, 0.98, 25)
        vals = levy_tail_limit(REFERENCE, 0.3, x)
        assert np.all(np.diff(vals) < 0)

    def test_domain(self):
        with pytest.raises(ValueError):
            levy_tail_limit(HOMOG1, 0.2, 1.0)


class TestScaledTailConvergence:
    def test_finite_tail_converges_to_limit(self):
        # n * A0_total * finite_tail -> limit_tail, relative error below 1%
        # at n = 10^4 and shrinking monotonically along the n ladder
        xs = (0.1, 0.3, 0.5, 0.9)
        for x in xs:
            limit = levy_tail_limit(HOMOG2, 0.5, x)
            errs = []
            for n in (100, 1000, 10_000):
                scaled = n * HOMOG2.A0_total * levy_tail_finite(HOMOG2, n, 0.5, x)
                errs.append(abs(scaled - limit) / limit)
            assert errs[-1] <= 0.01
            assert errs[0] > errs[1] > errs[2]


class TestNewVague:
    def test_weights_zero_past_total_mass(self):
        theta = np.array([0.2, 0.4])
        gam = np.array([1.0, 250.0])  # second arrival beyond A0_total * n
        w = new_vague_weights(REFERENCE, 200, theta, gam)
        assert w[1] == 0.0
        assert 0.0 < w[0] < 1.0

    def test_weight_tends_to_one_for_tiny_arrival(self):
        w = new_vague_weights(REFERENCE, 200, np.array([0.3]), np.array([1e-9]))
        assert 0.999 < w[0] < 1.0

    def test_weights_nonincreasing_for_constant_c(self):
        gam = np.cumsum(RngStream(21, 0).generator().exponential(1.0, 200))
        w = new_vague_weights(HOMOG2, 200, np.full(200, 0.5), gam)
        assert np.all(np.diff(w) <= 0)

    def test_rejects_n_one(self):
        with pytest.raises(ValueError):
            new_vague_weights(REFERENCE, 1, np.array([0.1]), np.array([1.0]))

    def test_sample_shape_and_ranges(self):
        m = sample_new_vague(REFERENCE, 200, RngStream(4, 0))
        assert len(m) == 200
        assert np.all((m.locations >= 0) & (m.locations <= 1))
        assert np.all((m.weights >= 0) & (m.weights <= 1))
        assert m.is_normalized()

    def test_bit_reproducible(self):
        a = sample_new_vague(REFERENCE, 50, RngStream(9, 3))
        b = sample_new_vague(REFERENCE, 50, RngStream(9, 3))
        assert np.array_equal(a.locations, b.locations)
        assert np.array_equal(a.weights, b.weights)


class TestBetaDirichlet:
    def test_single_coordinate_matches_base(self):
        base = sample_new_vague(REFERENCE, 60, RngStream(12, 1))
        parts = sample_beta_dirichlet(REFERENCE, (constant(1.5),), 60, RngStream(12, 1))
        assert len(parts) == 1
        assert np.array_equal(parts[0].locations, base.locations)
        assert np.array_equal(parts[0].weights, base.weights)

    def test_coordinates_sum_to_base(self):
        parts = sample_beta_dirichlet(
            REFERENCE, (constant(0.5), constant(2.0), constant(1.0)), 80, RngStream(13, 0)
        )
        base = sample_new_vague(REFERENCE, 80, RngStream(13, 0))
        total = parts[0].weights + parts[1].weights + parts[2].weights
        assert np.allclose(total, base.weights, rtol=0, atol=1e-15)

    def test_equal_parameters_split_mass_evenly(self):
        reps = 10_000
        sums = np.zeros(2)
        base_sum = 0.0
        for r in range(reps):
            parts = sample_beta_dirichlet(
                REFERENCE, (constant(1.0), constant(1.0)), 20, RngStream(77, r)
            )
            sums += [parts[0].total_mass, parts[1].total_mass]
            base_sum += parts[0].total_mass + parts[1].total_mass
        ratio = sums / base_sum
        assert abs(ratio[0] - 0.5) <= 0.02
        assert abs(ratio[1] - 0.5) <= 0.02

    def test_nonpositive_parameter_rejected(self):
        with pytest.raises(ValueError):
            sample_beta_dirichlet(REFERENCE, (constant(1.0), constant(-0.5)), 20, RngStream(1, 0))


class TestWolpertIckstadt:
    def test_unit_concentration_analytic(self):
        gen = RngStream(31, 0).generator()
        gam = np.cumsum(gen.exponential(1.0, 1000))
        theta = gen.random(1000)
        jumps = wolpert_ickstadt_jumps(HOMOG1, theta, gam)
        assert np.max(np.abs(jumps - np.exp(-gam))) <= 1e-8

    def test_weights_inside_unit_interval(self):
        m = sample_wolpert_ickstadt(REFERENCE, 300, RngStream(32, 0))
        assert np.all((m.weights > 0) & (m.weights < 1))

    def test_reproducible(self):
        a = sample_wolpert_ickstadt(REFERENCE, 40, RngStream(33, 2))
        b = sample_wolpert_ickstadt(REFERENCE, 40, RngStream(33, 2))
        assert np.array_equal(a.weights, b.weights)


class TestFergusonKlass:
    def test_jumps_nonincreasing(self):
        gam = np.cumsum(RngStream(41, 0).generator().exponential(1.0, 200))
        jumps = ferguson_klass_jumps(REFERENCE, gam)
        assert np.all(np.diff(jumps) <= 0)

    def test_matches_per_location_inversion_when_homogeneous(self):
        # constant concentration makes the pooled tail equal every
        # per-location tail, so the two samplers share jump sizes
        gam = np.cumsum(RngStream(42, 0).generator().exponential(1.0, 50))
        jf = ferguson_klass_jumps(HOMOG2, gam)
        jw = wolpert_ickstadt_jumps(HOMOG2, np.full(50, 0.25), gam)
        assert np.max(np.abs(jf - jw)) <= 1e-8

    def test_locations_within_horizon(self):
        m = sample_ferguson_klass(REFERENCE, 100, RngStream(43, 0))
        assert np.all((m.locations >= 0) & (m.locations <= 1))
        assert len(m) == 100

    def test_location_inversion_solves_cdf(self):
        # the returned location t must satisfy H(t)/H(t0) = u for the
        # jump-size-tilted density c(z) (1-s)^c(z) A0'(z)
        jumps = np.array([0.3, 0.05, 0.6])
        u = np.array([0.25, 0.7, 0.05])
        locs = ferguson_klass_locations(REFERENCE, jumps, u)
        for s, ui, t in zip(jumps, u, locs):
            dens = lambda z: REFERENCE.c(z) * (1.0 - s) ** REFERENCE.c(z)
            ratio = integrate(dens, 0.0, float(t)) / integrate(dens, 0.0, 1.0)
            assert ratio == pytest.approx(ui, abs=1e-9)


class TestDamienLaudSmith:
    def test_flat_cell_gets_zero_increment(self):
        # hazard flat on [0.5, 1]: all mass sits at or below the midpoint
        pw = piecewise_linear([(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)])
        p = BetaProcessParams(constant(2.0), pw, 1.0)
        m = sample_damien_laud_smith(p, 4, 100, RngStream(51, 0))
        assert m.distribution_function(1.0) == m.distribution_function(0.5)

    def test_cell_increment_mean_matches_hazard_increment(self):
        # compound-Poisson oracle: E[sum_j x y] = lambda_i exactly
        reps, m_cells = 10_000, 4
        totals = np.zeros(m_cells)
        edges = np.linspace(0, 1, m_cells + 1)
        lam = np.diff(edges)  # A0 = t
        for r in range(reps):
            meas = sample_damien_laud_smith(REFERENCE, m_cells, 10, RngStream(52, r))
            df = meas.distribution_function(edges)
            totals += np.diff(df)
        means = totals / reps
        assert np.allclose(means, lam, atol=4e-3)

    def test_atoms_on_right_endpoints(self):
        m = sample_damien_laud_smith(REFERENCE, 5, 50, RngStream(53, 0))
        edges = set(np.round(np.linspace(0, 1, 6)[1:], 12).tolist())
        assert set(np.round(m.locations, 12).tolist()) <= edges


class TestLeeKim:
    def test_total_rate_closed_form(self):
        from bpsim.samplers import _hazard_cdf

        lam = _hazard_cdf(REFERENCE).total / 0.01
        assert lam == pytest.approx(126.42411176571153568, rel=1e-10)

    def test_mean_atom_count(self):
        counts = [len(sample_lee_kim(REFERENCE, 0.01, RngStream(61, r))) for r in range(400)]
        assert np.mean(counts) == pytest.approx(126.42, abs=2.5)

    def test_empty_when_hazard_tiny(self):
        p = BetaProcessParams(constant(1e-4), linear(1e-4), 1.0)
        m = sample_lee_kim(p, 0.5, RngStream(62, 0))
        if len(m) == 0:
            assert m.distribution_function(1.0) == 0.0
        else:  # rate 2e-8: any draw at all would be astonishing
            pytest.fail("expected an empty measure at near-zero rate")

    def test_locations_sorted_weights_in_unit_interval(self):
        m = sample_lee_kim(REFERENCE, 0.05, RngStream(63, 0))
        assert np.all(np.diff(m.locations) >= 0)
        assert np.all((m.weights > 0) & (m.weights < 1))


class TestLee:
    def test_zero_count_atoms_dropped(self):
        m = sample_lee(REFERENCE, 200, 0.05, RngStream(71, 0))
        assert np.all(m.weights > 0)
        assert len(m) < 200  # most candidates thin away

    def test_log_rate_matches_direct_density_ratio(self):
        rng = np.random.default_rng(72)
        c = rng.uniform(0.3, 5.0, 200)
        x = rng.uniform(1e-6, 1 - 1e-6, 200)
        n, eps = 200, 0.05
        beta_fn = np.exp(log_gamma(eps) + log_gamma(c) - log_gamma(eps + c))
        b1 = c * (1.0 - x) ** (c - 1.0)
        beps = x ** (eps - 1.0) * (1.0 - x) ** (c - 1.0) / beta_fn
        direct = REFERENCE.A0_total * b1 / (n * x * beps)
        ours = np.exp(lee_thinning_log_rate(REFERENCE, c, x, n, eps))
        assert np.max(np.abs(ours / direct - 1.0)) <= 1e-10

    def test_rate_overflow_guard(self):
        # a huge hazard total pushes every thinning rate past the cap
        huge = BetaProcessParams(constant(2.0), linear(1e15), 1.0)
        with pytest.raises(SamplerError):
            sample_lee(huge, 1, 0.05, RngStream(73, 0))

    def test_dls_rate_overflow_guard(self):
        huge = BetaProcessParams(constant(2.0), linear(1e15), 1.0)
        with pytest.raises(SamplerError):
            sample_damien_laud_smith(huge, 1, 1, RngStream(74, 0))


class TestDispatch:
    def test_all_algorithms_run(self):
        s = SamplerSettings(n=20, epsilon=0.1, m=5)
        for algo in ("new", "fk", "dls", "wi", "lk", "lee"):
            out = sample_path(algo, REFERENCE, s, RngStream(81, 0))
            assert isinstance(out, AtomicMeasure)

    def test_unknown_algorithm(self):
        with pytest.raises(ValueError):
            sample_path("bogus", REFERENCE, SamplerSettings(), RngStream(0, 0))

    def test_every_sampler_reproducible_and_valid(self):
        s = SamplerSettings(n=30, epsilon=0.05, m=6)
        for algo in ("new", "fk", "dls", "wi", "lk", "lee"):
            a = sample_path(algo, REFERENCE, s, RngStream(82, 5))
            b = sample_path(algo, REFERENCE, s, RngStream(82, 5))
            assert np.array_equal(a.locations, b.locations), algo
            assert np.array_equal(a.weights, b.weights), algo
            assert np.all(a.weights >= 0), algo
            assert np.all((a.locations >= 0) & (a.locations <= REFERENCE.t0)), algo
