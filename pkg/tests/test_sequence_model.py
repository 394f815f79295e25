import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphreg.coefficients import HarmonicCoefficients, level_offsets
from sphreg.sequence_model import (
    expected_posterior_risk,
    posterior,
    posterior_draw,
    simulate_sequence_observations,
    theoretical_rate,
    truncation_level,
    unsaturated_rate,
)
from sphreg.spectra import matern_spectrum, table_spectrum


def random_coeffs(d, max_degree, seed):
    rng = np.random.default_rng(seed)
    size = level_offsets(d, max_degree)[-1]
    return HarmonicCoefficients(d, rng.normal(size=size))


class TestSimulateSequenceObservations:
    def test_noiseless_limit(self):
        truth = random_coeffs(2, 3, 0)
        observed = simulate_sequence_observations(truth, 1e-30, 5, seed=1)
        assert np.abs(observed.values - truth.values).max() <= 1e-15

    def test_noise_variance(self):
        # Monte Carlo oracle: with zero truth, n=4, sigma=2 the per-mode
        # variance is sigma^2/n = 1.
        truth = HarmonicCoefficients.zeros(2, 1)
        draws = np.array(
            [
                simulate_sequence_observations(truth, 2.0, 4, seed=100 + i).values
                for i in range(10_000)
            ]
        )
        assert draws[:, 2].var(ddof=1) == pytest.approx(1.0, rel=0.05)

    def test_deterministic(self):
        truth = random_coeffs(3, 2, 5)
        a = simulate_sequence_observations(truth, 0.5, 7, seed=9)
        b = simulate_sequence_observations(truth, 0.5, 7, seed=9)
        assert np.array_equal(a.values, b.values)

    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            simulate_sequence_observations(random_coeffs(2, 1, 0), 0.5, 0, seed=1)


class TestTruncationLevel:
    def test_table_one_rows(self):
        assert truncation_level(50, 2.0, 2, 2.5) == 4
        assert truncation_level(3200, 2.0, 2, 2.5) == 9

    def test_undersmoothed_prior_row(self):
        assert truncation_level(100, 1.0, 2, 2.5) == 7

    def test_small_c_floor(self):
        assert truncation_level(1, 2.0, 2, 0.2) == 0

    def test_validation(self):
        with pytest.raises(ValueError):
            truncation_level(0, 2.0, 2, 2.5)
        with pytest.raises(ValueError):
            truncation_level(10, 2.0, 2, 0.0)
        with pytest.raises(ValueError):
            truncation_level(10, 0.5, 2, 2.5)


class TestPosterior:
    def test_flat_prior_limit(self):
        # shrinkage weight w = 1 within 1e-12: the realized per-mode ratio
        observed = random_coeffs(2, 2, 3)
        spec = table_spectrum(2, np.full(3, 1e12))
        model = posterior(observed, spec, 1.0, 1, 2)
        ratios = model.means.values / observed.values
        # 1 - w = 1/(1e12 + 1) sits exactly at the 1e-12 boundary; leave one
        # part in 1e4 of slack for the rounding of the realized ratio.
        assert np.abs(ratios - 1.0).max() <= 1.0001e-12

    def test_balanced_case(self):
        observed = HarmonicCoefficients.from_levels(2, [[2.0]])
        spec = table_spectrum(2, [1.0])
        model = posterior(observed, spec, 1.0, 1, 0)
        assert model.means.values[0] == pytest.approx(1.0, abs=1e-15)
        assert model.level_variances[0] == pytest.approx(0.5, abs=1e-15)

    def test_degenerate_prior_pins_to_zero(self):
        observed = random_coeffs(2, 1, 4)
        spec = table_spectrum(2, [0.0, 0.0])
        model = posterior(observed, spec, 0.7, 3, 1)
        assert np.array_equal(model.means.values, np.zeros(4))
        assert np.array_equal(model.level_variances, np.zeros(2))

    def test_variance_identity_and_bounds(self):
        spec = matern_spectrum(2, 2.0, 1.0, 8)
        observed = random_coeffs(2, 8, 6)
        sigma, n = 0.6, 37
        model = posterior(observed, spec, sigma, n, 8)
        c = spec.values
        expected_v = c * sigma**2 / (n * c + sigma**2)
        assert np.abs(model.level_variances - expected_v).max() <= 1e-14
        assert np.all(model.level_variances < np.minimum(c, sigma**2 / n))
        assert np.all(model.level_variances >= 0)

    def test_truncation_degree_errors(self):
        observed = random_coeffs(2, 2, 0)
        spec = matern_spectrum(2, 2.0, 1.0, 5)
        with pytest.raises(ValueError):
            posterior(observed, spec, 0.5, 10, 3)
        with pytest.raises(ValueError):
            posterior(random_coeffs(2, 8, 0), matern_spectrum(2, 2.0, 1.0, 2), 0.5, 10, 3)

    def test_means_linear_in_observations(self):
        spec = matern_spectrum(2, 2.0, 1.0, 4)
        x = random_coeffs(2, 4, 7)
        y = random_coeffs(2, 4, 8)
        a, b = 1.3, -0.4
        combo = HarmonicCoefficients(2, a * x.values + b * y.values)
        lhs = posterior(combo, spec, 0.5, 20, 4).means.values
        rhs = (
            a * posterior(x, spec, 0.5, 20, 4).means.values
            + b * posterior(y, spec, 0.5, 20, 4).means.values
        )
        assert np.abs(lhs - rhs).max() <= 1e-12

    @given(st.integers(min_value=0, max_value=500))
    def test_shrinkage_weights_nonincreasing(self, seed):
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0.0, 2.0, size=6)
        values = np.sort(raw)[::-1]
        spec = table_spectrum(2, values)
        observed = HarmonicCoefficients(2, np.ones(level_offsets(2, 5)[-1]))
        model = posterior(observed, spec, 0.8, 11, 5)
        n, s2 = 11, 0.64
        weights = n * values / (n * values + s2)
        assert np.all(np.diff(weights) <= 1e-15)
        off = np.array(level_offsets(2, 5)[:-1])
        lead = model.means.values[off]
        assert np.all(np.diff(lead) <= 1e-12)


class TestPosteriorDraw:
    def test_zero_variance_returns_means(self):
        observed = random_coeffs(2, 2, 2)
        spec = table_spectrum(2, np.zeros(3))
        model = posterior(observed, spec, 0.5, 4, 2)
        draw = posterior_draw(model, seed=1)
        assert np.array_equal(draw.values, model.means.values)

    def test_draw_variance(self):
        observed = random_coeffs(2, 1, 3)
        spec = matern_spectrum(2, 2.0, 1.0, 1)
        model = posterior(observed, spec, 1.0, 2, 1)
        draws = np.array([posterior_draw(model, seed=200 + i).values for i in range(10_000)])
        assert draws[:, 1].var(ddof=1) == pytest.approx(model.level_variances[1], rel=0.05)

    def test_deterministic(self):
        observed = random_coeffs(2, 3, 4)
        spec = matern_spectrum(2, 2.0, 1.0, 3)
        model = posterior(observed, spec, 0.5, 9, 3)
        assert np.array_equal(
            posterior_draw(model, seed=5).values, posterior_draw(model, seed=5).values
        )


class TestExpectedPosteriorRisk:
    def test_zero_truth(self):
        truth = HarmonicCoefficients.zeros(2, 5)
        spec = matern_spectrum(2, 2.0, 1.0, 3)
        risk = expected_posterior_risk(truth, spec, 0.5, 10, 3)
        assert risk.shrinkage_bias == 0.0
        assert risk.truncation_tail == 0.0
        assert risk.stochastic_variance > 0
        assert risk.posterior_spread > 0

    def test_large_n_leaves_only_tail(self):
        truth = random_coeffs(2, 5, 1)
        spec = matern_spectrum(2, 2.0, 1.0, 3)
        risk = expected_posterior_risk(truth, spec, 0.5, 10**12, 3)
        tail = float(np.sum(truth.values[16:] ** 2))
        assert risk.truncation_tail == pytest.approx(tail, rel=1e-12)
        assert risk.shrinkage_bias <= 1e-12
        assert risk.stochastic_variance <= 1e-9
        assert risk.posterior_spread <= 1e-9
        assert risk.total == pytest.approx(tail, rel=1e-6)

    def test_total_is_component_sum(self):
        truth = random_coeffs(2, 6, 2)
        spec = matern_spectrum(2, 2.0, 1.0, 4)
        risk = expected_posterior_risk(truth, spec, 0.7, 25, 4)
        parts = (
            risk.shrinkage_bias
            + risk.stochastic_variance
            + risk.posterior_spread
            + risk.truncation_tail
        )
        assert risk.total == pytest.approx(parts, abs=1e-12)
        assert min(
            risk.shrinkage_bias,
            risk.stochastic_variance,
            risk.posterior_spread,
            risk.truncation_tail,
        ) >= 0

    def test_exact_risk_contracts_at_theoretical_rate(self):
        # Deterministic trend: sqrt(total risk) along the benchmark n-ladder
        # decreases monotonically with a log-log slope near -1/3. The slope
        # is seed-free because the risk only sees level energies, which the
        # Rademacher signs leave untouched.
        from sphreg.experiments import fit_loglog_slope
        from sphreg.regression import TruthSpec, generate_truth

        truth = generate_truth(TruthSpec(beta=2.0, max_degree=10, seed=1))
        pairs = []
        for n in (50, 100, 200, 400, 800, 1600, 3200):
            level = truncation_level(n, 2.0, 2, 2.5)
            spec = matern_spectrum(2, 2.0, 1.0, level)
            risk = expected_posterior_risk(truth, spec, 0.5, n, level)
            pairs.append((n, np.sqrt(risk.total)))
        roots = [r for _, r in pairs]
        assert all(b < a for a, b in zip(roots, roots[1:]))
        slope, _, _ = fit_loglog_slope(pairs)
        assert slope == pytest.approx(-1.0 / 3.0, abs=0.05)

    def test_matches_monte_carlo(self):
        # Brute-force oracle: simulate data, draw from the posterior, average
        # the squared coefficient-space distance to the truth.
        truth = random_coeffs(2, 4, 11)
        spec = matern_spectrum(2, 2.0, 1.0, 2)
        sigma, n, level = 0.5, 10, 2
        risk = expected_posterior_risk(truth, spec, sigma, n, level)
        size = level_offsets(2, level)[-1]
        sq_errors = []
        for rep in range(2000):
            observed = simulate_sequence_observations(
                truth.truncated(level), sigma, n, seed=40_000 + rep
            )
            model = posterior(observed, spec, sigma, n, level)
            draw = posterior_draw(model, seed=80_000 + rep)
            diff = truth.values.copy()
            diff[:size] -= draw.values
            sq_errors.append(float(diff @ diff))
        sq_errors = np.array(sq_errors)
        se = sq_errors.std(ddof=1) / np.sqrt(len(sq_errors))
        assert abs(sq_errors.mean() - risk.total) <= 3 * se


class TestTheoreticalRate:
    def test_calibrated(self):
        assert theoretical_rate(2.0, 2.0, 2) == pytest.approx(-1.0 / 3.0)

    def test_oversmoothed(self):
        assert theoretical_rate(3.0, 2.0, 2) == pytest.approx(-1.0 / 4.0)

    def test_saturation(self):
        # Prior rougher than the truth: the rate is capped at the
        # prior-limited exponent -alpha/(2 alpha + d).
        assert theoretical_rate(1.0, 2.0, 2) == pytest.approx(-1.0 / 4.0)
        assert unsaturated_rate(1.0, 2.0, 2) == pytest.approx(-1.0 / 2.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            theoretical_rate(0.5, 2.0, 2)
        with pytest.raises(ValueError):
            theoretical_rate(2.0, 0.0, 2)
