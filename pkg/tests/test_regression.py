import math

import numpy as np
import pytest
from scipy import stats

from sphreg.coefficients import HarmonicCoefficients, level_offsets
from sphreg.geometry import quadrature_grid
from sphreg.harmonics import basis_matrix, synthesize
from sphreg.regression import (
    Dataset,
    TruthSpec,
    coefficient_rmse,
    empirical_coefficients,
    fit,
    generate_dataset,
    generate_truth,
    rmse,
)
from sphreg.sequence_model import (
    PosteriorModel,
    expected_posterior_risk,
    posterior,
    simulate_sequence_observations,
    truncation_level,
)
from sphreg.spectra import matern_spectrum, sobolev_norm_sq, table_spectrum


class TestGenerateTruth:
    def test_degree_zero(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=0, seed=1, normalized=False))
        assert truth.values.shape == (1,)
        assert abs(truth.values[0]) == 1.0
        normalized = generate_truth(TruthSpec(beta=2.0, max_degree=0, seed=1))
        assert abs(normalized.values[0]) == pytest.approx(1.0, abs=1e-12)

    def test_sobolev_norm_telescopes(self):
        # Before normalization the H^beta norm telescopes to the mode count.
        spec = TruthSpec(beta=1.7, max_degree=6, seed=3, normalized=False)
        truth = generate_truth(spec)
        assert sobolev_norm_sq(truth, 1.7, 2) == pytest.approx(49.0, rel=1e-12)

    def test_unit_norm_when_normalized(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=10, seed=9))
        assert truth.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_deterministic(self):
        a = generate_truth(TruthSpec(beta=2.0, max_degree=5, seed=21))
        b = generate_truth(TruthSpec(beta=2.0, max_degree=5, seed=21))
        assert a == b

    def test_validation(self):
        with pytest.raises(ValueError):
            generate_truth(TruthSpec(beta=0.0, max_degree=3, seed=1))
        with pytest.raises(ValueError):
            generate_truth(TruthSpec(beta=2.0, max_degree=-1, seed=1))


class TestGenerateDataset:
    def test_noiseless_limit(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=4, seed=2))
        data = generate_dataset(truth, 50, 1e-30, seed=4)
        residuals = data.responses - synthesize(truth, data.points)
        assert np.abs(residuals).max() <= 1e-12

    def test_mean_response_centered_truth(self):
        # E y = a_{0;0,0}; with a zero constant mode the sample mean vanishes.
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=3, seed=5))
        values = truth.values.copy()
        values[0] = 0.0
        centered = HarmonicCoefficients(2, values)
        sigma = 0.5
        data = generate_dataset(centered, 100_000, sigma, seed=6)
        bound = 0.02 * (sigma + math.sqrt(centered.norm_sq()))
        assert abs(data.responses.mean()) <= bound

    def test_deterministic(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=3, seed=5))
        a = generate_dataset(truth, 20, 0.5, seed=8)
        b = generate_dataset(truth, 20, 0.5, seed=8)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.responses, b.responses)

    def test_rejects_empty(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=2, seed=5))
        with pytest.raises(ValueError):
            generate_dataset(truth, 0, 0.5, seed=1)

    def test_dataset_validation(self):
        with pytest.raises(ValueError):
            Dataset(points=np.array([[0.0, 0.0, 2.0]]), responses=np.array([1.0]), noise_var=1.0)
        with pytest.raises(ValueError):
            Dataset(
                points=np.array([[0.0, 0.0, 1.0]]),
                responses=np.array([1.0, 2.0]),
                noise_var=1.0,
            )


class TestEmpiricalCoefficients:
    def test_single_observation_constant_mode(self):
        data = Dataset(
            points=np.array([[0.0, 0.0, 1.0]]), responses=np.array([1.0]), noise_var=1.0
        )
        coeffs = empirical_coefficients(data, 1)
        assert coeffs.values[0] == pytest.approx(1.0, abs=1e-15)

    def test_single_observation_zonal_mode(self):
        data = Dataset(
            points=np.array([[0.0, 0.0, 1.0]]), responses=np.array([1.0]), noise_var=1.0
        )
        coeffs = empirical_coefficients(data, 1)
        assert coeffs.values[1] == pytest.approx(math.sqrt(3.0), abs=1e-12)

    def test_unbiasedness(self):
        # Monte Carlo oracle: E[ahat_{l,m}] = a_{0;l,m} under uniform design.
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=4, seed=31))
        target_index = 5  # first order-block entry of level 2
        reps, n, sigma = 2000, 100, 0.5
        estimates = np.empty(reps)
        for rep in range(reps):
            data = generate_dataset(truth, n, sigma, seed=3000 + rep)
            estimates[rep] = empirical_coefficients(data, 2).values[target_index]
        se = estimates.std(ddof=1) / math.sqrt(reps)
        assert abs(estimates.mean() - truth.values[target_index]) <= 3 * se


class TestFit:
    def test_zero_responses(self):
        points = np.vstack([np.eye(3), -np.eye(3)])
        data = Dataset(points=points, responses=np.zeros(6), noise_var=0.25)
        model = fit(data, matern_spectrum(2, 2.0, 1.0, 1), 1)
        assert np.array_equal(model.means.values, np.zeros(4))

    def test_flat_prior_recovers_empirical(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=4, seed=13))
        data = generate_dataset(truth, 200, 0.5, seed=14)
        flat = table_spectrum(2, np.full(4, 1e12))
        model = fit(data, flat, 3)
        observed = empirical_coefficients(data, 3)
        rel = np.abs(model.means.values - observed.values).max() / np.abs(observed.values).max()
        assert rel <= 1e-9

    def test_uses_dataset_noise_and_size(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=3, seed=15))
        data = generate_dataset(truth, 40, 0.7, seed=16)
        spec = matern_spectrum(2, 2.0, 1.0, 2)
        model = fit(data, spec, 2)
        assert model.n == 40
        assert model.noise_var == pytest.approx(0.49)


class TestRmse:
    @staticmethod
    def _model_with_means(means, spec):
        return PosteriorModel(
            means=means,
            level_variances=np.zeros(means.max_degree + 1),
            trunc_degree=means.max_degree,
            n=10,
            noise_var=0.25,
            spectrum=spec,
        )

    def test_zero_when_means_equal_truth(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=3, seed=17))
        spec = matern_spectrum(2, 2.0, 1.0, 3)
        model = self._model_with_means(HarmonicCoefficients(2, truth.values.copy()), spec)
        grid = quadrature_grid(6)
        assert rmse(model, truth, grid) <= 1e-12

    def test_single_coefficient_offset(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=2, seed=18))
        spec = matern_spectrum(2, 2.0, 1.0, 2)
        delta = 0.37
        shifted = truth.values.copy()
        shifted[3] += delta
        model = self._model_with_means(HarmonicCoefficients(2, shifted), spec)
        grid = quadrature_grid(4)
        assert rmse(model, truth, grid) == pytest.approx(delta, abs=1e-10)

    def test_matches_coefficient_space(self):
        # Parseval oracle: grid distance equals flat coefficient distance.
        for seed in range(5):
            truth = generate_truth(TruthSpec(beta=2.0, max_degree=6, seed=seed))
            data = generate_dataset(truth, 80, 0.5, seed=100 + seed)
            spec = matern_spectrum(2, 2.0, 1.0, 4)
            model = fit(data, spec, 4)
            grid = quadrature_grid(8)
            by_grid = rmse(model, truth, grid)
            by_coeff = coefficient_rmse(model, truth)
            assert abs(by_grid - by_coeff) <= 1e-10

    def test_parseval_split(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=6, seed=23))
        data = generate_dataset(truth, 60, 0.5, seed=24)
        spec = matern_spectrum(2, 2.0, 1.0, 3)
        model = fit(data, spec, 3)
        grid = quadrature_grid(7)
        retained = np.sum((model.means.values - truth.values[:16]) ** 2)
        tail = np.sum(truth.values[16:] ** 2)
        assert rmse(model, truth, grid) ** 2 == pytest.approx(retained + tail, abs=1e-10)

    def test_insufficient_grid_degree(self):
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=8, seed=25))
        spec = matern_spectrum(2, 2.0, 1.0, 2)
        model = posterior(truth.truncated(2), spec, 0.5, 10, 2)
        with pytest.raises(ValueError, match="insufficient"):
            rmse(model, truth, quadrature_grid(5))


class TestEmpiricalCoefficientVariance:
    def test_zero_truth_reduces_to_idealized_level(self):
        from sphreg.regression import empirical_coefficient_variance

        truth = HarmonicCoefficients.zeros(2, 2)
        variances = empirical_coefficient_variance(truth, 0.5, 2, n=100)
        assert np.allclose(variances, 0.25 / 100, rtol=1e-12)

    def test_design_term_sums_to_field_energy(self):
        # Summing Var(f0(X) Y_{l,m}(X)) over all modes l <= L gives
        # (L+1)^2 E[f0^2] - sum_{l<=L} a0^2 by the addition formula, which is
        # (L+1)^2 - 1 for a unit-norm truth fully contained below L.
        from sphreg.regression import empirical_coefficient_variance

        truth = generate_truth(TruthSpec(beta=2.0, max_degree=3, seed=8))
        sigma, n, level = 0.5, 50, 5
        variances = empirical_coefficient_variance(truth, sigma, level, n=n)
        design_total = float(np.sum(variances * n - sigma**2))
        expected = (level + 1) ** 2 - truth.norm_sq()
        assert design_total == pytest.approx(expected, rel=0.05)
        assert np.all(variances * n >= sigma**2 - 1e-12)


class TestPathways:
    def test_empirical_tracks_sequence_posterior(self):
        # The empirical-pathway posterior mean approaches the idealized
        # sequence posterior mean: the mean gap stays below twice the
        # idealized root-risk and shrinks as n grows.
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=10, seed=41))
        sigma, alpha, c = 0.5, 2.0, 2.5
        gaps = {}
        for n in (2000, 8000):
            level = truncation_level(n, alpha, 2, c)
            spec = matern_spectrum(2, alpha, 1.0, level)
            padded = truth.padded(level) if level > truth.max_degree else truth
            distances = []
            for rep in range(20):
                data = generate_dataset(truth, n, sigma, seed=5000 + rep)
                emp = fit(data, spec, level)
                observed = simulate_sequence_observations(
                    padded, sigma, n, seed=6000 + rep
                )
                seq = posterior(observed, spec, sigma, n, level)
                distances.append(
                    float(np.linalg.norm(emp.means.values - seq.means.values))
                )
            risk = expected_posterior_risk(truth, spec, sigma, n, level)
            gaps[n] = np.mean(distances)
            assert gaps[n] <= 2.0 * math.sqrt(risk.total)
        assert gaps[8000] < gaps[2000]

    def test_rotation_equivariance_of_rmse(self, random_rotation):
        # Rotating the whole design (and evaluating the truth there) leaves
        # the RMSE distribution unchanged; checked with a rank test at 1%.
        truth = generate_truth(TruthSpec(beta=2.0, max_degree=6, seed=51))
        rot = random_rotation(99)
        sigma, n, level = 0.5, 200, 6
        spec = matern_spectrum(2, 2.0, 1.0, level)
        grid = quadrature_grid(12)

        def run(rotate, seed):
            rng = np.random.default_rng(seed)
            g = rng.standard_normal((n, 3))
            points = g / np.linalg.norm(g, axis=1, keepdims=True)
            if rotate:
                points = points @ rot.T
            values = basis_matrix(truth.max_degree, points) @ truth.values
            responses = values + sigma * rng.standard_normal(n)
            data = Dataset(points=points, responses=responses, noise_var=sigma**2)
            return rmse(fit(data, spec, level), truth, grid)

        base = [run(False, 7000 + rep) for rep in range(50)]
        rotated = [run(True, 7100 + rep) for rep in range(50)]
        result = stats.mannwhitneyu(base, rotated, alternative="two-sided")
        assert result.pvalue > 0.01
