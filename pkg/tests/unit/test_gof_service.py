"""
Unit tests for the goodness-of-fit tests and integrated error metrics.
"""

import numpy as np
import pytest
from scipy import stats

from app.exceptions import ValidationError
from app.models.dataset import UnivariateSpec
from app.services.density_service import DensityService
from app.services.gof_service import GofService


@pytest.mark.unit
@pytest.mark.density
class TestStatisticalTests:

    def test_ks_detects_shift(self, rng):
        samples = rng.normal(1.0, 1.0, size=500)
        statistic, pvalue = GofService.ks_test(samples, stats.norm.cdf)
        assert statistic > 0.2
        assert pvalue < 1e-6

    def test_ks_statistic_definition(self, rng):
        samples = np.sort(rng.uniform(size=50))
        statistic, _ = GofService.ks_test(samples, lambda x: np.clip(x, 0.0, 1.0))
        n = samples.size
        expected = max(
            np.max(np.arange(1, n + 1) / n - samples),
            np.max(samples - np.arange(n) / n),
        )
        assert statistic == pytest.approx(expected, abs=1e-12)

    def test_ks_asymptotic_pvalue(self):
        n = 100
        assert GofService.ks_pvalue(1.36 / np.sqrt(n), n) == pytest.approx(0.049, abs=2e-3)
        assert GofService.ks_pvalue(0.0, n) == pytest.approx(1.0)

    def test_ks_pvalue_is_the_asymptotic_kolmogorov_tail(self, rng):
        samples = rng.normal(size=300)
        statistic, pvalue = GofService.ks_test(samples, stats.norm.cdf)
        reference = stats.kstest(samples, stats.norm.cdf, method='asymp')
        assert pvalue == GofService.ks_pvalue(statistic, samples.size)
        assert pvalue == pytest.approx(reference.pvalue, rel=1e-12)

    def test_cvm_statistic_definition(self, rng):
        samples = rng.normal(size=200)
        statistic, pvalue = GofService.cvm_test(samples, stats.norm.cdf)
        n = samples.size
        u = stats.norm.cdf(np.sort(samples))
        expected = 1.0 / (12 * n) + np.sum((u - (2 * np.arange(1, n + 1) - 1) / (2.0 * n)) ** 2)
        assert statistic == pytest.approx(expected, rel=1e-10)
        assert 0.0 <= pvalue <= 1.0

    def test_empty_sample(self):
        with pytest.raises(ValidationError):
            GofService.ks_test([], stats.norm.cdf)

    @pytest.mark.parametrize('test', [GofService.ks_test, GofService.cvm_test])
    def test_null_samples_are_rarely_rejected(self, test):
        rng = np.random.default_rng(7)
        pvalues = [test(rng.normal(size=200), stats.norm.cdf)[1] for _ in range(20)]
        assert sum(pvalue > 0.05 for pvalue in pvalues) >= 18

    @pytest.mark.parametrize('test', [GofService.ks_test, GofService.cvm_test])
    def test_pvalue_falls_as_statistic_grows(self, test, rng):
        samples = rng.normal(size=150)
        results = sorted(test(samples + shift, stats.norm.cdf) for shift in (0.0, 0.05, 0.1, 0.2, 0.4, 0.8))
        statistics = [statistic for statistic, _ in results]
        pvalues = [pvalue for _, pvalue in results]
        assert statistics[-1] > statistics[0]
        assert all(later <= earlier for earlier, later in zip(pvalues, pvalues[1:]))

    @pytest.mark.parametrize('test', [GofService.ks_test, GofService.cvm_test])
    def test_affine_invariance(self, test, rng):
        samples = rng.normal(size=250)
        loc, scale = 5.0, 0.3
        base = test(samples, stats.norm.cdf)
        moved = test(loc + scale * samples, stats.norm(loc=loc, scale=scale).cdf)
        assert moved[0] == pytest.approx(base[0], rel=1e-9)
        assert moved[1] == pytest.approx(base[1], rel=1e-9, abs=1e-12)


@pytest.mark.unit
@pytest.mark.density
class TestIntegratedErrors:

    def test_identical_functions(self):
        ise, rse = GofService.integrated_errors(stats.norm.pdf, stats.norm.pdf, (-5.0, 5.0))
        assert ise == 0.0 and rse == 0.0

    def test_constant_difference(self):
        ise, rse = GofService.integrated_errors(np.ones_like, np.zeros_like, (0.0, 2.0))
        assert ise == pytest.approx(2.0)
        assert rse == pytest.approx(1.0)

    def test_empty_interval(self):
        with pytest.raises(ValidationError):
            GofService.integrated_errors(np.ones_like, np.zeros_like, (1.0, 1.0))

    def test_density_errors_average_repetitions(self):
        truth = UnivariateSpec.parse('normal:0,1')

        def sampler(rep):
            return truth.sample(4000, np.random.default_rng(rep))

        amise, rmse = GofService.density_errors(
            lambda sample: DensityService.fit(sample).pdf, truth.pdf, (-3.0, 3.0), reps=3, sampler=sampler
        )
        assert 0.0 < amise < 5e-3
        assert 0.0 < rmse < 0.05

    def test_density_errors_need_repetitions(self):
        with pytest.raises(ValidationError):
            GofService.density_errors(np.ones_like, np.ones_like, (0.0, 1.0), reps=0)


@pytest.mark.unit
@pytest.mark.density
class TestExperiments:

    def test_run_experiment(self):
        truth = UnivariateSpec.parse('normal:5,0.3')
        report = GofService.run_experiment(truth, n=4096, reps=3, seed=1)

        assert report.repetitions == 3
        assert 0.0 <= report.ks_pvalue <= 1.0
        assert 0.0 <= report.cvm_pvalue <= 1.0
        assert report.amise < 5e-3
        assert report.cdf_amise < 5e-4
        assert report.mean_time_ms >= 0.0

    def test_experiment_is_seeded(self):
        truth = UnivariateSpec.parse('exponential:1')
        first = GofService.run_experiment(truth, n=500, reps=2, seed=3)
        second = GofService.run_experiment(truth, n=500, reps=2, seed=3)
        assert first.ks_statistic == second.ks_statistic
        assert first.amise == second.amise

    def test_kernel_method(self):
        truth = UnivariateSpec.parse('mixture')
        report = GofService.run_experiment(truth, n=2000, reps=2, seed=0, method='kernel')
        assert report.amise < 1e-2

    def test_assess_fitted_model(self, normal_sample):
        truth = UnivariateSpec.parse('normal:5,0.3')
        model = DensityService.fit(normal_sample)
        report = GofService.assess(model, normal_sample, truth, reps=2, seed=0)
        assert report.repetitions == 2
        assert report.ks_statistic < 0.1
        assert 'ks_pvalue' in report.render()
