"""
Functional tests for the density estimator at full experiment scale.

These run the property suites over many random samples and the repeated
goodness-of-fit experiments with n = 2^15 draws and 20 repetitions.
"""

import numpy as np
import pytest

from app.models.dataset import UnivariateSpec
from app.models.mesh import WeightedSample
from app.services.density_service import DensityService
from app.services.gof_service import GofService
from app.services.mesh_service import MeshService

N_LARGE = 2 ** 15


@pytest.mark.functional
@pytest.mark.density
class TestDensityProperties:

    def test_invariants_over_random_samples(self):
        rng = np.random.default_rng(1234)
        for _ in range(200):
            n = int(rng.integers(10, 5001))
            values = rng.standard_t(df=int(rng.integers(2, 30)), size=n) * rng.uniform(0.1, 10.0)
            weights = rng.uniform(0.0, 1.0, size=n) if rng.uniform() < 0.5 else np.ones(n)
            weights[0] = 1.0
            sample = WeightedSample(values=values, weights=weights)

            model = DensityService.fit(sample)
            lam = model.lam
            assert np.all(lam >= 0)
            assert lam[0] == lam[1] and lam[-1] == lam[-2]
            assert model.mass() == pytest.approx(1.0, abs=1e-10)

            grid = MeshService.weighted_ecdf(sample, model.mesh)
            np.testing.assert_allclose(
                DensityService.coefficients_hermite(grid), lam, rtol=0, atol=1e-12 / model.mesh.h
            )

            derivative = model.basis.spline(lam).derivative()
            knots = model.mesh.points[1:-1]
            delta = 1e-9 * (model.mesh.b - model.mesh.a)
            jump = np.abs(derivative(knots + delta) - derivative(knots - delta))
            assert jump.max() <= 1e-4 * np.abs(derivative(model.mesh.points)).max() + 1e-12

    def test_coefficients_equal_kernel_estimate(self):
        rng = np.random.default_rng(99)
        for _ in range(50):
            values = rng.lognormal(0.0, 0.7, size=int(rng.integers(50, 3000)))
            mesh = MeshService.build_mesh(values, padding=0.02)
            # move points off cell boundaries, where the two indicators differ
            offsets = (values - mesh.a) / mesh.h
            on_boundary = np.isclose(offsets, np.round(offsets), rtol=0, atol=1e-9)
            values = np.where(on_boundary, values + 1e-9 * mesh.h, values)

            model = DensityService.fit(values, mesh=mesh)
            centres = mesh.a + (np.arange(mesh.N) + 0.5) * mesh.h
            np.testing.assert_allclose(
                model.lam[1:-1], DensityService.naive_kernel_pdf(values, mesh.h, centres), rtol=1e-12, atol=1e-12
            )

    @pytest.mark.slow
    def test_pointwise_error_decays_with_n(self):
        truth = UnivariateSpec.parse('normal:5,0.3')
        sizes = 2 ** np.arange(9, 16)
        mse = []
        for n in sizes:
            estimates = [
                DensityService.eval_pdf(DensityService.fit(truth.sample(n, np.random.default_rng(seed))), 5.0)
                for seed in range(20)
            ]
            mse.append(np.mean((np.array(estimates) - truth.pdf(5.0)) ** 2))

        slope = np.polyfit(np.log(sizes), np.log(mse), 1)[0]
        assert -1.0 <= slope <= -0.4


@pytest.mark.functional
@pytest.mark.slow
@pytest.mark.density
class TestGoodnessOfFitExperiments:

    def test_normal(self):
        truth = UnivariateSpec.parse('normal:5,0.3')
        report = GofService.run_experiment(truth, N_LARGE, reps=20, seed=2024)

        assert report.ks_pvalue > 0.05
        assert report.cvm_pvalue > 0.05
        assert 3e-7 <= report.cdf_amise <= 3e-5
        assert report.amise < 2e-3

        model = DensityService.fit(truth.sample(N_LARGE, np.random.default_rng(0)))
        assert model.mesh.N == 64
        assert DensityService.eval_pdf(model, 5.0) == pytest.approx(truth.pdf(5.0), rel=0.05)

    def test_two_component_mixture(self):
        truth = UnivariateSpec.parse('mixture:0.4,4.5,0.2;0.6,5.5,0.3')
        report = GofService.run_experiment(truth, N_LARGE, reps=20, seed=2024)

        assert report.ks_pvalue > 0.05
        assert report.cvm_pvalue > 0.05
        assert 3e-7 <= report.cdf_amise <= 3e-5

    def test_exponential(self):
        # the boundary at zero adds a CDF bias of order h^2 on top of the sampling error
        truth = UnivariateSpec.parse('exponential:1')
        report = GofService.run_experiment(truth, N_LARGE, reps=20, seed=2024)

        assert 3e-7 <= report.cdf_amise <= 1e-4
        assert report.amise < 1e-2

    def test_spline_beats_kernel_baseline(self):
        truth = UnivariateSpec.parse('normal:5,0.3')
        spline = GofService.run_experiment(truth, N_LARGE, reps=5, seed=7)
        kernel = GofService.run_experiment(truth, N_LARGE, reps=5, seed=7, method='kernel')
        assert spline.amise < kernel.amise
