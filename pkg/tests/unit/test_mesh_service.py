"""
Unit tests for mesh construction and the weighted empirical CDF.
"""

import numpy as np
import pytest

from app.exceptions import DegenerateSupportError, ValidationError
from app.models.mesh import BinsRule, UniformMesh, WeightedSample
from app.services.mesh_service import MeshService


@pytest.mark.unit
@pytest.mark.density
class TestBinsCount:

    @pytest.mark.parametrize('n, rice, cuberoot', [
        (2 ** 15, 64, 32),
        (1000, 20, 10),
        (1001, 22, 11),
        (8, 4, 2),
        (1, 2, 2),
    ])
    def test_rules(self, n, rice, cuberoot):
        assert MeshService.bins_count(n, BinsRule.RICE) == rice
        assert MeshService.bins_count(n, 'cuberoot') == cuberoot

    def test_explicit_rule_needs_count(self):
        assert MeshService.bins_count(10, 'explicit', n_bins=7) == 7
        with pytest.raises(ValidationError):
            MeshService.bins_count(10, 'explicit')

    def test_unknown_rule(self):
        with pytest.raises(ValidationError, match='unknown bins rule'):
            MeshService.bins_count(10, 'sturges')


@pytest.mark.unit
@pytest.mark.density
class TestBuildMesh:

    def test_spans_data_range(self):
        mesh = MeshService.build_mesh([3.0, 1.0, 2.0, 5.0])
        assert (mesh.a, mesh.b) == (1.0, 5.0)
        assert mesh.N == MeshService.bins_count(4)
        assert mesh.points[-1] == mesh.b
        assert mesh.h == pytest.approx(4.0 / mesh.N)

    def test_padding_widens_both_ends(self):
        mesh = MeshService.build_mesh([0.0, 10.0], padding=0.1)
        assert mesh.a == pytest.approx(-1.0)
        assert mesh.b == pytest.approx(11.0)

    def test_identical_values_need_padding(self):
        with pytest.raises(DegenerateSupportError, match='degenerate support'):
            MeshService.build_mesh([2.0, 2.0, 2.0])
        mesh = MeshService.build_mesh([2.0, 2.0, 2.0], padding=0.5)
        assert mesh.a < 2.0 < mesh.b

    def test_rejects_empty_input(self):
        with pytest.raises(ValidationError):
            MeshService.build_mesh([])

    def test_mesh_validation(self):
        with pytest.raises(ValidationError):
            UniformMesh(a=1.0, b=1.0, N=4)
        with pytest.raises(ValidationError):
            UniformMesh(a=0.0, b=1.0, N=1)


@pytest.mark.unit
@pytest.mark.density
class TestWeightedEcdf:

    def test_small_example(self):
        mesh = UniformMesh(a=0.0, b=4.0, N=4)
        grid = MeshService.weighted_ecdf([0.0, 1.0, 2.0, 3.0, 4.0], mesh)
        np.testing.assert_allclose(grid.F, [0.0, 0.4, 0.6, 0.8, 1.0])
        assert grid.Fp[0] == pytest.approx(0.4)
        assert grid.Fp[2] == pytest.approx((0.8 - 0.4) / 2.0)
        assert grid.Fpp[0] == 0.0 and grid.Fpp[-1] == 0.0

    def test_weights_shift_mass(self):
        mesh = UniformMesh(a=0.0, b=2.0, N=2)
        sample = WeightedSample(values=[0.5, 1.5], weights=[3.0, 1.0])
        grid = MeshService.weighted_ecdf(sample, mesh)
        np.testing.assert_allclose(grid.F, [0.0, 0.75, 1.0])

    def test_monotone_and_normalized(self, rng):
        values = rng.standard_normal(777)
        sample = WeightedSample(values=values, weights=rng.uniform(0.0, 2.0, size=777))
        mesh = MeshService.build_mesh(values)
        grid = MeshService.weighted_ecdf(sample, mesh)
        assert grid.F[0] == 0.0 and grid.F[-1] == 1.0
        assert np.all(np.diff(grid.F) >= 0)

    def test_integer_weights_match_repeated_observations(self, rng):
        values = rng.standard_normal(120)
        counts = rng.integers(1, 5, size=120)
        mesh = MeshService.build_mesh(values)

        weighted = MeshService.weighted_ecdf(WeightedSample(values=values, weights=counts), mesh)
        repeated = MeshService.weighted_ecdf(np.repeat(values, counts), mesh)
        np.testing.assert_allclose(weighted.F, repeated.F, rtol=0, atol=1e-12)
        np.testing.assert_allclose(weighted.Fp, repeated.Fp, rtol=0, atol=1e-9)
        np.testing.assert_allclose(weighted.Fpp, repeated.Fpp, rtol=0, atol=1e-6)

    def test_observation_outside_mesh(self):
        mesh = UniformMesh(a=0.0, b=1.0, N=2)
        with pytest.raises(ValidationError, match='observation 1'):
            MeshService.weighted_ecdf([0.5, 1.5], mesh)

    def test_sample_validation(self):
        with pytest.raises(ValidationError):
            WeightedSample(values=[1.0, 2.0], weights=[1.0])
        with pytest.raises(ValidationError):
            WeightedSample(values=[1.0, 2.0], weights=[1.0, -1.0])
        with pytest.raises(ValidationError):
            WeightedSample(values=[1.0, 2.0], weights=[0.0, 0.0])
