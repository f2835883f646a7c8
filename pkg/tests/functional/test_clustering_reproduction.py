"""
Functional tests for copula-mixture clustering on the synthetic datasets.

Unless stated otherwise every run uses K-Means initial partitions, the best
of 10 per run, and all four candidate copula families. Random initial
partitions are exercised separately: they recover x1 in the best of ten
runs, and on x3 they can stall in a local optimum that mixes families
while the K-Means start reaches the all-Frank solution.
"""

import numpy as np
import pytest

from app.models.run_config import RunConfig
from app.services.datagen_service import DatasetService
from app.services.metrics_service import ClusteringService
from app.services.mixture_service import MixtureService


def reproduction_config(K, seed=0, **overrides):
    return RunConfig(K=K, seed=seed, init='kmeans', restarts=10, max_iter=100, **overrides)


def generating_family(dataset, labels, k):
    """Copula family that generated the majority of the points assigned to cluster k."""
    majority = np.bincount(dataset.labels[labels == k]).argmax()
    return dataset.recipe.clusters[majority].copula.family


@pytest.fixture(scope='module')
def x1_fit(x1_dataset):
    config = reproduction_config(K=4)
    model = MixtureService.fit(x1_dataset.X, config=config)
    return config, model


@pytest.fixture(scope='module')
def x3_dataset():
    return DatasetService.gen_synthetic('x3', seed=0)


@pytest.fixture(scope='module')
def x3_fit(x3_dataset):
    config = reproduction_config(K=3)
    model = MixtureService.fit(x3_dataset.X, config=config)
    return config, model


@pytest.mark.functional
@pytest.mark.slow
@pytest.mark.mixture
class TestEmStructure:

    def test_every_iteration_is_consistent(self, x1_dataset, mocker):
        models, responsibilities = [], []
        m_step = MixtureService.m_step
        e_step = MixtureService.e_step

        def record_m_step(*args, **kwargs):
            models.append(m_step(*args, **kwargs))
            return models[-1]

        def record_e_step(*args, **kwargs):
            responsibilities.append(e_step(*args, **kwargs))
            return responsibilities[-1]

        mocker.patch.object(MixtureService, 'm_step', side_effect=record_m_step)
        mocker.patch.object(MixtureService, 'e_step', side_effect=record_e_step)
        MixtureService.fit(x1_dataset.X, config=RunConfig(K=4, seed=5, init='kmeans', restarts=2, max_iter=10))

        assert models and responsibilities
        for model in models:
            assert model.pis.sum() == pytest.approx(1.0, abs=1e-10)
            for initial, final in model.copula_trace[0]:
                assert final >= initial - 1e-9
        for gamma in responsibilities:
            np.testing.assert_allclose(gamma.gamma.sum(axis=1), 1.0, rtol=0, atol=1e-10)
            assert np.all((gamma.gamma >= 0) & (gamma.gamma <= 1))

    def test_deterministic_under_fixed_seed(self, x1_dataset):
        config = RunConfig(K=4, seed=5, init='kmeans', restarts=2, max_iter=5)
        first = MixtureService.fit(x1_dataset.X, config=config)
        second = MixtureService.fit(x1_dataset.X, config=config)
        assert first.loglik_trace == second.loglik_trace
        np.testing.assert_array_equal(
            MixtureService.predict(first, x1_dataset.X), MixtureService.predict(second, x1_dataset.X)
        )


@pytest.mark.functional
@pytest.mark.slow
@pytest.mark.mixture
class TestSyntheticDatasets:

    def test_x1_recovers_clusters(self, x1_dataset, x1_fit):
        _, model = x1_fit
        labels = MixtureService.predict(model, x1_dataset.X)
        adjusted_rand, rand, _, _ = ClusteringService.external_metrics(x1_dataset.labels, labels)
        assert adjusted_rand >= 0.95
        assert rand >= 0.98

        rows = MixtureService.selection_rows(model, x1_dataset.X)
        assert len(rows) == 4
        assert sum(row.points for row in rows) == x1_dataset.n

    def test_x1_copulas_beat_gaussian_only(self, x1_dataset, x1_fit):
        config, model = x1_fit
        gaussian = MixtureService.fit(x1_dataset.X, config=config.with_overrides(families=['gaussian']))
        assert model.final_loglik >= gaussian.final_loglik

    def test_x2_selects_generating_families(self):
        dataset = DatasetService.gen_synthetic('x2', seed=0)
        model = MixtureService.fit(dataset.X, config=reproduction_config(K=4))
        labels = MixtureService.predict(model, dataset.X)

        matches = sum(
            component.copula.family is generating_family(dataset, labels, k)
            for k, component in enumerate(model.components)
        )
        assert matches >= 3

    def test_x3_selects_frank_everywhere(self, x3_fit):
        _, model = x3_fit
        assert [component.copula.family.value for component in model.components] == ['frank'] * 3

    def test_x3_gaussian_only_fits_worse(self, x3_dataset, x3_fit):
        config, model = x3_fit
        gaussian = MixtureService.fit(x3_dataset.X, config=config.with_overrides(families=['gaussian']))
        assert gaussian.final_loglik < model.final_loglik

    def test_x4_misclassification(self):
        dataset = DatasetService.gen_synthetic('x4', seed=0)
        model = MixtureService.fit(dataset.X, config=reproduction_config(K=2))
        labels = MixtureService.predict(model, dataset.X)
        assert ClusteringService.misclassification_rate(dataset.labels, labels) <= 0.12

    def test_kernel_marginals_also_cluster(self, x1_dataset):
        config = reproduction_config(K=4, marginal_method='kernel')
        model = MixtureService.fit(x1_dataset.X, config=config)
        labels = MixtureService.predict(model, x1_dataset.X, config)
        adjusted_rand, _, _, _ = ClusteringService.external_metrics(x1_dataset.labels, labels)
        assert adjusted_rand >= 0.9


@pytest.mark.functional
@pytest.mark.slow
@pytest.mark.mixture
class TestRandomInitialization:

    @staticmethod
    def random_config(K, seed):
        return RunConfig(K=K, seed=seed, init='random', restarts=5, max_iter=100)

    def test_x1_best_of_ten_runs_recovers_clusters(self, x1_dataset):
        scores = []
        for seed in range(10):
            model = MixtureService.fit(x1_dataset.X, config=self.random_config(4, seed))
            labels = MixtureService.predict(model, x1_dataset.X)
            scores.append(ClusteringService.external_metrics(x1_dataset.labels, labels))

        adjusted_rand, rand, _, _ = max(scores)
        assert adjusted_rand >= 0.95
        assert rand >= 0.98

    def test_x3_kmeans_start_is_at_least_as_likely(self, x3_dataset, x3_fit):
        _, model = x3_fit
        random_logliks = [
            MixtureService.fit(x3_dataset.X, config=self.random_config(3, seed)).final_loglik
            for seed in range(4)
        ]
        assert model.final_loglik >= max(random_logliks) - 1.0
        assert all(np.isfinite(random_logliks))
