"""
Pytest configuration and fixtures for copmix testing.

This module provides shared fixtures for all test modules: the application
built with the testing configuration, the CLI runner, seeded random
generators and small synthetic datasets written to temporary files.
"""

import numpy as np
import pytest

from app import create_app
from app.models.dataset import LabeledDataset
from app.services.datagen_service import DatasetService
from app.utils.file_helpers import write_dataset


@pytest.fixture(scope='session')
def app():
    """
    Create and configure a new app instance for each test session.

    The testing configuration keeps repetitions and restarts small and logs
    warnings only.
    """
    app = create_app('testing')

    with app.app_context():
        yield app


@pytest.fixture
def runner(app):
    """
    Create a test runner for the Flask application.

    This fixture provides a test runner for testing CLI commands.
    """
    return app.test_cli_runner()


@pytest.fixture
def rng():
    """Seeded numpy Generator; every test gets the same stream."""
    return np.random.default_rng(20240607)


@pytest.fixture
def normal_sample(rng):
    """2000 draws from N(5, 0.3)."""
    return rng.normal(5.0, np.sqrt(0.3), size=2000)


@pytest.fixture
def two_blobs(rng):
    """
    Two well separated bivariate clusters with ground-truth labels.

    Each cluster has independent normal coordinates, so any copula family
    fits it and the labels are recoverable by every clusterer.
    """
    first = rng.normal(0.0, 1.0, size=(150, 2))
    second = rng.normal(0.0, 1.0, size=(150, 2)) + np.array([10.0, 10.0])
    X = np.vstack([first, second])
    labels = np.repeat([0, 1], 150)
    return LabeledDataset(X=X, labels=labels)


@pytest.fixture(scope='session')
def x1_dataset():
    """The x1 dataset (1500 rows, 4 clusters) with its default recipe and seed 7."""
    return DatasetService.gen_synthetic('x1', seed=7)


@pytest.fixture
def blobs_csv(tmp_path, two_blobs):
    """Path of a labeled two-cluster CSV."""
    path = tmp_path / 'blobs.csv'
    write_dataset(two_blobs, str(path))
    return str(path)


@pytest.fixture
def sample_csv(tmp_path, normal_sample):
    """Path of a one-column CSV holding the normal sample."""
    path = tmp_path / 'sample.csv'
    write_dataset(LabeledDataset(X=normal_sample[:, None]), str(path))
    return str(path)
