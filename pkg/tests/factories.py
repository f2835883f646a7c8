"""
Test data factories for creating consistent test data.

This module provides Factory Boy factories for creating test instances of
the domain models with realistic and reproducible data.
"""

import factory
import numpy as np

from app.models.copula import CopulaSpec
from app.models.mesh import WeightedSample
from app.models.run_config import RunConfig


class WeightedSampleFactory(factory.Factory):
    """
    Factory for creating WeightedSample instances.

    Values are normal draws and weights uniform on [0.1, 1]; every instance
    uses its own seed from the factory sequence.
    """

    class Meta:
        model = WeightedSample

    class Params:
        n = 500
        seed = factory.Sequence(lambda n: n)
        loc = 0.0
        scale = 1.0

    values = factory.LazyAttribute(
        lambda obj: np.random.default_rng(obj.seed).normal(obj.loc, obj.scale, size=obj.n)
    )
    weights = factory.LazyAttribute(
        lambda obj: np.random.default_rng(obj.seed + 10_000).uniform(0.1, 1.0, size=obj.n)
    )


class RunConfigFactory(factory.Factory):
    """Factory for creating small, fast RunConfig instances."""

    class Meta:
        model = RunConfig

    seed = factory.Sequence(lambda n: n)
    K = 2
    init = 'kmeans'
    restarts = 2
    max_iter = 30
    tol = 1e-4
    rescue_attempts = 2


class CopulaSpecFactory(factory.Factory):
    """Factory for creating Archimedean CopulaSpec instances."""

    class Meta:
        model = CopulaSpec

    family = factory.Iterator(['clayton', 'gumbel', 'frank'])
    theta = factory.LazyAttribute(lambda obj: {'clayton': 2.0, 'gumbel': 2.0, 'frank': 5.0}[obj.family])
