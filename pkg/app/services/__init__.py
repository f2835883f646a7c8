"""
Services Package

This package contains the numerical services of the toolkit. Services hold
the algorithms as static methods on one class per area and operate on the
domain models, which keeps the CLI blueprints thin and the engine testable
without an application context.
"""

from .copula_service import CopulaService
from .datagen_service import DatasetService
from .density_service import DensityService
from .gof_service import GofService
from .mesh_service import MeshService
from .metrics_service import ClusteringService
from .mixture_service import MixtureService

__all__ = [
    'MeshService', 'DensityService', 'GofService', 'CopulaService',
    'MixtureService', 'ClusteringService', 'DatasetService',
]
