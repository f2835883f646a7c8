"""
Domain Models Package

This package contains the immutable domain types of the toolkit. Models are
organized into separate files by area:

- mesh: uniform meshes, weighted samples and empirical CDF grids
- density: the quadratic B-spline basis, BSHQI and kernel density estimates
- copula: copula families, parameter specs and pseudo-observations
- mixture: mixture components, fitted models and responsibilities
- dataset: synthetic data recipes and labeled datasets
- reports: goodness-of-fit, clustering and copula selection results
- run_config: the validated settings of one run
"""

from app.models.base import SerializableModel
from app.models.copula import CopulaFamily, CopulaFit, CopulaSpec, PseudoObservations
from app.models.dataset import (
    ClusterRecipe,
    DatasetRecipe,
    LabeledDataset,
    MarginalTransform,
    UnivariateSpec,
)
from app.models.density import BSplineBasis2, BshqiDensity, KernelDensity
from app.models.mesh import BinsRule, EcdfGrid, UniformMesh, WeightedSample
from app.models.mixture import MixtureComponent, MixtureModel, Responsibilities
from app.models.reports import ClusteringReport, GofReport, SelectionRow
from app.models.run_config import InitMethod, MarginalMethod, RunConfig

# Make models available at package level
__all__ = [
    'SerializableModel', 'BinsRule', 'UniformMesh', 'WeightedSample', 'EcdfGrid',
    'BSplineBasis2', 'BshqiDensity', 'KernelDensity',
    'CopulaFamily', 'CopulaSpec', 'CopulaFit', 'PseudoObservations',
    'MixtureComponent', 'MixtureModel', 'Responsibilities',
    'UnivariateSpec', 'MarginalTransform', 'ClusterRecipe', 'DatasetRecipe', 'LabeledDataset',
    'GofReport', 'ClusteringReport', 'SelectionRow',
    'RunConfig', 'InitMethod', 'MarginalMethod',
]
