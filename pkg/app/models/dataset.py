"""
Dataset Models

This module contains the synthetic-data recipe types and the labeled dataset
they produce. A recipe fully describes how every cluster is generated
(size, copula, per-dimension marginal transform) so a dataset can be
regenerated bitwise from its recipe and seed.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from app.exceptions import ValidationError
from app.models.base import SerializableModel
from app.models.copula import CopulaSpec

TRANSFORM_KINDS = ('normal', 'exponential', 'uniform')
DISTRIBUTION_KINDS = ('normal', 'exponential', 'mixture')
DEFAULT_MIXTURE = ((0.5, 0.0, 1.0), (0.5, 5.0, 4.0))


@dataclass(frozen=True)
class UnivariateSpec(SerializableModel):
    """
    Ground-truth univariate distribution for density experiments.

    ``params`` holds (mean, variance) for normal, (rate,) for exponential and
    (weight, mean, variance) triples for a Gaussian mixture.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in DISTRIBUTION_KINDS:
            raise ValidationError(f"unknown distribution '{self.kind}'")
        if self.kind == 'mixture':
            params = tuple(tuple(float(item) for item in triple) for triple in self.params)
            if not params or any(len(triple) != 3 for triple in params):
                raise ValidationError('mixture needs (weight, mean, variance) triples')
            weights = np.array([triple[0] for triple in params])
            variances = np.array([triple[2] for triple in params])
            if np.any(weights <= 0) or np.any(variances <= 0):
                raise ValidationError('mixture weights and variances must be positive')
            total = weights.sum()
            params = tuple((w / total, m, v) for w, m, v in params)
        else:
            params = tuple(float(item) for item in self.params)
            expected = 2 if self.kind == 'normal' else 1
            if len(params) != expected:
                raise ValidationError(f'{self.kind} takes {expected} parameter(s), got {len(params)}')
            if params[-1] <= 0:
                raise ValidationError(f'{self.kind} scale parameter must be positive')
        object.__setattr__(self, 'params', params)

    @classmethod
    def parse(cls, text):
        """
        Parse ``normal:5,0.3``, ``exponential:1`` or ``mixture:0.5,0,1;0.5,5,4``.

        A bare ``mixture`` selects the default two-component mixture.
        """
        kind, _, rest = str(text).strip().partition(':')
        kind = kind.strip().lower()
        try:
            if kind == 'mixture':
                if not rest.strip():
                    return cls(kind='mixture', params=DEFAULT_MIXTURE)
                triples = [
                    tuple(float(item) for item in part.split(','))
                    for part in rest.split(';') if part.strip()
                ]
                return cls(kind='mixture', params=triples)
            return cls(kind=kind, params=[float(item) for item in rest.split(',') if item.strip()])
        except ValueError as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ValidationError(f"malformed distribution '{text}'") from None

    def _frozen(self):
        if self.kind == 'normal':
            mean, variance = self.params
            return [(1.0, stats.norm(loc=mean, scale=np.sqrt(variance)))]
        if self.kind == 'exponential':
            return [(1.0, stats.expon(scale=1.0 / self.params[0]))]
        return [(w, stats.norm(loc=m, scale=np.sqrt(v))) for w, m, v in self.params]

    def pdf(self, x):
        return sum(weight * dist.pdf(x) for weight, dist in self._frozen())

    def cdf(self, x):
        return sum(weight * dist.cdf(x) for weight, dist in self._frozen())

    def sample(self, n, rng):
        """Draw n values with a numpy Generator."""
        if int(n) < 1:
            raise ValidationError(f'sample size must be positive, got {n}')
        n = int(n)
        if self.kind == 'normal':
            mean, variance = self.params
            return rng.normal(mean, np.sqrt(variance), size=n)
        if self.kind == 'exponential':
            return rng.exponential(1.0 / self.params[0], size=n)
        weights = np.array([triple[0] for triple in self.params])
        choice = rng.choice(len(weights), size=n, p=weights)
        means = np.array([triple[1] for triple in self.params])
        scales = np.sqrt([triple[2] for triple in self.params])
        return rng.normal(means[choice], scales[choice])

    def describe(self):
        if self.kind == 'mixture':
            return 'mixture:' + ';'.join(','.join(f'{item:g}' for item in triple) for triple in self.params)
        return f"{self.kind}:{','.join(f'{item:g}' for item in self.params)}"


@dataclass(frozen=True)
class MarginalTransform(SerializableModel):
    """Maps a uniform copula coordinate to loc + scale * Q(u) for a standard quantile Q."""

    kind: str = 'normal'
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in TRANSFORM_KINDS:
            raise ValidationError(f"unknown marginal transform '{self.kind}'")
        if not float(self.scale) > 0:
            raise ValidationError(f'transform scale must be positive, got {self.scale}')
        object.__setattr__(self, 'loc', float(self.loc))
        object.__setattr__(self, 'scale', float(self.scale))

    def apply(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == 'normal':
            quantiles = stats.norm.ppf(u)
        elif self.kind == 'exponential':
            quantiles = stats.expon.ppf(u)
        else:
            quantiles = u
        return self.loc + self.scale * quantiles


@dataclass(frozen=True, eq=False)
class ClusterRecipe(SerializableModel):
    """One generated cluster: its size, its copula and one transform per dimension."""

    size: int
    copula: CopulaSpec
    marginals: tuple

    def __post_init__(self):
        if int(self.size) < 1:
            raise ValidationError(f'cluster size must be positive, got {self.size}')
        marginals = tuple(
            item if isinstance(item, MarginalTransform) else MarginalTransform.from_dict(item)
            for item in self.marginals
        )
        self.copula.check_dim(len(marginals))
        object.__setattr__(self, 'size', int(self.size))
        object.__setattr__(self, 'marginals', marginals)

    @property
    def dim(self):
        return len(self.marginals)

    @classmethod
    def from_dict(cls, data):
        return cls(
            size=data['size'],
            copula=CopulaSpec.from_dict(data['copula']),
            marginals=[MarginalTransform.from_dict(item) for item in data['marginals']],
        )


@dataclass(frozen=True, eq=False)
class DatasetRecipe(SerializableModel):
    """Named list of cluster recipes; cluster k produces label k."""

    name: str
    clusters: tuple

    def __post_init__(self):
        clusters = tuple(self.clusters)
        if not clusters:
            raise ValidationError('a dataset recipe needs at least one cluster')
        if len({cluster.dim for cluster in clusters}) != 1:
            raise ValidationError('all clusters of a recipe must share the same dimension')
        object.__setattr__(self, 'clusters', clusters)

    @property
    def dim(self):
        return self.clusters[0].dim

    @property
    def sizes(self):
        return [cluster.size for cluster in self.clusters]

    @classmethod
    def from_dict(cls, data):
        return cls(
            name=data['name'],
            clusters=[ClusterRecipe.from_dict(item) for item in data['clusters']],
        )


@dataclass(frozen=True, eq=False)
class LabeledDataset(SerializableModel):
    """An n x D observation matrix with optional ground-truth labels."""

    X: np.ndarray
    labels: np.ndarray = None
    seed: int = None
    recipe: DatasetRecipe = None

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValidationError(f'observations must be a non-empty n x D matrix, got {X.shape}')
        if not np.all(np.isfinite(X)):
            raise ValidationError('observations must be finite')
        object.__setattr__(self, 'X', X)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (X.shape[0],):
                raise ValidationError('labels must have one entry per observation')
            object.__setattr__(self, 'labels', labels.astype(int))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    @property
    def has_labels(self):
        return self.labels is not None
