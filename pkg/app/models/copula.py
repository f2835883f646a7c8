"""
Copula Models

This module contains the copula parameter types: the family enumeration,
the CopulaSpec tagged union (correlation matrix for the Gaussian family,
scalar theta for the Archimedean ones), clamped pseudo-observations and the
result of a weighted fit.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from app.exceptions import ValidationError
from app.models.base import SerializableModel

MIN_EIGENVALUE = 1e-8


class CopulaFamily(str, Enum):
    """Supported copula families, declared in tie-breaking order."""

    GAUSSIAN = 'gaussian'
    CLAYTON = 'clayton'
    GUMBEL = 'gumbel'
    FRANK = 'frank'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown copula family '{value}'") from None

    @classmethod
    def parse_many(cls, values):
        """Parse a comma-separated string or an iterable into a de-duplicated tuple in family order."""
        if isinstance(values, str):
            values = [item for item in values.split(',') if item.strip()]
        families = {cls.parse(value) for value in values}
        if not families:
            raise ValidationError('at least one copula family is required')
        return tuple(family for family in cls if family in families)


@dataclass(frozen=True, eq=False)
class CopulaSpec(SerializableModel):
    """
    Copula family plus parameters.

    Gaussian specs carry the correlation matrix ``P``; Clayton, Gumbel and
    Frank carry the scalar ``theta``.
    """

    family: CopulaFamily
    theta: float = None
    P: np.ndarray = None

    def __post_init__(self):
        family = CopulaFamily.parse(self.family)
        object.__setattr__(self, 'family', family)

        if family is CopulaFamily.GAUSSIAN:
            if self.P is None:
                raise ValidationError('gaussian copula requires a correlation matrix P')
            P = np.array(self.P, dtype=float)
            if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 2:
                raise ValidationError(f'P must be a square matrix of size >= 2, got {P.shape}')
            if not np.all(np.isfinite(P)) or not np.allclose(P, P.T, atol=1e-12):
                raise ValidationError('P must be finite and symmetric')
            if not np.allclose(np.diag(P), 1.0, atol=1e-12):
                raise ValidationError('P must have a unit diagonal')
            if np.linalg.eigvalsh(P).min() < MIN_EIGENVALUE / 2:
                raise ValidationError('P must be positive definite')
            P.setflags(write=False)
            object.__setattr__(self, 'P', P)
            object.__setattr__(self, 'theta', None)
            return

        if self.theta is None:
            raise ValidationError(f'{family.value} copula requires theta')
        theta = float(self.theta)
        if not np.isfinite(theta):
            raise ValidationError('theta must be finite')
        if family is CopulaFamily.CLAYTON and not theta > 0:
            raise ValidationError(f'clayton requires theta > 0, got {theta}')
        if family is CopulaFamily.GUMBEL and not theta >= 1:
            raise ValidationError(f'gumbel requires theta >= 1, got {theta}')
        if family is CopulaFamily.FRANK and theta == 0:
            raise ValidationError('frank requires theta != 0')
        object.__setattr__(self, 'theta', theta)
        object.__setattr__(self, 'P', None)

    @classmethod
    def gaussian(cls, P):
        return cls(family=CopulaFamily.GAUSSIAN, P=P)

    @classmethod
    def independence(cls, dim):
        return cls.gaussian(np.eye(dim))

    @property
    def dim(self):
        """Dimension fixed by the spec (None for Archimedean families)."""
        return None if self.P is None else self.P.shape[0]

    def check_dim(self, dim):
        """Validate the spec for use in ``dim`` dimensions."""
        if dim < 2:
            raise ValidationError(f'copulas need at least 2 dimensions, got {dim}')
        if self.P is not None and self.P.shape[0] != dim:
            raise ValidationError(f'correlation matrix is {self.P.shape[0]}-dimensional, data is {dim}-dimensional')
        if self.family is CopulaFamily.FRANK and self.theta < 0 and dim > 2:
            raise ValidationError('frank with theta < 0 is only a copula for 2 dimensions')

    def describe(self):
        if self.family is CopulaFamily.GAUSSIAN:
            off_diagonal = self.P[np.triu_indices_from(self.P, k=1)]
            return f"gaussian(rho={', '.join(f'{rho:.3f}' for rho in off_diagonal)})"
        return f'{self.family.value}(theta={self.theta:.3f})'

    def to_dict(self):
        if self.family is CopulaFamily.GAUSSIAN:
            return {'family': self.family.value, 'P': self.P.tolist()}
        return {'family': self.family.value, 'theta': self.theta}

    @classmethod
    def from_dict(cls, data):
        return cls(family=data['family'], theta=data.get('theta'), P=data.get('P'))


@dataclass(frozen=True, eq=False)
class PseudoObservations(SerializableModel):
    """Rows u_i = (F_1(x_i1), ..., F_D(x_iD)) clamped into (eps, 1 - eps)."""

    U: np.ndarray

    def __post_init__(self):
        U = np.array(self.U, dtype=float)
        if U.ndim != 2 or U.shape[0] < 1 or U.shape[1] < 2:
            raise ValidationError(f'pseudo-observations must be an n x D matrix with D >= 2, got {U.shape}')
        if not np.all((U > 0) & (U < 1)):
            raise ValidationError('pseudo-observations must lie strictly inside (0, 1)')
        U.setflags(write=False)
        object.__setattr__(self, 'U', U)

    @classmethod
    def clamped(cls, U, eps=1e-10):
        return cls(U=np.clip(np.asarray(U, dtype=float), eps, 1.0 - eps))

    @property
    def n(self):
        return self.U.shape[0]

    @property
    def dim(self):
        return self.U.shape[1]


@dataclass(frozen=True, eq=False)
class CopulaFit(SerializableModel):
    """Outcome of a weighted maximum-likelihood copula fit."""

    spec: CopulaSpec
    loglik: float
    initial_loglik: float
    n_evaluations: int = 0

    def to_dict(self):
        return {
            'spec': self.spec.to_dict(),
            'loglik': self.loglik,
            'initial_loglik': self.initial_loglik,
            'n_evaluations': self.n_evaluations,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            spec=CopulaSpec.from_dict(data['spec']),
            loglik=data['loglik'],
            initial_loglik=data['initial_loglik'],
            n_evaluations=data.get('n_evaluations', 0),
        )
