"""
Mixture Models

This module contains the semiparametric copula-mixture types: a component
(mixing weight, copula, fitted marginals), the fitted model with its
log-likelihood trace, and the responsibility matrix produced by the E-step.
"""

from dataclasses import dataclass, field

import numpy as np

from app.exceptions import ValidationError
from app.models.base import SerializableModel, to_jsonable
from app.models.copula import CopulaSpec
from app.models.density import marginal_from_dict

PI_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class MixtureComponent(SerializableModel):
    """One cluster g_k: mixing weight, copula and one fitted density per dimension."""

    pi: float
    copula: CopulaSpec
    marginals: tuple

    def __post_init__(self):
        pi = float(self.pi)
        if not 0 < pi <= 1 + PI_TOLERANCE:
            raise ValidationError(f'mixing weight must lie in (0, 1], got {pi}')
        marginals = tuple(self.marginals)
        self.copula.check_dim(len(marginals))
        object.__setattr__(self, 'pi', pi)
        object.__setattr__(self, 'marginals', marginals)

    @property
    def dim(self):
        return len(self.marginals)

    def to_dict(self):
        return {
            'pi': self.pi,
            'copula': self.copula.to_dict(),
            'marginals': [marginal.to_dict() for marginal in self.marginals],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            pi=data['pi'],
            copula=CopulaSpec.from_dict(data['copula']),
            marginals=[marginal_from_dict(item) for item in data['marginals']],
        )


@dataclass(frozen=True, eq=False)
class MixtureModel(SerializableModel):
    """
    Fitted copula mixture.

    ``copula_trace`` keeps, for every iteration, the (initial, final) weighted
    copula log-likelihood of each component's parameter substep.
    """

    components: tuple
    loglik_trace: list = field(default_factory=list)
    n_iter: int = 0
    converged: bool = False
    seed: int = None
    config: dict = field(default_factory=dict)
    copula_trace: list = field(default_factory=list)

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise ValidationError('a mixture needs at least one component')
        dims = {component.dim for component in components}
        if len(dims) != 1:
            raise ValidationError(f'components disagree on dimension: {sorted(dims)}')
        total = sum(component.pi for component in components)
        if abs(total - 1.0) > PI_TOLERANCE:
            raise ValidationError(f'mixing weights must sum to 1, got {total!r}')
        object.__setattr__(self, 'components', components)

    @property
    def K(self):
        return len(self.components)

    @property
    def dim(self):
        return self.components[0].dim

    @property
    def pis(self):
        return np.array([component.pi for component in self.components])

    @property
    def final_loglik(self):
        return self.loglik_trace[-1] if self.loglik_trace else None

    def to_dict(self):
        return {
            'K': self.K,
            'components': [component.to_dict() for component in self.components],
            'loglik_trace': to_jsonable(self.loglik_trace),
            'n_iter': self.n_iter,
            'converged': self.converged,
            'seed': self.seed,
            'config': to_jsonable(self.config),
            'copula_trace': to_jsonable(self.copula_trace),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            components=[MixtureComponent.from_dict(item) for item in data['components']],
            loglik_trace=list(data.get('loglik_trace', [])),
            n_iter=data.get('n_iter', 0),
            converged=data.get('converged', False),
            seed=data.get('seed'),
            config=dict(data.get('config', {})),
            copula_trace=list(data.get('copula_trace', [])),
        )


@dataclass(frozen=True, eq=False)
class Responsibilities(SerializableModel):
    """Posterior cluster probabilities gamma_ik; rows sum to one."""

    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float)
        if gamma.ndim != 2 or gamma.shape[0] < 1 or gamma.shape[1] < 1:
            raise ValidationError(f'responsibilities must be an n x K matrix, got {gamma.shape}')
        if np.any(gamma < 0) or np.any(gamma > 1 + 1e-12):
            raise ValidationError('responsibilities must lie in [0, 1]')
        if not np.allclose(gamma.sum(axis=1), 1.0, rtol=0, atol=1e-10):
            raise ValidationError('responsibility rows must sum to 1')
        gamma.setflags(write=False)
        object.__setattr__(self, 'gamma', gamma)

    @classmethod
    def one_hot(cls, labels, K):
        labels = np.asarray(labels, dtype=int)
        gamma = np.zeros((labels.size, K))
        gamma[np.arange(labels.size), labels] = 1.0
        return cls(gamma=gamma)

    @property
    def n(self):
        return self.gamma.shape[0]

    @property
    def K(self):
        return self.gamma.shape[1]

    @property
    def effective_sizes(self):
        return self.gamma.sum(axis=0)
