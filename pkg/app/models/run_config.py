"""
Run Configuration Model

This module contains RunConfig, the validated set of knobs a density or
clustering run uses. It is assembled from the Flask configuration (class
defaults plus an optional JSON file) with command-line flags on top.
"""

from dataclasses import dataclass, field, replace
from enum import Enum

from app.config import Config
from app.exceptions import ValidationError
from app.models.base import SerializableModel
from app.models.copula import CopulaFamily
from app.models.mesh import BinsRule


class InitMethod(str, Enum):
    RANDOM = 'random'
    KMEANS = 'kmeans'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower().replace('-', ''))
        except ValueError:
            raise ValidationError(f"unknown init method '{value}'") from None


class MarginalMethod(str, Enum):
    BSHQI = 'bshqi'
    KERNEL = 'kernel'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValidationError(f"unknown marginal method '{value}'") from None


# Flask configuration key for every RunConfig field
CONFIG_KEYS = {
    'seed': 'SEED',
    'bins_rule': 'BINS_RULE',
    'n_bins': 'N_BINS',
    'padding': 'ECDF_PADDING',
    'families': 'COPULA_FAMILIES',
    'K': 'EM_K',
    'init': 'EM_INIT',
    'tol': 'EM_TOL',
    'max_iter': 'EM_MAX_ITER',
    'restarts': 'EM_RESTARTS',
    'rescue_attempts': 'EM_RESCUE_ATTEMPTS',
    'marginal_method': 'MARGINAL_METHOD',
    'eps': 'PSEUDO_OBS_EPS',
    'density_floor': 'DENSITY_FLOOR',
    'bounds': 'COPULA_BOUNDS',
    'fd_step': 'FD_STEP',
}


@dataclass(frozen=True)
class RunConfig(SerializableModel):
    """Aggregated estimation and clustering settings."""

    seed: int = 0
    bins_rule: BinsRule = BinsRule.RICE
    n_bins: int = None
    padding: float = 0.0
    families: tuple = tuple(CopulaFamily)
    K: int = 2
    init: InitMethod = InitMethod.RANDOM
    tol: float = 1e-4
    max_iter: int = 200
    restarts: int = 5
    rescue_attempts: int = 3
    marginal_method: MarginalMethod = MarginalMethod.BSHQI
    eps: float = 1e-10
    density_floor: float = 1e-300
    bounds: dict = field(default_factory=lambda: dict(Config.COPULA_BOUNDS))
    fd_step: float = 1e-6

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, 'bins_rule', BinsRule.parse(self.bins_rule))
        set_(self, 'families', CopulaFamily.parse_many(self.families))
        set_(self, 'init', InitMethod.parse(self.init))
        set_(self, 'marginal_method', MarginalMethod.parse(self.marginal_method))
        set_(self, 'seed', int(self.seed))
        set_(self, 'bounds', {
            CopulaFamily.parse(name).value: (float(low), float(high))
            for name, (low, high) in dict(self.bounds).items()
        })

        if not self.tol > 0:
            raise ValidationError(f'tol must be positive, got {self.tol}')
        if int(self.restarts) < 1:
            raise ValidationError(f'restarts must be at least 1, got {self.restarts}')
        if int(self.K) < 1:
            raise ValidationError(f'K must be at least 1, got {self.K}')
        if int(self.max_iter) < 1:
            raise ValidationError(f'max_iter must be at least 1, got {self.max_iter}')
        if int(self.rescue_attempts) < 0:
            raise ValidationError('rescue_attempts must be nonnegative')
        if self.padding < 0:
            raise ValidationError(f'padding must be nonnegative, got {self.padding}')
        if not 0 < self.eps < 0.5:
            raise ValidationError(f'eps must lie in (0, 0.5), got {self.eps}')
        if self.bins_rule is BinsRule.EXPLICIT and self.n_bins is None:
            raise ValidationError('explicit bins rule requires n_bins')
        for name in ('K', 'max_iter', 'restarts', 'rescue_attempts'):
            set_(self, name, int(getattr(self, name)))
        if self.n_bins is not None:
            set_(self, 'n_bins', int(self.n_bins))

    @classmethod
    def from_mapping(cls, config, **overrides):
        """
        Build a RunConfig from a Flask config mapping.

        Args:
            config (Mapping): Upper-case configuration keys (``app.config``)
            **overrides: Field values that win over the mapping (CLI flags);
                ``None`` means "not given"

        Returns:
            RunConfig: Validated configuration
        """
        values = {
            name: config[key]
            for name, key in CONFIG_KEYS.items()
            if key in config and config[key] is not None
        }
        values.update({name: value for name, value in overrides.items() if value is not None})
        return cls(**values)

    def with_overrides(self, **overrides):
        return replace(self, **{name: value for name, value in overrides.items() if value is not None})

    def bounds_for(self, family):
        return self.bounds[CopulaFamily.parse(family).value]
