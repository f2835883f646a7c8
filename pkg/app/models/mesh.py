"""
Mesh Models

This module contains the knot scaffold of the spline estimator: the uniform
mesh on [a, b], a (possibly weighted) univariate sample and the empirical CDF
sampled at the mesh points together with its finite-difference derivatives.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

from app.exceptions import ValidationError
from app.models.base import SerializableModel


class BinsRule(str, Enum):
    """Rules mapping a sample size to a number of mesh subintervals."""

    RICE = 'rice'
    CUBE_ROOT = 'cuberoot'
    EXPLICIT = 'explicit'

    @classmethod
    def parse(cls, value):
        """Accept a BinsRule or its (case-insensitive) name."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower().replace('_', '').replace('-', ''))
        except ValueError:
            raise ValidationError(f"unknown bins rule '{value}'") from None


@dataclass(frozen=True, eq=False)
class UniformMesh(SerializableModel):
    """Uniform mesh a = x_0 < x_1 < ... < x_N = b with step h = (b - a) / N."""

    a: float
    b: float
    N: int

    def __post_init__(self):
        object.__setattr__(self, 'a', float(self.a))
        object.__setattr__(self, 'b', float(self.b))
        object.__setattr__(self, 'N', int(self.N))
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ValidationError('mesh endpoints must be finite')
        if not self.a < self.b:
            raise ValidationError(f'mesh requires a < b, got a={self.a}, b={self.b}')
        if self.N < 2:
            raise ValidationError(f'mesh requires N >= 2 subintervals, got {self.N}')

    @property
    def h(self):
        return (self.b - self.a) / self.N

    @cached_property
    def points(self):
        """Mesh points x_j = a + j h, j = 0..N, with x_N = b exactly."""
        points = self.a + self.h * np.arange(self.N + 1)
        points[-1] = self.b
        return points

    def contains(self, values):
        values = np.asarray(values, dtype=float)
        return (values >= self.a) & (values <= self.b)


@dataclass(frozen=True, eq=False)
class WeightedSample(SerializableModel):
    """Observations X_i with nonnegative weights w_i (all ones when unweighted)."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        weights = np.array(self.weights, dtype=float).ravel()
        if values.size == 0:
            raise ValidationError('sample must contain at least one observation')
        if values.shape != weights.shape:
            raise ValidationError(
                f'values and weights differ in length ({values.size} != {weights.size})'
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError('sample values must be finite')
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValidationError('weights must be finite and nonnegative')
        if not weights.sum() > 0:
            raise ValidationError('sum of weights must be positive')
        values.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def unweighted(cls, values):
        values = np.asarray(values, dtype=float).ravel()
        return cls(values=values, weights=np.ones_like(values))

    @property
    def n(self):
        return self.values.size

    @property
    def total_weight(self):
        return float(self.weights.sum())


@dataclass(frozen=True, eq=False)
class EcdfGrid(SerializableModel):
    """Empirical CDF F_h(x_j) and its finite-difference derivatives on a mesh."""

    mesh: UniformMesh
    F: np.ndarray
    Fp: np.ndarray
    Fpp: np.ndarray

    def __post_init__(self):
        expected = self.mesh.N + 1
        for name in ('F', 'Fp', 'Fpp'):
            array = np.array(getattr(self, name), dtype=float)
            if array.shape != (expected,):
                raise ValidationError(
                    f'{name} must have N + 1 = {expected} entries, got {array.shape}'
                )
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @classmethod
    def from_dict(cls, data):
        return cls(
            mesh=UniformMesh.from_dict(data['mesh']),
            F=data['F'],
            Fp=data['Fp'],
            Fpp=data['Fpp'],
        )
