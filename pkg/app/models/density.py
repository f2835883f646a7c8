"""
Density Models

This module contains the fitted univariate density models: the degree-2
B-spline basis on the extended knot vector with coincident boundary knots,
the BSHQI density expressed in that basis, and the uniform-kernel baseline.
Both estimators expose vectorized ``pdf`` and ``cdf`` so they can serve as
mixture marginals interchangeably.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import BSpline

from app.exceptions import ValidationError
from app.models.base import SerializableModel
from app.models.mesh import UniformMesh

DEGREE = 2


def _shaped(x, values):
    """Return a float for scalar input and an array otherwise."""
    if np.ndim(x) == 0:
        return float(values.reshape(-1)[0])
    return values


@dataclass(frozen=True, eq=False)
class BSplineBasis2(SerializableModel):
    """Quadratic B-splines B_{-2}..B_{N-1} on a uniform mesh with coincident end knots."""

    mesh: UniformMesh

    @cached_property
    def extended_knots(self):
        """tau_{-2}..tau_{N+2}: a, a, a, x_1, ..., x_{N-1}, b, b, b."""
        points = self.mesh.points
        return np.concatenate(([points[0]] * DEGREE, points, [points[-1]] * DEGREE))

    @property
    def size(self):
        return self.mesh.N + DEGREE

    @cached_property
    def support_lengths(self):
        """tau_{j+3} - tau_j for j = -2..N-1."""
        knots = self.extended_knots
        return knots[DEGREE + 1:] - knots[:-(DEGREE + 1)]

    @cached_property
    def integrals(self):
        """Exact integrals (tau_{j+3} - tau_j) / 3 of every basis function."""
        return self.support_lengths / (DEGREE + 1)

    def design_matrix(self, x):
        """
        Evaluate every basis function at the points x (all inside [a, b]).

        Returns:
            np.ndarray: Dense (len(x), N + 2) matrix of B_j(x_i)
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        matrix = BSpline.design_matrix(x, self.extended_knots, DEGREE)
        return matrix.toarray()

    def spline(self, coefficients):
        return BSpline(self.extended_knots, np.asarray(coefficients, dtype=float), DEGREE)

    @classmethod
    def from_dict(cls, data):
        return cls(mesh=UniformMesh.from_dict(data['mesh']))


@dataclass(frozen=True, eq=False)
class BshqiDensity(SerializableModel):
    """
    BSHQI density estimate f(x) = sum_j lambda_j B_j(x) on [a, b], zero outside.

    The coefficient vector holds lambda_{-2}..lambda_{N-1}.
    """

    basis: BSplineBasis2
    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float).ravel()
        if lam.shape != (self.basis.size,):
            raise ValidationError(
                f'expected N + 2 = {self.basis.size} coefficients, got {lam.size}'
            )
        if not np.all(np.isfinite(lam)) or np.any(lam < 0):
            raise ValidationError('BSHQI coefficients must be finite and nonnegative')
        lam.setflags(write=False)
        object.__setattr__(self, 'lam', lam)

    @property
    def mesh(self):
        return self.basis.mesh

    @cached_property
    def _spline(self):
        return self.basis.spline(self.lam)

    @cached_property
    def _antiderivative(self):
        return self._spline.antiderivative()

    @cached_property
    def _mass_at_a(self):
        return float(self._antiderivative(self.mesh.a))

    def mass(self):
        """Exact integral of the density using the B-spline integral weights."""
        return float(np.dot(self.lam, self.basis.integrals))

    def pdf(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x_arr)
        inside = self.mesh.contains(x_arr)
        if np.any(inside):
            out[inside] = np.maximum(self._spline(x_arr[inside]), 0.0)
        return _shaped(x, out)

    def cdf(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.where(x_arr >= self.mesh.b, 1.0, 0.0)
        inside = (x_arr > self.mesh.a) & (x_arr < self.mesh.b)
        if np.any(inside):
            values = self._antiderivative(x_arr[inside]) - self._mass_at_a
            out[inside] = np.clip(values, 0.0, 1.0)
        return _shaped(x, out)

    def to_dict(self):
        return {
            'a': self.mesh.a,
            'b': self.mesh.b,
            'N': self.mesh.N,
            'lambda': self.lam.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        mesh = UniformMesh(a=data['a'], b=data['b'], N=data['N'])
        return cls(basis=BSplineBasis2(mesh=mesh), lam=data['lambda'])


@dataclass(frozen=True, eq=False)
class KernelDensity(SerializableModel):
    """
    Weighted uniform-kernel ("naive") density estimate with bandwidth h.

    f(x) = sum_i w_i K((X_i - x) / h) / (W h) with K the indicator of [-1/2, 1/2].
    """

    values: np.ndarray
    weights: np.ndarray
    h: float

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        weights = np.array(self.weights, dtype=float).ravel()
        if values.size == 0 or values.shape != weights.shape:
            raise ValidationError('kernel estimator needs matching non-empty values and weights')
        if not float(self.h) > 0:
            raise ValidationError(f'bandwidth must be positive, got {self.h}')
        order = np.argsort(values, kind='stable')
        values, weights = values[order], weights[order]
        values.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'h', float(self.h))

    @cached_property
    def _cumulative(self):
        weight_sum = np.concatenate(([0.0], np.cumsum(self.weights)))
        moment_sum = np.concatenate(([0.0], np.cumsum(self.weights * self.values)))
        return weight_sum, moment_sum

    @property
    def total_weight(self):
        return float(self._cumulative[0][-1])

    def _partial_integral(self, t):
        """G(t) = sum_i w_i (t - X_i)_+, the integral of the unnormalized ECDF."""
        weight_sum, moment_sum = self._cumulative
        index = np.searchsorted(self.values, t, side='right')
        return t * weight_sum[index] - moment_sum[index]

    def pdf(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        weight_sum, _ = self._cumulative
        half = self.h / 2.0
        upper = np.searchsorted(self.values, x_arr + half, side='right')
        lower = np.searchsorted(self.values, x_arr - half, side='left')
        out = (weight_sum[upper] - weight_sum[lower]) / (self.total_weight * self.h)
        return _shaped(x, out)

    def cdf(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        half = self.h / 2.0
        span = self._partial_integral(x_arr + half) - self._partial_integral(x_arr - half)
        out = np.clip(span / (self.h * self.total_weight), 0.0, 1.0)
        return _shaped(x, out)

    def to_dict(self):
        return {
            'kind': 'kernel',
            'h': self.h,
            'values': self.values.tolist(),
            'weights': self.weights.tolist(),
        }


def marginal_from_dict(data):
    """Rebuild a BSHQI or kernel marginal from its serialized form."""
    if data.get('kind') == 'kernel':
        return KernelDensity.from_dict(data)
    return BshqiDensity.from_dict(data)
