"""
Density Service

This module contains the DensityService class implementing the BSHQI
estimator: coefficient construction from an empirical CDF grid (Hermite and
simplified formulations), fitting from a sample, pointwise evaluation, and
the uniform-kernel baseline used as an oracle and as an alternative marginal.
"""

import logging

import numpy as np

from app.exceptions import ValidationError
from app.models.density import BSplineBasis2, BshqiDensity, KernelDensity
from app.models.mesh import BinsRule, WeightedSample
from app.models.run_config import MarginalMethod
from app.services.mesh_service import MeshService

logger = logging.getLogger('copmix.density')


def _check_grid(grid):
    N = grid.mesh.N
    if N < 2:
        raise ValidationError(f'BSHQI needs N >= 2 subintervals, got {N}')
    return N


class DensityService:
    """
    Service class for BSHQI density estimation.

    Coefficients are indexed lambda_{-2}..lambda_{N-1}, stored at positions 0..N+1.
    """

    @staticmethod
    def coefficients_hermite(grid):
        """
        BSHQI coefficients from F', F'' at the mesh points (Hermite form).

        Args:
            grid (EcdfGrid): Empirical CDF grid

        Returns:
            np.ndarray: N + 2 coefficients
        """
        _check_grid(grid)
        h = grid.mesh.h
        Fp, Fpp = grid.Fp, grid.Fpp
        interior = 0.5 * (Fp[:-1] + Fp[1:]) - (h / 4.0) * (Fpp[1:] - Fpp[:-1])
        return np.concatenate(([Fp[0]], interior, [Fp[-1]]))

    @staticmethod
    def coefficients_simplified(grid):
        """
        BSHQI coefficients as scaled ECDF increments, lambda_j = (F[j+2] - F[j+1]) / h.

        Args:
            grid (EcdfGrid): Empirical CDF grid

        Returns:
            np.ndarray: N + 2 nonnegative coefficients with duplicated ends
        """
        _check_grid(grid)
        increments = np.diff(grid.F) / grid.mesh.h
        return np.concatenate(([increments[0]], increments, [increments[-1]]))

    @staticmethod
    def from_grid(grid):
        basis = BSplineBasis2(mesh=grid.mesh)
        return BshqiDensity(basis=basis, lam=DensityService.coefficients_simplified(grid))

    @staticmethod
    def fit(sample, bins_rule=BinsRule.RICE, padding=0.0, n_bins=None, mesh=None):
        """
        Fit a BSHQI density to a (weighted) sample.

        Args:
            sample (WeightedSample or array-like): Observations
            bins_rule (BinsRule or str): Rule used when no mesh is given
            padding (float): Padding fraction used when no mesh is given
            n_bins (int, optional): N for the explicit rule
            mesh (UniformMesh, optional): Mesh to use instead of building one

        Returns:
            BshqiDensity: Fitted density
        """
        if not isinstance(sample, WeightedSample):
            sample = WeightedSample.unweighted(sample)
        if mesh is None:
            mesh = MeshService.build_mesh(sample.values, bins_rule, padding, n_bins)
        grid = MeshService.weighted_ecdf(sample, mesh)
        return DensityService.from_grid(grid)

    @staticmethod
    def fit_kernel(sample, h=None, bins_rule=BinsRule.RICE, padding=0.0, n_bins=None, mesh=None):
        """
        Fit the uniform-kernel baseline; the bandwidth defaults to the mesh step.

        Returns:
            KernelDensity: Fitted baseline estimator
        """
        if not isinstance(sample, WeightedSample):
            sample = WeightedSample.unweighted(sample)
        if h is None:
            if mesh is None:
                mesh = MeshService.build_mesh(sample.values, bins_rule, padding, n_bins)
            h = mesh.h
        return KernelDensity(values=sample.values, weights=sample.weights, h=h)

    @staticmethod
    def fit_marginal(sample, mesh, method=MarginalMethod.BSHQI):
        """Fit one mixture marginal on a shared mesh with the configured method."""
        if MarginalMethod.parse(method) is MarginalMethod.KERNEL:
            return DensityService.fit_kernel(sample, mesh=mesh)
        return DensityService.fit(sample, mesh=mesh)

    @staticmethod
    def eval_pdf(model, x):
        """Density estimate at x; zero outside the support."""
        return model.pdf(x)

    @staticmethod
    def eval_cdf(model, x):
        """Closed-form integral of the density from a to x."""
        return model.cdf(x)

    @staticmethod
    def naive_kernel_pdf(sample, h, x):
        """
        Uniform-kernel estimate (1 / (W h)) sum_i w_i K((X_i - x) / h), K = 1 on [-1/2, 1/2].

        Args:
            sample (WeightedSample or array-like): Observations
            h (float): Bandwidth
            x (float or array-like): Evaluation points

        Returns:
            float or np.ndarray: Kernel estimate
        """
        if not h > 0:
            raise ValidationError(f'bandwidth must be positive, got {h}')
        if not isinstance(sample, WeightedSample):
            sample = WeightedSample.unweighted(sample)
        return KernelDensity(values=sample.values, weights=sample.weights, h=h).pdf(x)

    @staticmethod
    def optimal_bandwidth(S0, S1, n):
        """
        Bandwidth minimizing h^2 S1^2 + S0 / (n h): (S0 / (2 n S1^2))^(1/3).

        Args:
            S0 (float): Bound on the density
            S1 (float): Bound on its derivative
            n (int): Sample size

        Returns:
            float: Optimal bandwidth
        """
        if not (S0 > 0 and S1 > 0):
            raise ValidationError('bandwidth bounds S0 and S1 must be positive')
        if n < 1:
            raise ValidationError(f'sample size must be positive, got {n}')
        return float(np.cbrt(S0 / (2.0 * n * S1 ** 2)))

    @staticmethod
    def plot_data(model, points=512):
        """
        Grid dump of a fitted density for plotting.

        Returns:
            tuple: (x, pdf, cdf) arrays on a uniform grid over the support
        """
        if isinstance(model, BshqiDensity):
            low, high = model.mesh.a, model.mesh.b
        else:
            low = model.values[0] - model.h / 2.0
            high = model.values[-1] + model.h / 2.0
        x = np.linspace(low, high, int(points))
        return x, np.asarray(model.pdf(x)), np.asarray(model.cdf(x))
