"""
Mesh Service

This module contains the MeshService class that builds the uniform mesh a
density estimate lives on and samples the (optionally weighted) empirical
CDF at the mesh points, together with the finite-difference derivative
estimates the BSHQI coefficients are built from.
"""

import logging

import numpy as np

from app.exceptions import DegenerateSupportError, ValidationError
from app.models.mesh import BinsRule, EcdfGrid, UniformMesh, WeightedSample

logger = logging.getLogger('copmix.mesh')


class MeshService:
    """
    Service class for mesh construction and empirical CDF sampling.

    All methods are pure functions of their inputs.
    """

    @staticmethod
    def bins_count(n, bins_rule=BinsRule.RICE, n_bins=None):
        """
        Number of mesh subintervals N for a sample of size n.

        Args:
            n (int): Sample size
            bins_rule (BinsRule or str): rice (2 * ceil(n^(1/3))), cuberoot
                (ceil(n^(1/3)), at least 2) or explicit
            n_bins (int, optional): Subinterval count for the explicit rule

        Returns:
            int: N
        """
        rule = BinsRule.parse(bins_rule)
        if rule is BinsRule.EXPLICIT:
            if n_bins is None:
                raise ValidationError('explicit bins rule requires a bin count')
            return int(n_bins)
        if n < 1:
            raise ValidationError(f'sample size must be positive, got {n}')
        # tolerance keeps perfect cubes such as 2^15 exact
        root = int(np.ceil(np.cbrt(float(n)) - 1e-9))
        if rule is BinsRule.RICE:
            return max(2, 2 * root)
        return max(2, root)

    @staticmethod
    def build_mesh(values, bins_rule=BinsRule.RICE, padding=0.0, n_bins=None):
        """
        Build the uniform mesh covering the data.

        Args:
            values (array-like): Observations
            bins_rule (BinsRule or str): Rule mapping n to N
            padding (float): Fraction of the data range added on both sides
            n_bins (int, optional): N for the explicit rule

        Returns:
            UniformMesh: Mesh on [min - padding * range, max + padding * range]

        Raises:
            ValidationError: Empty input or negative padding
            DegenerateSupportError: All values identical and padding is zero
        """
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            raise ValidationError('cannot build a mesh from an empty sample')
        if not np.all(np.isfinite(values)):
            raise ValidationError('sample values must be finite')
        if padding < 0:
            raise ValidationError(f'padding must be nonnegative, got {padding}')

        low, high = float(values.min()), float(values.max())
        spread = high - low
        if spread == 0:
            if padding == 0:
                raise DegenerateSupportError()
            spread = 1.0

        N = MeshService.bins_count(values.size, bins_rule, n_bins)
        mesh = UniformMesh(a=low - padding * spread, b=high + padding * spread, N=N)
        logger.debug(
            'Built mesh',
            extra={'structured_data': {'a': mesh.a, 'b': mesh.b, 'N': mesh.N, 'n': int(values.size)}},
        )
        return mesh

    @staticmethod
    def weighted_ecdf(sample, mesh):
        """
        Sample the weighted empirical CDF and its derivative estimates on the mesh.

        F[j] is the weighted fraction of observations <= x_j for j >= 1; F[0]
        is the left limit at a, so observations equal to a fall in the first
        cell and F[N] - F[0] = 1 exactly. Fp uses central differences in the
        interior and one-sided differences at the ends; Fpp uses second
        differences in the interior and is zero at both ends.

        Args:
            sample (WeightedSample): Observations and weights
            mesh (UniformMesh): Mesh containing every observation

        Returns:
            EcdfGrid: F, Fp and Fpp at the N + 1 mesh points

        Raises:
            ValidationError: An observation lies outside [a, b]
        """
        if not isinstance(sample, WeightedSample):
            sample = WeightedSample.unweighted(sample)

        outside = np.flatnonzero(~mesh.contains(sample.values))
        if outside.size:
            index = int(outside[0])
            raise ValidationError(
                f'observation {index} ({sample.values[index]!r}) lies outside '
                f'[{mesh.a!r}, {mesh.b!r}]'
            )

        order = np.argsort(sample.values, kind='stable')
        sorted_values = sample.values[order]
        cumulative = np.concatenate(([0.0], np.cumsum(sample.weights[order])))
        total = cumulative[-1]

        counts = np.searchsorted(sorted_values, mesh.points, side='right')
        F = cumulative[counts] / total
        F[0] = 0.0
        F[-1] = 1.0

        h = mesh.h
        Fp = np.empty_like(F)
        Fp[1:-1] = (F[2:] - F[:-2]) / (2.0 * h)
        Fp[0] = (F[1] - F[0]) / h
        Fp[-1] = (F[-1] - F[-2]) / h

        Fpp = np.zeros_like(F)
        Fpp[1:-1] = (F[2:] - 2.0 * F[1:-1] + F[:-2]) / h ** 2

        return EcdfGrid(mesh=mesh, F=F, Fp=Fp, Fpp=Fpp)
