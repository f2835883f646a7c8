"""
Goodness-of-Fit Service

This module contains the GofService class: one-sample Kolmogorov-Smirnov and
Cramer-von Mises tests of a fitted CDF, integrated squared-error metrics
against a known density, and the repeated fit/test experiment that produces
a GofReport.
"""

import logging
import time

import numpy as np
from scipy import integrate, stats

from app.exceptions import ValidationError
from app.middleware.logging import log_performance, log_run_event
from app.models.mesh import BinsRule
from app.models.reports import GofReport
from app.models.run_config import MarginalMethod
from app.services.density_service import DensityService

logger = logging.getLogger('copmix.gof')


def _as_samples(samples):
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValidationError('goodness-of-fit tests need at least one sample')
    return samples


class GofService:
    """
    Service class for density goodness-of-fit testing and error metrics.

    Both tests use asymptotic null distributions.
    """

    @staticmethod
    def ks_test(samples, cdf):
        """
        Kolmogorov-Smirnov test of samples against a continuous CDF.

        Args:
            samples (array-like): Observations
            cdf (callable): Vectorized CDF

        Returns:
            tuple: (statistic, p-value) with the p-value from the asymptotic
                Kolmogorov distribution of sqrt(n) D_n
        """
        samples = _as_samples(samples)
        statistic = float(stats.kstest(samples, cdf, method='asymp').statistic)
        return statistic, GofService.ks_pvalue(statistic, samples.size)

    @staticmethod
    def ks_pvalue(statistic, n):
        """Asymptotic p-value of a KS statistic for sample size n."""
        return float(np.clip(stats.kstwobign.sf(statistic * np.sqrt(n)), 0.0, 1.0))

    @staticmethod
    def cvm_test(samples, cdf):
        """
        Cramer-von Mises test of samples against a continuous CDF.

        The statistic is 1 / (12 n) + sum_i (cdf(X_(i)) - (2i - 1) / (2n))^2.

        Returns:
            tuple: (statistic, p-value)
        """
        result = stats.cramervonmises(_as_samples(samples), cdf)
        return float(result.statistic), float(np.clip(result.pvalue, 0.0, 1.0))

    @staticmethod
    def integrated_errors(f_hat, f_true, support, grid_points=2048):
        """
        Integrated and root-mean squared difference of two functions on an interval.

        Returns:
            tuple: (ISE by composite trapezoid, RSE over the grid)
        """
        low, high = support
        if not high > low:
            raise ValidationError(f'support must be a nonempty interval, got {support}')
        x = np.linspace(low, high, int(grid_points))
        squared = (np.asarray(f_hat(x), dtype=float) - np.asarray(f_true(x), dtype=float)) ** 2
        return float(integrate.trapezoid(squared, x)), float(np.sqrt(squared.mean()))

    @staticmethod
    def density_errors(f_hat, f_true, support, reps=1, sampler=None, grid_points=2048):
        """
        AMISE and RMSE of a density estimate, averaged over repetitions.

        Args:
            f_hat (callable): The estimate; when ``sampler`` is given it is a
                factory called with each repetition's sample and returning
                the estimate for that repetition
            f_true (callable): True density
            support (tuple): Integration interval (low, high)
            reps (int): Number of repetitions
            sampler (callable, optional): ``sampler(rep)`` returns the sample
                of repetition ``rep``
            grid_points (int): Trapezoid grid size

        Returns:
            tuple: (amise, rmse)
        """
        if reps < 1:
            raise ValidationError(f'reps must be at least 1, got {reps}')
        ise, rse = [], []
        for rep in range(reps):
            estimate = f_hat if sampler is None else f_hat(sampler(rep))
            rep_ise, rep_rse = GofService.integrated_errors(estimate, f_true, support, grid_points)
            ise.append(rep_ise)
            rse.append(rep_rse)
        return float(np.mean(ise)), float(np.mean(rse))

    @staticmethod
    @log_performance(threshold_ms=30000)
    def run_experiment(truth, n, reps=20, seed=0, bins_rule=BinsRule.RICE, n_bins=None,
                       padding=0.0, method=MarginalMethod.BSHQI, grid_points=2048):
        """
        Repeatedly fit a density to draws from a known distribution and test it.

        Each repetition draws a fitting sample, times the fit, then tests the
        fitted CDF against a fresh sample of the same size and integrates the
        squared density and CDF errors over the fitted support widened by 10%.

        Args:
            truth (UnivariateSpec): Ground-truth distribution
            n (int): Sample size per repetition
            reps (int): Number of repetitions
            seed (int): Seed of the repetition seed sequence
            bins_rule (BinsRule or str): Mesh rule
            n_bins (int, optional): N for the explicit rule
            padding (float): Mesh padding fraction
            method (MarginalMethod or str): bshqi or kernel
            grid_points (int): Trapezoid grid size

        Returns:
            GofReport: Averages over the repetitions
        """
        if reps < 1:
            raise ValidationError(f'reps must be at least 1, got {reps}')
        method = MarginalMethod.parse(method)
        children = np.random.SeedSequence(seed).spawn(reps)

        rows = []
        for rep, child in enumerate(children):
            rng = np.random.default_rng(child)
            data = truth.sample(n, rng)

            start = time.perf_counter()
            model = GofService._fit(data, method, bins_rule, n_bins, padding)
            elapsed_ms = (time.perf_counter() - start) * 1000.0

            rows.append(GofService._score(model, data, truth, truth.sample(n, rng), grid_points) + (elapsed_ms,))
            logger.debug(
                'Goodness-of-fit repetition finished',
                extra={'structured_data': {'rep': rep, 'ks_statistic': rows[-1][0], 'amise': rows[-1][4]}},
            )

        log_run_event('gof_experiment', truth=truth.describe(), n=int(n), reps=reps, method=method.value)
        return GofService._summarize(rows)

    @staticmethod
    def assess(model, data, truth, reps=20, seed=0, bins_rule=BinsRule.RICE, n_bins=None,
               padding=0.0, method=MarginalMethod.BSHQI, grid_points=2048):
        """
        Test one fitted density against fresh samples from a known distribution.

        Each repetition tests ``model`` against a new truth sample of the
        input size and times a refit of ``data`` with the same settings.

        Returns:
            GofReport: Averages over the repetitions
        """
        if reps < 1:
            raise ValidationError(f'reps must be at least 1, got {reps}')
        method = MarginalMethod.parse(method)
        data = np.asarray(data, dtype=float).ravel()
        rows = []
        for child in np.random.SeedSequence(seed).spawn(reps):
            rng = np.random.default_rng(child)
            start = time.perf_counter()
            GofService._fit(data, method, bins_rule, n_bins, padding)
            elapsed_ms = (time.perf_counter() - start) * 1000.0
            rows.append(GofService._score(model, data, truth, truth.sample(data.size, rng), grid_points) + (elapsed_ms,))
        return GofService._summarize(rows)

    @staticmethod
    def _fit(data, method, bins_rule, n_bins, padding):
        if method is MarginalMethod.KERNEL:
            return DensityService.fit_kernel(data, bins_rule=bins_rule, padding=padding, n_bins=n_bins)
        return DensityService.fit(data, bins_rule=bins_rule, padding=padding, n_bins=n_bins)

    @staticmethod
    def _score(model, data, truth, fresh, grid_points):
        """KS, CvM, density and CDF errors of one repetition."""
        ks = GofService.ks_test(fresh, model.cdf)
        cvm = GofService.cvm_test(fresh, model.cdf)
        low, high = float(np.min(data)), float(np.max(data))
        margin = 0.1 * (high - low)
        support = (low - margin, high + margin)
        pdf_errors = GofService.integrated_errors(model.pdf, truth.pdf, support, grid_points)
        cdf_errors = GofService.integrated_errors(model.cdf, truth.cdf, support, grid_points)
        return (*ks, *cvm, *pdf_errors, *cdf_errors)

    @staticmethod
    def _summarize(rows):
        table = np.array(rows)
        means = table.mean(axis=0)
        return GofReport(
            ks_statistic=means[0],
            ks_pvalue=means[1],
            cvm_statistic=means[2],
            cvm_pvalue=means[3],
            amise=means[4],
            rmse=means[5],
            cdf_amise=float(means[6]),
            cdf_rmse=float(means[7]),
            mean_time_ms=means[8],
            std_time_ms=float(table[:, 8].std()),
            repetitions=len(rows),
        )
