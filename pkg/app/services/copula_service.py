"""
Copula Service

This module contains the CopulaService class for the Gaussian, Clayton,
Gumbel and Frank copulas in D >= 2 dimensions: log-densities, CDFs,
Marshall-Olkin sampling, Kendall's tau conversions, weighted maximum
likelihood fitting under parameter bounds and best-family selection.

Archimedean densities are evaluated in log space. The D-th derivative of the
Gumbel generator uses the polynomial recurrence of its derivatives, the Frank
one the polylogarithm of negative order.
"""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize, special, stats

from app.config import Config
from app.exceptions import CopulaFitError, ValidationError
from app.models.copula import MIN_EIGENVALUE, CopulaFamily, CopulaFit, CopulaSpec, PseudoObservations

logger = logging.getLogger('copmix.copula')

SAMPLE_CLAMP = 1e-15
PENALTY = 1e10
START_GRID_POINTS = 25
MIN_TAU_ROWS = 10


def normal_quantile(u):
    """Standard normal quantile."""
    return special.ndtri(u)


def _as_matrix(u):
    U = np.asarray(u, dtype=float)
    single = U.ndim == 1
    U = np.atleast_2d(U)
    if U.ndim != 2:
        raise ValidationError(f'expected a row or an n x D matrix, got shape {np.shape(u)}')
    return U, single


@lru_cache(maxsize=64)
def _log_polylog_coefficients(order):
    """log(k! S(order + 1, k + 1)) for k = 0..order, S the Stirling numbers of the second kind."""
    size = order + 2
    stirling = [[0] * size for _ in range(size)]
    stirling[0][0] = 1
    for n in range(1, size):
        for k in range(1, n + 1):
            stirling[n][k] = k * stirling[n - 1][k] + stirling[n - 1][k - 1]
    return np.array([
        math.lgamma(k + 1) + math.log(stirling[order + 1][k + 1]) for k in range(order + 1)
    ])


def _gumbel_coefficients(dim, alpha):
    """Coefficients a_{D,k}, k = 0..D, of (-1)^D psi^(D)(s) = psi(s) s^-D sum_k a_k x^k."""
    coefficients = np.zeros(dim + 1)
    coefficients[0] = 1.0
    for n in range(dim):
        updated = np.zeros(dim + 1)
        k = np.arange(1, dim + 1)
        updated[1:] = alpha * coefficients[:-1] + (n - alpha * k) * coefficients[1:]
        coefficients = updated
    return coefficients


def _gaussian_logpdf(P, U):
    Y = normal_quantile(U)
    _, logdet = np.linalg.slogdet(P)
    precision = np.linalg.inv(P) - np.eye(P.shape[0])
    quadratic = np.einsum('ij,jk,ik->i', Y, precision, Y)
    return -0.5 * logdet - 0.5 * quadratic


def _clayton_logpdf(theta, U):
    dim = U.shape[1]
    minus_log_u = -np.log(U)
    with np.errstate(over='ignore', invalid='ignore'):
        direct = np.log1p(np.expm1(theta * minus_log_u).sum(axis=1))
        exponent = theta * minus_log_u
        total = special.logsumexp(exponent, axis=1)
        stable = total + np.log1p(-(dim - 1) * np.exp(-total))
    log_sum = np.where(np.isfinite(direct), direct, stable)
    normalizer = np.sum(np.log1p(np.arange(dim) * theta))
    return (
        normalizer
        + (theta + 1.0) * minus_log_u.sum(axis=1)
        - (1.0 / theta + dim) * log_sum
    )


def _gumbel_logpdf(theta, U):
    dim = U.shape[1]
    alpha = 1.0 / theta
    log_minus_log_u = np.log(-np.log(U))
    log_s = special.logsumexp(theta * log_minus_log_u, axis=1)
    log_x = alpha * log_s

    coefficients = _gumbel_coefficients(dim, alpha)
    k = np.arange(dim + 1)
    positive = coefficients > 0
    log_q = special.logsumexp(
        np.log(coefficients[positive])[None, :] + k[positive][None, :] * log_x[:, None],
        axis=1,
    )
    jacobian = np.sum(np.log(theta) + (theta - 1.0) * log_minus_log_u - np.log(U), axis=1)
    return -np.exp(log_x) - dim * log_s + log_q + jacobian


def _frank_generator_inverse(theta, U):
    """-log(expm1(-theta u) / expm1(-theta)) with accurate evaluation near both ends."""
    denominator = np.expm1(-theta)
    ratio = np.expm1(-theta * U) / denominator
    complement = np.exp(-theta * U) * np.expm1(-theta * (1.0 - U)) / denominator
    with np.errstate(divide='ignore'):
        return np.where(ratio < 0.5, -np.log(ratio), -np.log1p(-complement))


def _frank_bivariate_logpdf(theta, U):
    g1 = np.expm1(-theta)
    gu = np.expm1(-theta * U[:, 0])
    gv = np.expm1(-theta * U[:, 1])
    return (
        np.log(-theta * g1)
        - theta * (U[:, 0] + U[:, 1])
        - 2.0 * np.log(np.abs(g1 + gu * gv))
    )


def _frank_logpdf(theta, U):
    dim = U.shape[1]
    if theta < 0:
        return _frank_bivariate_logpdf(theta, U)
    s = _frank_generator_inverse(theta, U).sum(axis=1)
    log_p = np.log(-np.expm1(-theta))
    log_z = log_p - s
    with np.errstate(divide='ignore'):
        log_w = log_z - np.log(-np.expm1(log_z))
    k = np.arange(dim)
    log_li = special.logsumexp(
        _log_polylog_coefficients(dim - 1)[None, :] + (k + 1)[None, :] * log_w[:, None],
        axis=1,
    )
    jacobian = np.sum(np.log(theta) - np.log(np.expm1(theta * U)), axis=1)
    return -np.log(theta) + log_li + jacobian


_LOGPDF = {
    CopulaFamily.CLAYTON: _clayton_logpdf,
    CopulaFamily.GUMBEL: _gumbel_logpdf,
    CopulaFamily.FRANK: _frank_logpdf,
}


class CopulaService:
    """
    Service class for copula densities, sampling and estimation.

    Densities and CDFs accept a single row (returning a float) or an n x D
    matrix (returning a vector).
    """

    @staticmethod
    def log_density(spec, u):
        """
        Log copula density log c(u; omega).

        Args:
            spec (CopulaSpec): Family and parameters
            u (array-like): Row of D values or n x D matrix, strictly inside (0, 1)

        Returns:
            float or np.ndarray: Log density

        Raises:
            ValidationError: A coordinate on or outside the unit interval
                boundary, or parameters invalid for the dimension
        """
        U, single = _as_matrix(u)
        if not np.all((U > 0) & (U < 1)):
            raise ValidationError('copula arguments must lie strictly inside (0, 1); clamp them first')
        spec.check_dim(U.shape[1])

        if spec.family is CopulaFamily.GAUSSIAN:
            values = _gaussian_logpdf(spec.P, U)
        else:
            values = _LOGPDF[spec.family](spec.theta, U)
        return float(values[0]) if single else values

    @staticmethod
    def cdf(spec, u):
        """
        Copula CDF C(u; omega).

        Args:
            spec (CopulaSpec): Family and parameters
            u (array-like): Row or n x D matrix in [0, 1]

        Returns:
            float or np.ndarray: CDF values
        """
        U, single = _as_matrix(u)
        U = np.clip(U, 0.0, 1.0)
        spec.check_dim(U.shape[1])
        theta = spec.theta

        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            if spec.family is CopulaFamily.GAUSSIAN:
                mvn = stats.multivariate_normal(mean=np.zeros(spec.dim), cov=spec.P)
                values = np.atleast_1d(mvn.cdf(normal_quantile(U)))
            elif spec.family is CopulaFamily.CLAYTON:
                values = (1.0 + np.expm1(-theta * np.log(U)).sum(axis=1)) ** (-1.0 / theta)
            elif spec.family is CopulaFamily.GUMBEL:
                values = np.exp(-np.sum((-np.log(U)) ** theta, axis=1) ** (1.0 / theta))
            else:
                dim = U.shape[1]
                product = np.prod(np.expm1(-theta * U), axis=1) / np.expm1(-theta) ** (dim - 1)
                values = -np.log1p(product) / theta

        values = np.where(np.any(U == 0, axis=1), 0.0, np.nan_to_num(values, nan=0.0))
        values = np.clip(values, 0.0, 1.0)
        return float(values[0]) if single else values

    @staticmethod
    def theta_to_tau(family, theta):
        """Kendall's tau of an Archimedean copula."""
        family = CopulaFamily.parse(family)
        if family is CopulaFamily.CLAYTON:
            return theta / (theta + 2.0)
        if family is CopulaFamily.GUMBEL:
            return 1.0 - 1.0 / theta
        if family is CopulaFamily.FRANK:
            if theta == 0:
                return 0.0
            debye, _ = integrate.quad(lambda t: t / np.expm1(t) if t != 0 else 1.0, 0.0, theta)
            return 1.0 - 4.0 / theta * (1.0 - debye / theta)
        raise ValidationError('tau conversion is defined for archimedean families only')

    @staticmethod
    def tau_to_theta(family, tau):
        """Inverse of ``theta_to_tau``; returns nan when tau has no counterpart."""
        family = CopulaFamily.parse(family)
        if not np.isfinite(tau) or not -1 < tau < 1:
            return float('nan')
        if family is CopulaFamily.CLAYTON:
            return 2.0 * tau / (1.0 - tau)
        if family is CopulaFamily.GUMBEL:
            return 1.0 / (1.0 - tau)
        if family is CopulaFamily.FRANK:
            if tau == 0:
                return 0.0
            target = abs(tau)
            upper = 1.0
            while CopulaService.theta_to_tau(family, upper) < target and upper < 1e4:
                upper *= 2.0
            if CopulaService.theta_to_tau(family, upper) < target:
                return math.copysign(upper, tau)
            root = optimize.brentq(
                lambda theta: CopulaService.theta_to_tau(family, theta) - target, 1e-8, upper
            )
            return math.copysign(root, tau)
        raise ValidationError('tau conversion is defined for archimedean families only')

    @staticmethod
    def sample(spec, n, seed=None, dim=None):
        """
        Draw n rows with uniform marginals and the spec's dependence.

        Args:
            spec (CopulaSpec): Family and parameters
            n (int): Number of rows
            seed (int or np.random.Generator, optional): Random source
            dim (int, optional): Dimension for Archimedean specs (default 2)

        Returns:
            PseudoObservations: Sampled rows
        """
        if int(n) < 1:
            raise ValidationError(f'sample size must be positive, got {n}')
        n = int(n)
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        dim = spec.dim or dim or 2
        spec.check_dim(dim)
        theta = spec.theta

        if spec.family is CopulaFamily.GAUSSIAN:
            factor = np.linalg.cholesky(spec.P)
            U = special.ndtr(rng.standard_normal((n, dim)) @ factor.T)
        elif spec.family is CopulaFamily.FRANK and theta < 0:
            first = rng.uniform(size=n)
            level = rng.uniform(size=n)
            shift = level * np.expm1(-theta) / (level + (1.0 - level) * np.exp(-theta * first))
            U = np.column_stack([first, -np.log1p(shift) / theta])
        else:
            frailty = CopulaService._frailty(spec.family, theta, n, rng)
            ratio = rng.exponential(size=(n, dim)) / frailty[:, None]
            if spec.family is CopulaFamily.CLAYTON:
                U = np.exp(-np.log1p(ratio) / theta)
            elif spec.family is CopulaFamily.GUMBEL:
                U = np.exp(-ratio ** (1.0 / theta))
            else:
                p = -np.expm1(-theta)
                U = -np.log1p(-p * np.exp(-ratio)) / theta

        return PseudoObservations.clamped(U, eps=SAMPLE_CLAMP)

    @staticmethod
    def _frailty(family, theta, n, rng):
        """Mixing variable whose Laplace transform is the family's generator."""
        if family is CopulaFamily.CLAYTON:
            return rng.gamma(1.0 / theta, 1.0, size=n)
        if family is CopulaFamily.GUMBEL:
            alpha = 1.0 / theta
            if alpha == 1.0:
                return np.ones(n)
            angle = rng.uniform(0.0, np.pi, size=n)
            waiting = rng.exponential(size=n)
            return (
                np.sin(alpha * angle) / np.sin(angle) ** (1.0 / alpha)
                * (np.sin((1.0 - alpha) * angle) / waiting) ** ((1.0 - alpha) / alpha)
            )
        p = min(-np.expm1(-theta), np.nextafter(1.0, 0.0))
        return rng.logseries(p, size=n).astype(float)

    @staticmethod
    def weighted_loglik(spec, U, weights):
        """Sum of w_i log c(u_i); nan-safe for use inside optimizers."""
        values = CopulaService.log_density(spec, U)
        return float(np.dot(weights, values))

    @staticmethod
    def kendall_tau(U, weights=None):
        """Mean pairwise Kendall's tau, on the high-weight rows when there are enough of them."""
        U = np.asarray(U, dtype=float)
        if weights is not None:
            strong = np.asarray(weights) > 0.5
            if strong.sum() >= MIN_TAU_ROWS:
                U = U[strong]
        dim = U.shape[1]
        taus = []
        for i in range(dim):
            for j in range(i + 1, dim):
                tau, _ = stats.kendalltau(U[:, i], U[:, j])
                taus.append(tau)
        return float(np.nanmean(taus)) if np.any(np.isfinite(taus)) else float('nan')

    @staticmethod
    def fit_weighted(family, U, weights=None, bounds=None, fd_step=1e-6):
        """
        Weighted maximum-likelihood copula fit.

        Archimedean families maximize sum_i w_i log c(u_i; theta) over the
        bounded theta interval with L-BFGS-B and a central-difference
        gradient, starting from the Kendall's tau inversion. The Gaussian
        family uses the weighted correlation of the normal scores projected
        onto valid correlation matrices. Rows with zero weight are dropped.

        Args:
            family (CopulaFamily or str): Family to fit
            U (PseudoObservations or array-like): Clamped pseudo-observations
            weights (array-like, optional): Nonnegative row weights
            bounds (dict, optional): Family name -> (low, high)
            fd_step (float): Relative finite-difference step

        Returns:
            CopulaFit: Fitted spec, achieved and initial log-likelihood

        Raises:
            CopulaFitError: The likelihood is non-finite at every start-grid point
        """
        family = CopulaFamily.parse(family)
        if not isinstance(U, PseudoObservations):
            U = PseudoObservations(U=U)
        weights = np.ones(U.n) if weights is None else np.asarray(weights, dtype=float).ravel()
        if weights.shape != (U.n,):
            raise ValidationError('one weight per pseudo-observation is required')
        if np.any(weights < 0) or not weights.sum() > 0:
            raise ValidationError('weights must be nonnegative with a positive sum')

        keep = weights > 0
        matrix, weights = U.U[keep], weights[keep]

        if family is CopulaFamily.GAUSSIAN:
            return CopulaService._fit_gaussian(matrix, weights)
        low, high = (bounds or Config.COPULA_BOUNDS)[family.value]
        return CopulaService._fit_archimedean(family, matrix, weights, low, high, fd_step)

    @staticmethod
    def _fit_gaussian(U, weights):
        dim = U.shape[1]
        Y = normal_quantile(U)
        moment = (Y * weights[:, None]).T @ Y / weights.sum()
        scale = np.sqrt(np.diag(moment))
        P = moment / np.outer(scale, scale)
        P = 0.5 * (P + P.T)

        eigenvalues, eigenvectors = np.linalg.eigh(P)
        P = eigenvectors @ np.diag(np.maximum(eigenvalues, MIN_EIGENVALUE)) @ eigenvectors.T
        scale = np.sqrt(np.diag(P))
        P = P / np.outer(scale, scale)
        P = 0.5 * (P + P.T)
        np.fill_diagonal(P, 1.0)

        spec = CopulaSpec.gaussian(P)
        loglik = CopulaService.weighted_loglik(spec, U, weights)
        if not np.isfinite(loglik) or loglik < 0.0:
            spec, loglik = CopulaSpec.independence(dim), 0.0
        return CopulaFit(spec=spec, loglik=loglik, initial_loglik=0.0, n_evaluations=1)

    @staticmethod
    def _fit_archimedean(family, U, weights, low, high, fd_step):
        total = weights.sum()

        def loglik(theta):
            with np.errstate(all='ignore'):
                value = CopulaService.weighted_loglik(CopulaSpec(family=family, theta=theta), U, weights)
            return value if np.isfinite(value) else -np.inf

        def objective(theta):
            value = loglik(float(theta))
            return -value / total if np.isfinite(value) else PENALTY

        def objective_and_gradient(point):
            theta = float(point[0])
            step = fd_step * max(1.0, abs(theta))
            upper, lower = min(theta + step, high), max(theta - step, low)
            gradient = (objective(upper) - objective(lower)) / (upper - lower)
            return objective(theta), np.array([gradient])

        start = CopulaService.tau_to_theta(family, CopulaService.kendall_tau(U, weights))
        if not np.isfinite(start):
            start = 0.5 * (low + high)
        start = float(np.clip(start, low, high))
        initial = loglik(start)

        if not np.isfinite(initial):
            grid = np.geomspace(low, high, START_GRID_POINTS)
            values = np.array([loglik(theta) for theta in grid])
            if not np.any(np.isfinite(values)):
                raise CopulaFitError(family.value)
            best = int(np.nanargmax(np.where(np.isfinite(values), values, -np.inf)))
            start, initial = float(grid[best]), float(values[best])

        result = optimize.minimize(
            objective_and_gradient,
            x0=np.array([start]),
            jac=True,
            method='L-BFGS-B',
            bounds=[(low, high)],
        )
        theta = float(np.clip(result.x[0], low, high))
        value = loglik(theta)
        if not np.isfinite(value) or value < initial:
            theta, value = start, initial

        logger.debug(
            'Fitted copula',
            extra={'structured_data': {
                'family': family.value, 'theta': theta, 'loglik': value,
                'initial_loglik': initial, 'evaluations': int(result.nfev),
            }},
        )
        return CopulaFit(
            spec=CopulaSpec(family=family, theta=theta),
            loglik=float(value),
            initial_loglik=float(initial),
            n_evaluations=int(result.nfev),
        )

    @staticmethod
    def best_fit(families, U, weights=None, bounds=None, fd_step=1e-6):
        """
        Fit every candidate family and keep the largest weighted log-likelihood.

        Ties keep the earlier family in the order gaussian, clayton, gumbel,
        frank. Families whose fit fails are skipped.

        Returns:
            CopulaFit: The selected fit

        Raises:
            CopulaFitError: Every family failed
        """
        best = None
        for family in CopulaFamily.parse_many(families):
            try:
                fit = CopulaService.fit_weighted(family, U, weights, bounds, fd_step)
            except CopulaFitError as exc:
                logger.warning(f'Skipping copula family: {exc}')
                continue
            if best is None or fit.loglik > best.loglik:
                best = fit
        if best is None:
            raise CopulaFitError('all families')
        return best
