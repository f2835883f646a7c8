"""
Mixture Service

This module contains the MixtureService class, the semiparametric
copula-mixture EM engine. Each component couples nonparametric marginals
(BSHQI or the kernel baseline, refit with the responsibilities as weights)
through a parametric copula chosen per cluster by maximum likelihood.
"""

import logging

import numpy as np
from scipy import special
from sklearn.cluster import KMeans

from app.exceptions import ClusterCollapseError, ResponsibilityUnderflowError, ValidationError
from app.middleware.logging import log_performance, log_run_event
from app.models.copula import PseudoObservations
from app.models.mesh import WeightedSample
from app.models.mixture import MixtureComponent, MixtureModel, Responsibilities
from app.models.reports import SelectionRow
from app.models.run_config import InitMethod, RunConfig
from app.services.copula_service import CopulaService
from app.services.density_service import DensityService
from app.services.mesh_service import MeshService

logger = logging.getLogger('copmix.mixture')


def _as_data(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValidationError(f'data must be a non-empty n x D matrix, got shape {X.shape}')
    if X.shape[1] < 2:
        raise ValidationError('copula mixtures need at least 2 dimensions')
    if not np.all(np.isfinite(X)):
        raise ValidationError('data must be finite')
    return X


class MixtureService:
    """
    Service class for fitting and applying copula mixture models.

    Every operation takes the RunConfig that controls clamping, density
    floors, candidate families and marginal estimation; the defaults are
    used when it is omitted.
    """

    @staticmethod
    def build_meshes(X, config=None):
        """One mesh per dimension spanning the full column range, N from the total sample size."""
        config = config or RunConfig()
        return [
            MeshService.build_mesh(X[:, j], config.bins_rule, config.padding, config.n_bins)
            for j in range(X.shape[1])
        ]

    @staticmethod
    def pseudo_observations(marginals, X, config=None):
        """Clamped marginal CDF values F_j(x_ij) for a component or a sequence of marginals."""
        config = config or RunConfig()
        if isinstance(marginals, MixtureComponent):
            marginals = marginals.marginals
        U = np.column_stack([
            np.atleast_1d(marginal.cdf(X[:, j])) for j, marginal in enumerate(marginals)
        ])
        return PseudoObservations.clamped(U, eps=config.eps)

    @staticmethod
    def component_log_density(component, x, config=None):
        """
        log g_k(x) = log c_k(F_1(x_1), ..., F_D(x_D)) + sum_j log max(f_j(x_j), floor).

        Args:
            component (MixtureComponent): Mixture component
            x (array-like): Row of D values or n x D matrix
            config (RunConfig, optional): Clamp and floor settings

        Returns:
            float or np.ndarray: Log density of the component
        """
        config = config or RunConfig()
        single = np.ndim(x) == 1
        X = np.atleast_2d(np.asarray(x, dtype=float))
        if X.shape[1] != component.dim:
            raise ValidationError(f'component is {component.dim}-dimensional, data is {X.shape[1]}-dimensional')

        log_floor = np.log(config.density_floor)
        U = MixtureService.pseudo_observations(component, X, config)
        with np.errstate(all='ignore'):
            copula_part = np.atleast_1d(CopulaService.log_density(component.copula, U.U))
        copula_part = np.where(np.isfinite(copula_part), copula_part, log_floor)

        marginal_part = np.zeros(X.shape[0])
        for j, marginal in enumerate(component.marginals):
            density = np.atleast_1d(marginal.pdf(X[:, j]))
            marginal_part += np.log(np.maximum(density, config.density_floor))

        values = copula_part + marginal_part
        return float(values[0]) if single else values

    @staticmethod
    def weighted_scores(model, X, config=None):
        """n x K matrix of log pi_k + log g_k(x_i)."""
        X = _as_data(X)
        return np.column_stack([
            np.log(component.pi) + MixtureService.component_log_density(component, X, config)
            for component in model.components
        ])

    @staticmethod
    def e_step(model, X, config=None):
        """
        Responsibilities gamma_ik by a log-sum-exp normalized softmax over components.

        Raises:
            ResponsibilityUnderflowError: Every component is -inf for some row
        """
        scores = MixtureService.weighted_scores(model, X, config)
        row_max = scores.max(axis=1)
        bad = np.flatnonzero(~np.isfinite(row_max))
        if bad.size:
            raise ResponsibilityUnderflowError(int(bad[0]))
        gamma = np.exp(scores - row_max[:, None])
        gamma /= gamma.sum(axis=1, keepdims=True)
        return Responsibilities(gamma=gamma)

    @staticmethod
    def log_likelihood(model, X, config=None):
        """Sum over rows of log sum_k pi_k g_k(x_i)."""
        scores = MixtureService.weighted_scores(model, X, config)
        return float(special.logsumexp(scores, axis=1).sum())

    @staticmethod
    def predict(model, X, config=None):
        """Hard labels by responsibility argmax; ties go to the smallest index."""
        scores = MixtureService.weighted_scores(model, X, config)
        return np.argmax(scores, axis=1)

    @staticmethod
    def selection_rows(model, X, config=None):
        """
        Per-cluster summary of the selected copulas.

        ``points`` counts the rows assigned to the cluster by argmax and
        ``copula_loglik`` is the responsibility-weighted copula log-likelihood.

        Returns:
            list: SelectionRow per component
        """
        config = config or RunConfig()
        X = _as_data(X)
        gamma = MixtureService.e_step(model, X, config)
        labels = np.argmax(gamma.gamma, axis=1)
        rows = []
        for k, component in enumerate(model.components):
            U = MixtureService.pseudo_observations(component, X, config)
            with np.errstate(all='ignore'):
                log_c = np.atleast_1d(CopulaService.log_density(component.copula, U.U))
            log_c = np.where(np.isfinite(log_c), log_c, np.log(config.density_floor))
            spec = component.copula
            rows.append(SelectionRow(
                cluster=k,
                points=int(np.sum(labels == k)),
                pi=float(component.pi),
                family=spec.family.value,
                parameters=spec.describe().split('(', 1)[1].rstrip(')'),
                copula_loglik=float(np.dot(gamma.gamma[:, k], log_c)),
            ))
        return rows

    @staticmethod
    def m_step(X, gamma, families=None, bins_rule=None, config=None, meshes=None):
        """
        Refit mixing weights, marginals and copulas from responsibilities.

        pi_k is the mean responsibility; every marginal is refit with the
        k-th responsibilities as weights; the copula is the best family on the
        refreshed pseudo-observations with the same weights.

        Args:
            X (array-like): n x D data
            gamma (Responsibilities): E-step output
            families (iterable, optional): Candidate families (overrides config)
            bins_rule (BinsRule or str, optional): Mesh rule (overrides config)
            config (RunConfig, optional): Remaining settings
            meshes (list, optional): Per-dimension meshes to reuse

        Returns:
            MixtureModel: Updated model; ``copula_trace`` holds one entry of
                (initial, final) copula log-likelihoods per component

        Raises:
            ClusterCollapseError: A component has effective weight below D + 1
        """
        X = _as_data(X)
        config = (config or RunConfig()).with_overrides(families=families, bins_rule=bins_rule)
        if not isinstance(gamma, Responsibilities):
            gamma = Responsibilities(gamma=gamma)
        n, dim = X.shape
        if gamma.n != n:
            raise ValidationError(f'responsibilities have {gamma.n} rows, data has {n}')
        if meshes is None:
            meshes = MixtureService.build_meshes(X, config)

        sizes = gamma.effective_sizes
        threshold = dim + 1
        for k, size in enumerate(sizes):
            if size < threshold:
                raise ClusterCollapseError(k, float(size), threshold)

        pis = sizes / n
        pis = pis / pis.sum()

        components, substeps = [], []
        for k in range(gamma.K):
            weights = gamma.gamma[:, k]
            marginals = tuple(
                DensityService.fit_marginal(
                    WeightedSample(values=X[:, j], weights=weights), meshes[j], config.marginal_method
                )
                for j in range(dim)
            )
            U = MixtureService.pseudo_observations(marginals, X, config)
            fit = CopulaService.best_fit(config.families, U, weights, config.bounds, config.fd_step)
            components.append(MixtureComponent(pi=pis[k], copula=fit.spec, marginals=marginals))
            substeps.append([fit.initial_loglik, fit.loglik])

            log_run_event(
                'copula_selected', level=logging.DEBUG,
                cluster=k, family=fit.spec.family.value, loglik=fit.loglik,
            )

        return MixtureModel(components=components, copula_trace=[substeps], config=config.to_dict())

    @staticmethod
    def auxiliary_terms(model, X, gamma, config=None):
        """
        Expected complete-data log-likelihood split into its three sums.

        Returns:
            dict: ``mixing`` = sum gamma log pi, ``copula`` = sum gamma log c,
                ``marginal`` = sum gamma sum_j log f_j and their ``total``
        """
        config = config or RunConfig()
        X = _as_data(X)
        gamma = gamma.gamma if isinstance(gamma, Responsibilities) else np.asarray(gamma, dtype=float)
        log_floor = np.log(config.density_floor)

        mixing = copula = marginal = 0.0
        for k, component in enumerate(model.components):
            weights = gamma[:, k]
            U = MixtureService.pseudo_observations(component, X, config)
            with np.errstate(all='ignore'):
                log_c = np.atleast_1d(CopulaService.log_density(component.copula, U.U))
            log_c = np.where(np.isfinite(log_c), log_c, log_floor)
            log_f = sum(
                np.log(np.maximum(np.atleast_1d(m.pdf(X[:, j])), config.density_floor))
                for j, m in enumerate(component.marginals)
            )
            mixing += float(weights.sum() * np.log(component.pi))
            copula += float(np.dot(weights, log_c))
            marginal += float(np.dot(weights, log_f))
        return {'mixing': mixing, 'copula': copula, 'marginal': marginal, 'total': mixing + copula + marginal}

    @staticmethod
    def initial_partition(X, K, init, rng):
        """Hard labels of one initialization: a balanced random partition or a Lloyd K-Means run."""
        n = X.shape[0]
        if InitMethod.parse(init) is InitMethod.KMEANS:
            kmeans = KMeans(
                n_clusters=K, init='random', n_init=1, algorithm='lloyd',
                random_state=int(rng.integers(2 ** 31 - 1)),
            )
            return kmeans.fit_predict(X)
        return rng.permutation(np.arange(n) % K)

    @staticmethod
    def _initialize(X, config, meshes, rng):
        """Best of ``restarts`` initial partitions by log-likelihood."""
        best_model, best_loglik = None, -np.inf
        for attempt in range(config.restarts):
            labels = MixtureService.initial_partition(X, config.K, config.init, rng)
            gamma = Responsibilities.one_hot(labels, config.K)
            try:
                model = MixtureService.m_step(X, gamma, config=config, meshes=meshes)
            except ClusterCollapseError as exc:
                logger.info(f'Discarding initial partition {attempt}: {exc}')
                continue
            loglik = MixtureService.log_likelihood(model, X, config)
            if loglik > best_loglik:
                best_model, best_loglik = model, loglik
        if best_model is None:
            raise ClusterCollapseError(-1, 0.0, X.shape[1] + 1)
        log_run_event('restart_chosen', loglik=best_loglik, restarts=config.restarts)
        return best_model

    @staticmethod
    def _run_em(X, config, meshes, rng):
        model = MixtureService._initialize(X, config, meshes, rng)
        previous = MixtureService.log_likelihood(model, X, config)
        trace = [previous]
        copula_trace = list(model.copula_trace)
        converged = False
        iteration = 0

        for iteration in range(1, config.max_iter + 1):
            gamma = MixtureService.e_step(model, X, config)
            model = MixtureService.m_step(X, gamma, config=config, meshes=meshes)
            current = MixtureService.log_likelihood(model, X, config)
            trace.append(current)
            copula_trace.extend(model.copula_trace)

            log_run_event('em_iteration', level=logging.DEBUG, iteration=iteration, loglik=current)
            if abs(current - previous) / (1.0 + abs(current)) < config.tol:
                converged = True
                break
            previous = current

        return MixtureModel(
            components=model.components,
            loglik_trace=trace,
            n_iter=iteration,
            converged=converged,
            seed=config.seed,
            config=config.to_dict(),
            copula_trace=copula_trace,
        )

    @staticmethod
    @log_performance(threshold_ms=60000)
    def fit(X, K=None, families=None, init=None, restarts=None, tol=None, max_iter=None, config=None):
        """
        Fit a K-component copula mixture by EM.

        The best of ``restarts`` initial partitions (random or K-Means) seeds
        the iterations, which stop when the relative log-likelihood change
        |L_t - L_{t-1}| / (1 + |L_t|) drops below ``tol`` or after
        ``max_iter`` iterations. A cluster collapse restarts from fresh
        partitions up to ``rescue_attempts`` times.

        Args:
            X (array-like): n x D data, D >= 2
            K, families, init, restarts, tol, max_iter: Overrides of the
                corresponding RunConfig fields
            config (RunConfig, optional): Base settings, including the seed

        Returns:
            MixtureModel: Fitted model with its log-likelihood trace

        Raises:
            ValidationError: n < K (D + 1)
            ClusterCollapseError: Collapse persists after every rescue
        """
        X = _as_data(X)
        config = (config or RunConfig()).with_overrides(
            K=K, families=families, init=init, restarts=restarts, tol=tol, max_iter=max_iter
        )
        n, dim = X.shape
        if n < config.K * (dim + 1):
            raise ValidationError(
                f'K = {config.K} needs at least K * (D + 1) = {config.K * (dim + 1)} observations, got {n}'
            )

        meshes = MixtureService.build_meshes(X, config)
        seeds = np.random.SeedSequence(config.seed).spawn(config.rescue_attempts + 1)

        for attempt, child in enumerate(seeds):
            rng = np.random.default_rng(child)
            try:
                model = MixtureService._run_em(X, config, meshes, rng)
            except ClusterCollapseError as exc:
                if attempt == config.rescue_attempts:
                    raise
                log_run_event('cluster_collapse_rescue', level=logging.WARNING, attempt=attempt + 1, error=str(exc))
                continue
            logger.info(
                'Mixture fitted',
                extra={'structured_data': {
                    'K': model.K, 'n_iter': model.n_iter, 'converged': model.converged,
                    'loglik': model.final_loglik,
                }},
            )
            return model
