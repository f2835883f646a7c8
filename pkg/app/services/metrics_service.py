"""
Metrics Service

This module contains the ClusteringService class computing the clustering
quality metrics (silhouette, Calinski-Harabasz, Davies-Bouldin, adjusted and
plain Rand, homogeneity, completeness, misclassification rate) and running
the K-Means and Gaussian-mixture baselines the copula mixture is compared to.
"""

import logging

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn import metrics
from sklearn.cluster import KMeans
from sklearn.metrics.cluster import contingency_matrix
from sklearn.mixture import GaussianMixture

from app.exceptions import ValidationError
from app.models.reports import ClusteringReport

logger = logging.getLogger('copmix.metrics')


def _labels(values, name):
    values = np.asarray(values).ravel()
    if values.size == 0:
        raise ValidationError(f'{name} must not be empty')
    return values


def _paired(true_labels, pred_labels):
    true_labels = _labels(true_labels, 'true labels')
    pred_labels = _labels(pred_labels, 'predicted labels')
    if true_labels.shape != pred_labels.shape:
        raise ValidationError(
            f'label vectors differ in length ({true_labels.size} != {pred_labels.size})'
        )
    return true_labels, pred_labels


class ClusteringService:
    """
    Service class for clustering evaluation and baseline clusterers.

    Distances are Euclidean throughout.
    """

    @staticmethod
    def internal_metrics(X, labels):
        """
        Silhouette, Calinski-Harabasz and Davies-Bouldin scores.

        Args:
            X (array-like): n x D data
            labels (array-like): Cluster label per row

        Returns:
            tuple: (silhouette, calinski_harabasz, davies_bouldin)

        Raises:
            ValidationError: Fewer than two distinct labels
        """
        X = np.asarray(X, dtype=float)
        labels = _labels(labels, 'labels')
        if X.shape[0] != labels.size:
            raise ValidationError('one label per observation is required')
        distinct = np.unique(labels).size
        if distinct < 2:
            raise ValidationError('internal metrics need at least two clusters')
        if distinct >= labels.size:
            raise ValidationError('internal metrics need fewer clusters than observations')
        return (
            float(metrics.silhouette_score(X, labels, metric='euclidean')),
            float(metrics.calinski_harabasz_score(X, labels)),
            float(metrics.davies_bouldin_score(X, labels)),
        )

    @staticmethod
    def external_metrics(true_labels, pred_labels):
        """
        Adjusted Rand, Rand, homogeneity and completeness of a labeling.

        Returns:
            tuple: (adjusted_rand, rand, homogeneity, completeness)
        """
        true_labels, pred_labels = _paired(true_labels, pred_labels)
        return (
            float(metrics.adjusted_rand_score(true_labels, pred_labels)),
            float(metrics.rand_score(true_labels, pred_labels)),
            float(metrics.homogeneity_score(true_labels, pred_labels)),
            float(metrics.completeness_score(true_labels, pred_labels)),
        )

    @staticmethod
    def misclassification_rate(true_labels, pred_labels):
        """
        Smallest mismatch fraction over matchings of predicted to true labels.

        Solved exactly as an assignment problem on the contingency matrix.
        """
        true_labels, pred_labels = _paired(true_labels, pred_labels)
        table = contingency_matrix(true_labels, pred_labels)
        rows, cols = linear_sum_assignment(table, maximize=True)
        matched = table[rows, cols].sum()
        return float(1.0 - matched / true_labels.size)

    @staticmethod
    def report(X, labels, true_labels=None):
        """
        Build a ClusteringReport; external metrics only when ground truth is given.

        Returns:
            ClusteringReport: Metrics of the labeling
        """
        silhouette, calinski_harabasz, davies_bouldin = ClusteringService.internal_metrics(X, labels)
        external = {}
        if true_labels is not None:
            adjusted_rand, rand, homogeneity, completeness = ClusteringService.external_metrics(
                true_labels, labels
            )
            external = {
                'adjusted_rand': adjusted_rand,
                'rand': rand,
                'homogeneity': homogeneity,
                'completeness': completeness,
                'misclassification': ClusteringService.misclassification_rate(true_labels, labels),
            }
        return ClusteringReport(
            silhouette=silhouette,
            calinski_harabasz=calinski_harabasz,
            davies_bouldin=davies_bouldin,
            **external,
        )

    @staticmethod
    def baselines(X, K, seed=0):
        """
        Labels from the K-Means and Gaussian-mixture baselines, both randomly initialized.

        Returns:
            dict: Baseline name -> label vector
        """
        X = np.asarray(X, dtype=float)
        kmeans = KMeans(n_clusters=K, init='random', n_init=10, random_state=seed)
        gmm = GaussianMixture(n_components=K, init_params='random', tol=1e-4, n_init=5, random_state=seed)
        labels = {
            'kmeans': kmeans.fit_predict(X),
            'gmm': gmm.fit(X).predict(X),
        }
        logger.debug('Baselines fitted', extra={'structured_data': {'K': K, 'seed': seed}})
        return labels

    @staticmethod
    def score(X, labels, true_labels=None):
        """ClusteringReport of a labeling, or None when it has fewer than two clusters."""
        distinct = np.unique(labels).size
        if distinct < 2 or distinct >= len(labels):
            logger.warning(f'Skipping clustering metrics: {distinct} distinct label(s)')
            return None
        return ClusteringService.report(X, labels, true_labels)

    @staticmethod
    def compare(X, labels, K, seed=0, true_labels=None, name='copula_mixture'):
        """
        Score a labeling next to the K-Means and Gaussian-mixture baselines.

        Args:
            X: n x D observations
            labels: Labeling under comparison, stored under ``name``
            K (int): Number of clusters the baselines fit
            seed (int): Seed of both baselines
            true_labels: Optional ground truth for the external metrics

        Returns:
            dict: Method name -> report dict, None for a degenerate labeling
        """
        comparison = {name: labels}
        comparison.update(ClusteringService.baselines(X, K, seed))
        reports = {}
        for method, method_labels in comparison.items():
            report = ClusteringService.score(X, method_labels, true_labels)
            reports[method] = report.to_dict() if report else None
        return reports
