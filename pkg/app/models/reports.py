"""
Report Models

This module contains the result records rendered by the CLI: the
goodness-of-fit report of a density experiment, the clustering quality
report and one row of the per-cluster copula selection table.
"""

from dataclasses import dataclass, fields

from app.exceptions import ValidationError
from app.models.base import SerializableModel


def _render(records):
    """Align ``(label, value)`` pairs into a two-column text table."""
    width = max(len(label) for label, _ in records)
    lines = []
    for label, value in records:
        if value is None:
            shown = '-'
        elif isinstance(value, float):
            shown = f'{value:.6g}'
        else:
            shown = str(value)
        lines.append(f'{label.ljust(width)}  {shown}')
    return '\n'.join(lines)


@dataclass(frozen=True)
class GofReport(SerializableModel):
    """Goodness-of-fit statistics, integrated errors and timing of a density estimator."""

    ks_statistic: float
    ks_pvalue: float
    cvm_statistic: float
    cvm_pvalue: float
    amise: float
    rmse: float
    mean_time_ms: float
    std_time_ms: float
    cdf_amise: float = None
    cdf_rmse: float = None
    repetitions: int = 1

    def __post_init__(self):
        for name in ('ks_statistic', 'cvm_statistic', 'amise', 'rmse', 'mean_time_ms', 'std_time_ms'):
            value = float(getattr(self, name))
            if not value >= 0:
                raise ValidationError(f'{name} must be nonnegative, got {value}')
            object.__setattr__(self, name, value)
        for name in ('ks_pvalue', 'cvm_pvalue'):
            value = float(getattr(self, name))
            if not 0 <= value <= 1:
                raise ValidationError(f'{name} must lie in [0, 1], got {value}')
            object.__setattr__(self, name, value)

    def render(self):
        return _render([(item.name, getattr(self, item.name)) for item in fields(self)])


@dataclass(frozen=True)
class ClusteringReport(SerializableModel):
    """Internal and (when ground truth is known) external clustering metrics."""

    silhouette: float
    calinski_harabasz: float
    davies_bouldin: float
    adjusted_rand: float = None
    rand: float = None
    homogeneity: float = None
    completeness: float = None
    misclassification: float = None

    def __post_init__(self):
        if not -1 - 1e-12 <= self.silhouette <= 1 + 1e-12:
            raise ValidationError(f'silhouette must lie in [-1, 1], got {self.silhouette}')
        if self.calinski_harabasz < 0 or self.davies_bouldin < 0:
            raise ValidationError('calinski_harabasz and davies_bouldin must be nonnegative')
        if self.misclassification is not None and not 0 <= self.misclassification <= 1:
            raise ValidationError(f'misclassification must lie in [0, 1], got {self.misclassification}')

    @property
    def has_ground_truth(self):
        return self.adjusted_rand is not None

    def to_dict(self):
        data = super().to_dict()
        return {key: value for key, value in data.items() if value is not None}

    def render(self):
        return _render([
            (item.name, getattr(self, item.name))
            for item in fields(self)
            if getattr(self, item.name) is not None
        ])


@dataclass(frozen=True)
class SelectionRow(SerializableModel):
    """One line of the per-cluster copula selection table."""

    cluster: int
    points: int
    pi: float
    family: str
    parameters: str
    copula_loglik: float

    @classmethod
    def render_table(cls, rows, total_loglik):
        header = ('cluster', 'points', 'pi', 'family', 'parameters', 'copula_loglik')
        body = [
            (str(row.cluster), str(row.points), f'{row.pi:.4f}', row.family,
             row.parameters, f'{row.copula_loglik:.2f}')
            for row in rows
        ]
        widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
        lines = ['  '.join(cell.ljust(width) for cell, width in zip(line, widths)) for line in [header] + body]
        lines.append(f'total log-likelihood: {total_loglik:.2f}')
        return '\n'.join(lines)
