"""
Metrics Commands

``metrics DATA_PATH LABELS_PATH`` scores a labeling of a dataset. External
metrics are included when the dataset CSV carries a ``label`` column. With
``--compare`` the labeling is also scored next to K-Means and Gaussian-mixture
baselines fitted with as many clusters as the labeling has.
"""

import click
import numpy as np
from flask import current_app

from app.blueprints.metrics import bp
from app.exceptions import ValidationError
from app.services.metrics_service import ClusteringService
from app.utils.decorators import cli_errors
from app.utils.file_helpers import output_prefix, read_dataset, read_labels, write_json
from app.utils.validators import load_settings


@bp.cli.command('metrics')
@click.argument('data_path')
@click.argument('labels_path')
@click.option('--compare', is_flag=True, help='Also score K-Means and Gaussian-mixture baselines.')
@click.option('--seed', type=int, default=None, help='Baseline RNG seed (defaults to SEED from the configuration).')
@click.option('--out', default=None, help='Report path prefix (default: LABELS_PATH without extension).')
@click.option('--config', 'config_path', default=None, help='JSON file of configuration keys.')
@cli_errors
def metrics(data_path, labels_path, compare, seed, out, config_path):
    """Compute clustering quality metrics of a labeling."""
    settings = load_settings(config_path)
    seed = settings['SEED'] if seed is None else seed
    dataset = read_dataset(data_path)
    labels = read_labels(labels_path)
    if labels.size != dataset.n:
        raise ValidationError(f'{labels_path} has {labels.size} labels for {dataset.n} observations')
    prefix = output_prefix(labels_path, out)

    tracker = current_app.extensions['run_logging']
    with tracker.track_run('metrics', data=data_path, labels=labels_path, seed=seed, compare=compare):
        report = ClusteringService.report(dataset.X, labels, dataset.labels)
        path = write_json(report, f'{prefix}.report.json', schema='clustering_report')
        if compare:
            K = int(np.unique(labels).size)
            comparison = ClusteringService.compare(
                dataset.X, labels, K, seed, dataset.labels, name='labeling'
            )
            compare_path = write_json(comparison, f'{prefix}.compare.json', schema='comparison')

    click.echo(report.render())
    click.echo(f'report written to {path}')
    if compare:
        click.echo(f'comparison written to {compare_path}')
