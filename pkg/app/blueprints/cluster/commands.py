"""
Cluster Commands

``cluster IN_PATH`` fits a K-component copula mixture and writes, next to
the output prefix:

- ``.model.json``: the fitted mixture with its log-likelihood trace
- ``.labels.csv``: hard labels by responsibility argmax
- ``.report.json``: clustering metrics, external ones when IN_PATH has a ``label`` column
- ``.selection.csv`` and ``.selection.txt``: the per-cluster copula selection table
- ``.compare.json``: copula mixture vs K-Means and Gaussian mixture, with ``--compare``
"""

import click
from flask import current_app

from app.blueprints.cluster import bp
from app.models.reports import SelectionRow
from app.models.run_config import RunConfig
from app.services.metrics_service import ClusteringService
from app.services.mixture_service import MixtureService
from app.utils.decorators import cli_errors
from app.utils.file_helpers import output_prefix, read_dataset, write_json, write_labels, write_table
from app.utils.validators import load_settings, parse_bins


def selection_columns(rows):
    return {
        'cluster': [row.cluster for row in rows],
        'points': [row.points for row in rows],
        'pi': [row.pi for row in rows],
        'family': [row.family for row in rows],
        'parameters': [row.parameters for row in rows],
        'copula_loglik': [row.copula_loglik for row in rows],
    }


@bp.cli.command('cluster')
@click.argument('in_path')
@click.option('-k', '--k', 'K', type=int, default=None, help='Number of clusters.')
@click.option('--families', default=None, help='Comma-separated candidate copula families.')
@click.option('--init', type=click.Choice(['random', 'kmeans'], case_sensitive=False), default=None,
              help='Initial partition method.')
@click.option('--restarts', type=int, default=None, help='Initial partitions tried.')
@click.option('--tol', type=float, default=None, help='Relative log-likelihood tolerance.')
@click.option('--max-iter', type=int, default=None, help='EM iteration cap.')
@click.option('--bins', default=None, help='Bin rule (rice, cuberoot) or an explicit subinterval count.')
@click.option('--marginal', type=click.Choice(['bshqi', 'kernel'], case_sensitive=False), default=None,
              help='Marginal density estimator.')
@click.option('--compare', is_flag=True, help='Also score K-Means and Gaussian-mixture baselines.')
@click.option('--seed', type=int, default=None, help='RNG seed.')
@click.option('--out', default=None, help='Output prefix (default: IN_PATH without extension).')
@click.option('--config', 'config_path', default=None, help='JSON file of configuration keys.')
@cli_errors
def cluster(in_path, K, families, init, restarts, tol, max_iter, bins, marginal, compare, seed, out, config_path):
    """Cluster a dataset CSV with a semiparametric copula mixture."""
    settings = load_settings(config_path)
    bins_rule, n_bins = parse_bins(bins)
    config = RunConfig.from_mapping(
        settings, seed=seed, K=K, families=families, init=init, restarts=restarts, tol=tol,
        max_iter=max_iter, bins_rule=bins_rule, n_bins=n_bins, marginal_method=marginal,
    )
    dataset = read_dataset(in_path)
    prefix = output_prefix(in_path, out)

    tracker = current_app.extensions['run_logging']
    with tracker.track_run('cluster', input=in_path, K=config.K, seed=config.seed,
                           families=[family.value for family in config.families]):
        model = MixtureService.fit(dataset.X, config=config)
        labels = MixtureService.predict(model, dataset.X, config)
        report = ClusteringService.score(dataset.X, labels, dataset.labels)
        rows = MixtureService.selection_rows(model, dataset.X, config)
        table = SelectionRow.render_table(rows, model.final_loglik)

        comparison = None
        if compare:
            comparison = ClusteringService.compare(
                dataset.X, labels, config.K, config.seed, dataset.labels, name='copula_mixture'
            )

        write_json(model, f'{prefix}.model.json', schema='mixture_model')
        write_labels(labels, f'{prefix}.labels.csv')
        if report is not None:
            write_json(report, f'{prefix}.report.json', schema='clustering_report')
        write_table(selection_columns(rows), f'{prefix}.selection.csv')
        with open(f'{prefix}.selection.txt', 'w') as handle:
            handle.write(table + '\n')
        if comparison is not None:
            write_json(comparison, f'{prefix}.compare.json', schema='comparison')

    click.echo(table)
    status = 'converged' if model.converged else 'stopped at max_iter'
    click.echo(f'EM {status} after {model.n_iter} iteration(s)')
    if report is not None:
        click.echo(report.render())
