"""
Density Commands

``density IN_PATH`` fits the BSHQI estimator to one column of a CSV and
writes, next to the output prefix:

- ``.model.json``: mesh and coefficients (plus the kernel baseline with ``--kernel``)
- ``.plot.csv``: grid x, pdf and cdf (plus ``kernel_pdf``/``kernel_cdf``)
- ``.gof.json``: goodness-of-fit report, only with ``--truth``
"""

import click
from flask import current_app

from app.blueprints.density import bp
from app.exceptions import ValidationError
from app.models.dataset import UnivariateSpec
from app.models.mesh import WeightedSample
from app.models.run_config import MarginalMethod, RunConfig
from app.services.density_service import DensityService
from app.services.gof_service import GofService
from app.services.mesh_service import MeshService
from app.utils.decorators import cli_errors
from app.utils.file_helpers import output_prefix, read_column, write_json, write_table
from app.utils.validators import load_settings, parse_bins


@bp.cli.command('density')
@click.argument('in_path')
@click.option('--config', 'config_path', default=None, help='JSON file of configuration keys.')
@click.option('--seed', type=int, default=None, help='Seed of the goodness-of-fit repetitions.')
@click.option('--out', default=None, help='Output prefix (default: IN_PATH without extension).')
@click.option('--bins', default=None, help='Bin rule (rice, cuberoot) or an explicit subinterval count.')
@click.option('--padding', type=click.FloatRange(min=0.0), default=None, help='Mesh padding as a fraction of the range.')
@click.option('--column', default=None, help='Column to fit (default: first feature column).')
@click.option('--truth', default=None, help='Known distribution, e.g. normal:5,0.3, enabling the GoF report.')
@click.option('--reps', type=click.IntRange(min=1), default=None, help='Goodness-of-fit repetitions.')
@click.option('--kernel', is_flag=True, help='Also fit the uniform-kernel baseline.')
@click.option('--experiment', is_flag=True,
              help='With --truth: refit on fresh truth samples of the input size in every repetition.')
@click.option('--plot-points', type=click.IntRange(min=2), default=None, help='Rows of the plot-data CSV.')
@cli_errors
def density(in_path, config_path, seed, out, bins, padding, column, truth, reps, kernel, experiment, plot_points):
    """Fit a BSHQI density to one column of a CSV file."""
    settings = load_settings(config_path)
    bins_rule, n_bins = parse_bins(bins)
    config = RunConfig.from_mapping(settings, seed=seed, bins_rule=bins_rule, n_bins=n_bins, padding=padding)
    reps = reps or settings['GOF_REPETITIONS']
    plot_points = plot_points or settings['PLOT_GRID_POINTS']
    truth_spec = UnivariateSpec.parse(truth) if truth else None
    if experiment and truth_spec is None:
        raise ValidationError('--experiment needs --truth')

    data = read_column(in_path, column)
    prefix = output_prefix(in_path, out)

    tracker = current_app.extensions['run_logging']
    with tracker.track_run('density', input=in_path, bins=config.bins_rule.value, n=int(data.size)):
        sample = WeightedSample.unweighted(data)
        mesh = MeshService.build_mesh(data, config.bins_rule, config.padding, config.n_bins)
        model = DensityService.fit(sample, mesh=mesh)
        document = {'kind': MarginalMethod.BSHQI.value, 'bins_rule': config.bins_rule.value, **model.to_dict()}

        x, pdf, cdf = DensityService.plot_data(model, plot_points)
        columns = {'x': x, 'pdf': pdf, 'cdf': cdf}

        baseline = None
        if kernel:
            baseline = DensityService.fit_kernel(sample, mesh=mesh)
            document['kernel'] = baseline.to_dict()
            columns['kernel_pdf'] = baseline.pdf(x)
            columns['kernel_cdf'] = baseline.cdf(x)

        report = None
        if truth_spec is not None:
            options = dict(
                reps=reps, seed=config.seed, bins_rule=config.bins_rule, n_bins=config.n_bins,
                padding=config.padding, grid_points=settings['ISE_GRID_POINTS'],
            )
            if experiment:
                report = GofService.run_experiment(truth_spec, data.size, **options)
            else:
                report = GofService.assess(model, data, truth_spec, **options)

        write_json(document, f'{prefix}.model.json', schema='density_model')
        write_table(columns, f'{prefix}.plot.csv')
        if report is not None:
            gof = {'truth': truth_spec.describe(), **report.to_dict()}
            write_json(gof, f'{prefix}.gof.json', schema='gof_report')

    click.echo(f'BSHQI fit: N = {mesh.N}, h = {mesh.h:.6g}, support [{mesh.a:.6g}, {mesh.b:.6g}]')
    if baseline is not None:
        click.echo(f'kernel baseline: h = {baseline.h:.6g}')
    if report is not None:
        click.echo(report.render())
