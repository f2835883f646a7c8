"""
Gendata Commands

``gendata WHICH`` writes one of the named clustering datasets (x1, x2, x3,
x4) or, when WHICH is a distribution spec such as ``normal:5,0.3``, an
unlabeled univariate sample. The CSV is accompanied by a ``.recipe.json``
file recording everything needed to regenerate it.
"""

import click
from flask import current_app

from app.blueprints.gendata import bp
from app.models.dataset import DISTRIBUTION_KINDS, LabeledDataset, UnivariateSpec
from app.services.datagen_service import DatasetService
from app.utils.decorators import cli_errors, timing_decorator
from app.utils.file_helpers import ensure_writable, sidecar_path, write_dataset, write_json
from app.utils.validators import load_settings


def is_distribution(which):
    """True when WHICH names a univariate distribution rather than a dataset."""
    kind = str(which).partition(':')[0].strip().lower()
    return kind in DISTRIBUTION_KINDS


@timing_decorator()
def generate(which, seed, n):
    """Build the dataset and its recipe document."""
    if is_distribution(which):
        spec = UnivariateSpec.parse(which)
        values = DatasetService.gen_univariate(spec, n, seed)
        dataset = LabeledDataset(X=values[:, None], seed=seed)
        return dataset, {'distribution': spec.describe(), 'n': int(n), 'seed': seed}

    dataset = DatasetService.gen_synthetic(which, seed)
    return dataset, {'seed': seed, **dataset.recipe.to_dict()}


@bp.cli.command('gendata')
@click.argument('which')
@click.option('--seed', type=int, default=None, help='RNG seed (defaults to SEED from the configuration).')
@click.option('-o', '--out', 'out_path', default=None, help='Output CSV path (default: WHICH.csv).')
@click.option('--config', 'config_path', default=None, help='JSON file of configuration keys.')
@click.option('--n', 'n', type=click.IntRange(min=1), default=1000, show_default=True,
              help='Sample size for univariate distributions.')
@cli_errors
def gendata(which, seed, out_path, config_path, n):
    """Generate a synthetic dataset (x1..x4) or a univariate sample."""
    settings = load_settings(config_path)
    seed = settings['SEED'] if seed is None else seed

    if out_path is None:
        name = UnivariateSpec.parse(which).kind if is_distribution(which) else str(which).strip().lower()
        out_path = f'{name}.csv'
    recipe_path = sidecar_path(out_path, '.recipe.json')
    ensure_writable(out_path)

    tracker = current_app.extensions['run_logging']
    with tracker.track_run('gendata', which=which, seed=seed, out=out_path):
        dataset, recipe = generate(which, seed, n)
        write_dataset(dataset, out_path)
        write_json(recipe, recipe_path, schema='recipe')

    click.echo(f'wrote {dataset.n} rows to {out_path} (recipe: {recipe_path})')
