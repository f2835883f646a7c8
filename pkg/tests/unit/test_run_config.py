"""
Unit tests for run configuration assembly and command-line value parsing.
"""

import json

import pytest

from app.config import Config
from app.exceptions import ValidationError
from app.models.copula import CopulaFamily
from app.models.mesh import BinsRule
from app.models.run_config import InitMethod, MarginalMethod, RunConfig
from app.utils.validators import load_settings, parse_bins


@pytest.mark.unit
class TestRunConfig:

    def test_defaults(self):
        config = RunConfig()
        assert config.bins_rule is BinsRule.RICE
        assert config.families == tuple(CopulaFamily)
        assert config.init is InitMethod.RANDOM
        assert config.marginal_method is MarginalMethod.BSHQI
        assert config.bounds_for('gumbel')[0] > 1.0

    def test_default_bounds_match_configuration(self, app):
        assert RunConfig().bounds == Config.COPULA_BOUNDS
        assert RunConfig.from_mapping(app.config).bounds == RunConfig().bounds

    def test_from_app_config(self, app):
        config = RunConfig.from_mapping(app.config)
        assert config.restarts == app.config['EM_RESTARTS']
        assert config.max_iter == app.config['EM_MAX_ITER']
        assert config.eps == app.config['PSEUDO_OBS_EPS']

    def test_overrides_win_and_none_is_ignored(self, app):
        config = RunConfig.from_mapping(app.config, K=4, init='k-means', tol=None, families='frank,clayton')
        assert config.K == 4
        assert config.init is InitMethod.KMEANS
        assert config.tol == app.config['EM_TOL']
        assert config.families == (CopulaFamily.CLAYTON, CopulaFamily.FRANK)

    def test_with_overrides(self):
        config = RunConfig().with_overrides(K=3, max_iter=None)
        assert config.K == 3
        assert config.max_iter == RunConfig().max_iter

    @pytest.mark.parametrize('field, value', [
        ('tol', 0.0),
        ('restarts', 0),
        ('K', 0),
        ('max_iter', 0),
        ('padding', -0.1),
        ('eps', 0.5),
        ('init', 'spectral'),
        ('marginal_method', 'histogram'),
        ('bins_rule', 'explicit'),
    ])
    def test_rejects_invalid_values(self, field, value):
        with pytest.raises(ValidationError):
            RunConfig(**{field: value})

    def test_serializes_enums(self):
        data = RunConfig(K=3).to_dict()
        assert data['K'] == 3
        assert data['bins_rule'] == 'rice'
        assert data['families'] == ['gaussian', 'clayton', 'gumbel', 'frank']
        json.dumps(data)


@pytest.mark.unit
class TestSettings:

    def test_without_file(self, app):
        settings = load_settings()
        assert settings['EM_K'] == app.config['EM_K']

    def test_json_file_layers_on_top(self, app, tmp_path):
        path = tmp_path / 'run.json'
        path.write_text(json.dumps({'EM_K': 5, 'BINS_RULE': 'cuberoot'}))
        settings = load_settings(str(path))
        assert settings['EM_K'] == 5
        assert RunConfig.from_mapping(settings).bins_rule is BinsRule.CUBE_ROOT
        # the application config is untouched
        assert app.config['EM_K'] == 2

    def test_bad_files(self, app, tmp_path):
        with pytest.raises(ValidationError, match='cannot be read'):
            load_settings(str(tmp_path / 'missing.json'))
        broken = tmp_path / 'broken.json'
        broken.write_text('{"EM_K": ')
        with pytest.raises(ValidationError, match='not valid JSON'):
            load_settings(str(broken))


@pytest.mark.unit
class TestParseBins:

    @pytest.mark.parametrize('value, expected', [
        (None, (None, None)),
        ('rice', (BinsRule.RICE, None)),
        ('CubeRoot', (BinsRule.CUBE_ROOT, None)),
        ('64', (BinsRule.EXPLICIT, 64)),
    ])
    def test_values(self, value, expected):
        assert parse_bins(value) == expected

    @pytest.mark.parametrize('value', ['explicit', 'sturges', '-3'])
    def test_rejected(self, value):
        with pytest.raises(ValidationError):
            parse_bins(value)
