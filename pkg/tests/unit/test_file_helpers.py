"""
Unit tests for CSV and JSON artifact helpers.
"""

import numpy as np
import pytest

from app.exceptions import SchemaViolationError, ValidationError
from app.models.dataset import LabeledDataset
from app.models.reports import ClusteringReport
from app.schemas import SCHEMA_NAMES, load_schema, validate_document
from app.utils.file_helpers import (
    ensure_writable,
    output_prefix,
    read_column,
    read_dataset,
    read_json,
    read_labels,
    sidecar_path,
    write_dataset,
    write_json,
    write_labels,
)


@pytest.mark.unit
class TestPaths:

    def test_sidecar_path(self):
        assert sidecar_path('out/x1.csv', '.recipe.json') == 'out/x1.recipe.json'
        assert sidecar_path('data', '.model.json') == 'data.model.json'

    def test_output_prefix(self):
        assert output_prefix('runs/x1.csv') == 'runs/x1'
        assert output_prefix('runs/x1.csv', 'fit/result.csv') == 'fit/result'
        assert output_prefix('runs/x1.csv', 'fit/result') == 'fit/result'

    def test_ensure_writable(self, tmp_path):
        assert ensure_writable(str(tmp_path / 'ok.csv')).endswith('ok.csv')
        with pytest.raises(ValidationError, match='cannot write'):
            ensure_writable(str(tmp_path / 'missing' / 'out.csv'))


@pytest.mark.unit
class TestDatasets:

    def test_labeled_round_trip(self, tmp_path, two_blobs):
        path = str(tmp_path / 'blobs.csv')
        write_dataset(two_blobs, path)
        with open(path) as handle:
            assert handle.readline().strip() == 'x1,x2,label'

        dataset = read_dataset(path)
        np.testing.assert_array_equal(dataset.X, two_blobs.X)
        np.testing.assert_array_equal(dataset.labels, two_blobs.labels)

    def test_unlabeled(self, tmp_path):
        path = tmp_path / 'plain.csv'
        path.write_text('a,b\n1,2\n3,4\n')
        dataset = read_dataset(str(path))
        assert dataset.labels is None
        assert dataset.X.tolist() == [[1.0, 2.0], [3.0, 4.0]]

    def test_read_column(self, sample_csv, normal_sample):
        np.testing.assert_array_equal(read_column(sample_csv), normal_sample)
        np.testing.assert_array_equal(read_column(sample_csv, 'x1'), normal_sample)
        with pytest.raises(ValidationError, match="column 'x7' not found"):
            read_column(sample_csv, 'x7')

    @pytest.mark.parametrize('content, message', [
        ('x1,x2\n1,abc\n', 'non-numeric'),
        ('x1,x2\n1,\n', 'non-finite'),
        ('x1,x2\n', 'no data rows'),
        ('', 'malformed CSV'),
        ('x1,label\n1.0,0.5\n', 'labels must be integers'),
        ('label\n1\n', 'no feature columns'),
    ])
    def test_malformed(self, tmp_path, content, message):
        path = tmp_path / 'bad.csv'
        path.write_text(content)
        with pytest.raises(ValidationError, match=message):
            read_dataset(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValidationError, match='does not exist'):
            read_dataset(str(tmp_path / 'nope.csv'))


@pytest.mark.unit
class TestLabelsAndJson:

    def test_labels_round_trip(self, tmp_path):
        path = str(tmp_path / 'labels.csv')
        write_labels([2, 0, 1, 1], path)
        assert read_labels(path).tolist() == [2, 0, 1, 1]

    def test_json_round_trip(self, tmp_path):
        path = str(tmp_path / 'doc.json')
        write_json(LabeledDataset(X=[[1.0, 2.0]], seed=4), path)
        document = read_json(path)
        assert document['X'] == [[1.0, 2.0]]
        assert document['seed'] == 4

    def test_malformed_json(self, tmp_path):
        path = tmp_path / 'doc.json'
        path.write_text('{')
        with pytest.raises(ValidationError, match='malformed JSON'):
            read_json(str(path))


@pytest.mark.unit
class TestOutputSchemas:

    REPORT = {'silhouette': 0.8, 'calinski_harabasz': 950.0, 'davies_bouldin': 0.3}

    @pytest.mark.parametrize('name', SCHEMA_NAMES)
    def test_schemas_load(self, name):
        schema = load_schema(name)
        assert schema['$schema'].startswith('http://json-schema.org/draft-07')

    def test_unknown_schema(self):
        with pytest.raises(ValidationError, match="unknown output schema 'plot'"):
            load_schema('plot')

    def test_valid_document_is_written(self, tmp_path):
        path = str(tmp_path / 'doc.report.json')
        write_json(ClusteringReport(**self.REPORT), path, schema='clustering_report')
        assert read_json(path) == self.REPORT

    def test_invalid_document_is_not_written(self, tmp_path):
        path = tmp_path / 'doc.report.json'
        with pytest.raises(SchemaViolationError, match="at 'misclassification'"):
            write_json({**self.REPORT, 'misclassification': 1.5}, str(path), schema='clustering_report')
        assert not path.exists()

    def test_external_scores_come_together(self):
        with pytest.raises(SchemaViolationError, match='clustering_report'):
            validate_document({**self.REPORT, 'adjusted_rand': 0.9}, 'clustering_report')

    def test_comparison_allows_degenerate_methods(self):
        document = {'labeling': self.REPORT, 'kmeans': self.REPORT, 'gmm': None}
        assert validate_document(document, 'comparison') is document
        with pytest.raises(SchemaViolationError):
            validate_document({'kmeans': self.REPORT, 'gmm': None}, 'comparison')

    def test_recipe_shapes(self):
        validate_document({'distribution': 'exponential:1', 'n': 10, 'seed': 0}, 'recipe')
        with pytest.raises(SchemaViolationError):
            validate_document({'distribution': 'cauchy:0,1', 'n': 10, 'seed': 0}, 'recipe')

    def test_mixture_copula_shapes(self):
        marginal = {'a': 0.0, 'b': 1.0, 'N': 1, 'lambda': [1.0, 1.0, 1.0]}
        component = {'pi': 1.0, 'copula': {'family': 'clayton', 'theta': 2.0}, 'marginals': [marginal, marginal]}
        document = {
            'K': 1, 'components': [component], 'loglik_trace': [-1.0], 'n_iter': 1, 'converged': True,
            'seed': 0, 'copula_trace': [[[0.0, 1.0]]],
            'config': {
                'seed': 0, 'families': ['clayton'], 'K': 1, 'init': 'random', 'tol': 1e-5, 'max_iter': 10,
                'restarts': 1, 'marginal_method': 'bshqi', 'bounds': {'clayton': [1e-4, 50.0]},
            },
        }
        validate_document(document, 'mixture_model')

        component['copula'] = {'family': 'gaussian', 'theta': 0.5}
        with pytest.raises(SchemaViolationError):
            validate_document(document, 'mixture_model')
