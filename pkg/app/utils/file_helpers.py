"""
File Helpers

This module contains utility functions for reading and writing the CSV and
JSON artifacts of the CLI: datasets (header ``x1,...,xD[,label]``), label
files, plot-data dumps and JSON documents. Read and write failures surface
as ValidationError so commands exit with the usage-error code.
"""

import json
import os

import numpy as np
import pandas as pd

from app.exceptions import ValidationError
from app.models.dataset import LabeledDataset
from app.schemas import validate_document

LABEL_COLUMN = 'label'


def sidecar_path(path, suffix):
    """
    Path next to ``path`` with its extension replaced.

    Example:
        sidecar_path('out/x1.csv', '.recipe.json') -> 'out/x1.recipe.json'
    """
    root, _ = os.path.splitext(path)
    return root + suffix


def output_prefix(in_path, out=None):
    """Prefix for a command's outputs: ``--out`` when given, else the input path without extension."""
    if out:
        return out[:-4] if out.lower().endswith('.csv') else out
    return os.path.splitext(in_path)[0]


def ensure_writable(path):
    """
    Check that a file can be created at ``path``.

    Raises:
        ValidationError: The parent directory is missing or not writable
    """
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        raise ValidationError(f"cannot write to '{path}': directory is missing or not writable")
    return path


def _read_frame(path):
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError:
        raise ValidationError(f"input file '{path}' does not exist") from None
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ValidationError(f"malformed CSV '{path}': {e}") from None
    if frame.empty or frame.shape[1] == 0:
        raise ValidationError(f"malformed CSV '{path}': no data rows")
    return frame


def _numeric(frame, columns, path):
    try:
        values = frame[columns].apply(pd.to_numeric, errors='raise').to_numpy(dtype=float)
    except (ValueError, TypeError) as e:
        raise ValidationError(f"malformed CSV '{path}': non-numeric value ({e})") from None
    if not np.all(np.isfinite(values)):
        raise ValidationError(f"malformed CSV '{path}': missing or non-finite values")
    return values


def read_dataset(path):
    """
    Read a dataset CSV with an optional trailing ``label`` column.

    Returns:
        LabeledDataset: Observations and labels (None when absent)
    """
    frame = _read_frame(path)
    features = [column for column in frame.columns if column != LABEL_COLUMN]
    if not features:
        raise ValidationError(f"malformed CSV '{path}': no feature columns")
    X = _numeric(frame, features, path)
    labels = None
    if LABEL_COLUMN in frame.columns:
        labels = _numeric(frame, [LABEL_COLUMN], path).ravel()
        if not np.all(labels == np.round(labels)):
            raise ValidationError(f"malformed CSV '{path}': labels must be integers")
        labels = labels.astype(int)
    return LabeledDataset(X=X, labels=labels)


def read_column(path, column=None):
    """Read one numeric column (the first feature column by default)."""
    frame = _read_frame(path)
    if column is None:
        features = [name for name in frame.columns if name != LABEL_COLUMN]
        if not features:
            raise ValidationError(f"malformed CSV '{path}': no feature columns")
        column = features[0]
    elif column not in frame.columns:
        raise ValidationError(f"column '{column}' not found in '{path}'")
    return _numeric(frame, [column], path).ravel()


def read_labels(path):
    """Read the ``label`` column of a labels CSV (or its only column)."""
    frame = _read_frame(path)
    column = LABEL_COLUMN if LABEL_COLUMN in frame.columns else frame.columns[0]
    return _numeric(frame, [column], path).ravel().astype(int)


def _write_frame(frame, path, float_format=None):
    ensure_writable(path)
    try:
        frame.to_csv(path, index=False, float_format=float_format)
    except OSError as e:
        raise ValidationError(f"cannot write to '{path}': {e}") from None
    return path


def write_dataset(dataset, path):
    """Write observations (``x1..xD``) and, when present, the ``label`` column."""
    frame = pd.DataFrame(dataset.X, columns=[f'x{j + 1}' for j in range(dataset.dim)])
    if dataset.has_labels:
        frame[LABEL_COLUMN] = dataset.labels
    return _write_frame(frame, path, float_format='%.17g')


def write_labels(labels, path):
    return _write_frame(pd.DataFrame({LABEL_COLUMN: np.asarray(labels, dtype=int)}), path)


def write_table(columns, path):
    """Write a mapping of column name -> vector as CSV with full float precision."""
    return _write_frame(pd.DataFrame(columns), path, float_format='%.17g')


def write_json(document, path, schema=None):
    """
    Write a JSON document (dict or model with ``to_dict``).

    With ``schema``, the serialized text is checked against that output
    schema before anything touches the disk; a mismatch raises
    SchemaViolationError.
    """
    if hasattr(document, 'to_dict'):
        document = document.to_dict()
    text = json.dumps(document, indent=2)
    if schema is not None:
        validate_document(json.loads(text), schema)
    ensure_writable(path)
    try:
        with open(path, 'w') as handle:
            handle.write(text)
    except OSError as e:
        raise ValidationError(f"cannot write to '{path}': {e}") from None
    return path


def read_json(path):
    try:
        with open(path) as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise ValidationError(f"input file '{path}' does not exist") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed JSON '{path}': {e}") from None
