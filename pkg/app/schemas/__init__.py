"""
Output Schemas

JSON Schemas (draft-07) of every document the CLI writes. Each schema lives
next to this module as ``<name>.schema.json``:

    recipe             gendata's ``.recipe.json``
    density_model      density's ``.model.json``
    gof_report         density's ``.gof.json``
    mixture_model      cluster's ``.model.json``
    clustering_report  ``.report.json`` of cluster and metrics
    comparison         ``.compare.json`` of cluster and metrics
"""

import json
import os
from functools import lru_cache

from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from app.exceptions import SchemaViolationError, ValidationError

SCHEMA_DIR = os.path.dirname(os.path.abspath(__file__))

SCHEMA_NAMES = (
    'recipe',
    'density_model',
    'gof_report',
    'mixture_model',
    'clustering_report',
    'comparison',
)


@lru_cache(maxsize=None)
def load_schema(name):
    """Parsed schema document by name."""
    if name not in SCHEMA_NAMES:
        raise ValidationError(f"unknown output schema '{name}'")
    with open(os.path.join(SCHEMA_DIR, f'{name}.schema.json')) as handle:
        schema = json.load(handle)
    Draft7Validator.check_schema(schema)
    return schema


def validate_document(document, name):
    """
    Check a JSON-ready document against a named schema.

    Args:
        document: Parsed JSON document
        name (str): One of SCHEMA_NAMES

    Raises:
        SchemaViolationError: On the most relevant validation error
    """
    error = best_match(Draft7Validator(load_schema(name)).iter_errors(document))
    if error is not None:
        path = '/'.join(str(part) for part in error.absolute_path) or '<root>'
        raise SchemaViolationError(name, path, error.message)
    return document
