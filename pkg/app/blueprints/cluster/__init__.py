"""
Cluster Blueprint

This blueprint provides the ``cluster`` command running the copula-mixture
EM on a dataset CSV and writing the model, labels, quality report and the
per-cluster copula selection table.
"""

from flask import Blueprint

bp = Blueprint('cluster', __name__, cli_group=None)

from app.blueprints.cluster import commands
