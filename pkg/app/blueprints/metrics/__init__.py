"""
Metrics Blueprint

This blueprint provides the ``metrics`` command scoring an existing labeling
of a dataset without refitting.
"""

from flask import Blueprint

bp = Blueprint('metrics', __name__, cli_group=None)

from app.blueprints.metrics import commands
