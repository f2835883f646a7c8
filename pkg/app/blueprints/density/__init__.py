"""
Density Blueprint

This blueprint provides the ``density`` command: BSHQI fitting of one data
column, the optional kernel baseline, goodness-of-fit testing against a known
distribution and the plot-data dump.
"""

from flask import Blueprint

bp = Blueprint('density', __name__, cli_group=None)

from app.blueprints.density import commands
