"""
Gendata Blueprint

This blueprint provides the ``gendata`` command writing the labeled
synthetic clustering datasets (x1 to x4) and univariate test samples.
"""

from flask import Blueprint

# Commands are attached to the application's CLI group
bp = Blueprint('gendata', __name__, cli_group=None)

from app.blueprints.gendata import commands
