"""
Utilities Package

This package contains the decorators, file helpers and input validators
shared by the CLI commands.
"""

from .decorators import cli_errors, timing_decorator
from .validators import load_settings, parse_bins

__all__ = [
    'cli_errors',
    'timing_decorator',
    'load_settings',
    'parse_bins',
]
