"""
Input Validators

Small parsers for command-line values that do not map onto a click type.
"""

import json
import os

from flask import Config, current_app

from app.exceptions import ValidationError
from app.models.mesh import BinsRule


def parse_bins(value):
    """
    Parse ``--bins``: a rule name (rice, cuberoot) or an explicit subinterval count.

    Returns:
        tuple: (BinsRule, n_bins or None); (None, None) when value is None
    """
    if value is None:
        return None, None
    text = str(value).strip()
    if text.isdigit():
        return BinsRule.EXPLICIT, int(text)
    rule = BinsRule.parse(text)
    if rule is BinsRule.EXPLICIT:
        raise ValidationError('give the explicit bin count as a number, e.g. --bins 64')
    return rule, None


def load_settings(config_path=None):
    """
    Application settings with an optional JSON config file layered on top.

    The application config itself is left untouched.

    Args:
        config_path (str, optional): JSON file of upper-case configuration keys

    Returns:
        flask.Config: Merged settings
    """
    settings = Config(current_app.root_path, dict(current_app.config))
    if config_path:
        try:
            settings.from_file(os.path.abspath(config_path), load=json.load)
        except OSError:
            raise ValidationError(f"config file '{config_path}' cannot be read") from None
        except json.JSONDecodeError as e:
            raise ValidationError(f"config file '{config_path}' is not valid JSON: {e}") from None
    return settings
