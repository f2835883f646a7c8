"""
Custom Decorators

This module contains the decorators shared by the CLI commands: execution
timing and the translation of domain exceptions into click errors with the
documented exit codes (2 for usage and validation errors, 1 for runtime
failures).
"""

import logging
import time
from functools import wraps

import click
from flask import g, has_app_context

from app.exceptions import CopmixError, ValidationError

logger = logging.getLogger('copmix.timing')


def timing_decorator(log_level=logging.INFO, include_args=False):
    """
    Decorator to measure and log function execution time.

    Args:
        log_level (int): Logging level for timing information
        include_args (bool): Whether to include function arguments in log

    Returns:
        function: Decorator function

    Example:
        @timing_decorator(log_level=logging.DEBUG)
        def fit_density(values):
            return DensityService.fit(values)
    """
    def decorator(f):
        @wraps(f)
        def decorated_function(*args, **kwargs):
            start_time = time.perf_counter()

            try:
                result = f(*args, **kwargs)
            except Exception as e:
                execution_time = time.perf_counter() - start_time
                logger.error(
                    f"Function {f.__module__}.{f.__name__} failed after {execution_time:.4f}s: {str(e)}"
                )
                raise

            execution_time = time.perf_counter() - start_time
            log_msg = f"Function {f.__module__}.{f.__name__} executed in {execution_time:.4f}s"
            if include_args and (args or kwargs):
                args_info = f"args={args[:3]}{'...' if len(args) > 3 else ''}"
                kwargs_info = f"kwargs={dict(list(kwargs.items())[:3])}{'...' if len(kwargs) > 3 else ''}"
                log_msg += f" with {args_info}, {kwargs_info}"
            logger.log(log_level, log_msg)

            # Reported in the run_end event of the enclosing run
            if has_app_context() and hasattr(g, 'function_timings'):
                g.function_timings[f.__name__] = execution_time

            return result

        return decorated_function
    return decorator


def cli_errors(f):
    """
    Translate domain exceptions raised by a command into click errors.

    ValidationError becomes a UsageError (exit code 2); any other
    CopmixError becomes a ClickException (exit code 1).
    """
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationError as e:
            logger.warning(f'Command {f.__name__} rejected its input: {e}')
            raise click.UsageError(str(e)) from e
        except CopmixError as e:
            logger.error(f'Command {f.__name__} failed: {e}')
            raise click.ClickException(str(e)) from e

    return decorated_function
