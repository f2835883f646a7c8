"""
Logging Middleware

This module implements structured logging for copmix runs. Every CLI command
invocation is tracked as a run with its own id, start/end events and timing,
and the numerical services log through the ``copmix`` logger hierarchy using
the JSON formatter defined here.
"""

import json
import logging
import os
import time
import uuid
from contextlib import contextmanager
from datetime import datetime
from functools import wraps

from flask import g, has_app_context


ROOT_LOGGER = 'copmix'


class RunLoggingMiddleware:
    """
    Extension-style object handling run lifecycle logging with timing information.

    The Flask request hooks have no counterpart for CLI commands, so commands
    wrap their body in ``track_run`` instead.
    """

    def __init__(self, app=None):
        """
        Initialize the logging middleware.

        Args:
            app (Flask, optional): Flask application instance
        """
        self.app = app
        if app is not None:
            self.init_app(app)

    def init_app(self, app):
        """
        Initialize the middleware with a Flask application.

        Args:
            app (Flask): Flask application instance
        """
        self._configure_logging(app)
        app.extensions['run_logging'] = self
        self.app = app

    def _configure_logging(self, app):
        """
        Configure the ``copmix`` logger with console, file and error handlers.

        Args:
            app (Flask): Flask application instance
        """
        logger = logging.getLogger(ROOT_LOGGER)
        logger.setLevel(logging.DEBUG)

        level = getattr(logging, str(app.config.get('LOG_LEVEL', 'INFO')).upper(), logging.INFO)

        # Prevent duplicate handlers when several apps are created (tests)
        if logger.handlers:
            for handler in logger.handlers:
                if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
                    handler.setLevel(level)
            return

        formatter = StructuredFormatter()

        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        log_file = app.config.get('LOG_FILE')
        if log_file:
            log_dir = os.path.dirname(log_file) or '.'
            os.makedirs(log_dir, exist_ok=True)

            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

            error_handler = logging.FileHandler(os.path.join(log_dir, 'errors.log'))
            error_handler.setLevel(logging.ERROR)
            error_handler.setFormatter(formatter)
            logger.addHandler(error_handler)


    @contextmanager
    def track_run(self, command, **params):
        """
        Track one command invocation as a run.

        Args:
            command (str): Name of the CLI command
            **params: Parameters recorded with the start event

        Yields:
            str: The generated run id
        """
        run_id = str(uuid.uuid4())
        start_time = time.time()
        if has_app_context():
            g.run_id = run_id
            g.run_start = start_time
            g.function_timings = {}

        self._log_run_start(run_id, command, params)
        try:
            yield run_id
        except BaseException as exc:
            self._log_run_error(run_id, command, exc, time.time() - start_time)
            raise
        else:
            timings = getattr(g, 'function_timings', None) if has_app_context() else None
            self._log_run_end(run_id, command, time.time() - start_time, timings)
        finally:
            if has_app_context():
                for name in ('run_id', 'run_start', 'function_timings'):
                    g.pop(name, None)

    def _log_run_start(self, run_id, command, params):
        """Log the start of a run with its parameters."""
        logger = logging.getLogger(f'{ROOT_LOGGER}.runs')
        run_data = {
            'event': 'run_start',
            'run_id': run_id,
            'command': command,
            'timestamp': datetime.utcnow().isoformat(),
            'params': params,
        }
        logger.info('Run started', extra={'structured_data': run_data})

    def _log_run_end(self, run_id, command, duration, timings=None):
        """Log the successful completion of a run with its duration and any timed steps."""
        logger = logging.getLogger(f'{ROOT_LOGGER}.runs')
        run_data = {
            'event': 'run_end',
            'run_id': run_id,
            'command': command,
            'timestamp': datetime.utcnow().isoformat(),
            'duration_ms': round(duration * 1000, 2),
        }
        if timings:
            run_data['timings_ms'] = {name: round(seconds * 1000, 2) for name, seconds in timings.items()}
        logger.info('Run completed successfully', extra={'structured_data': run_data})

    def _log_run_error(self, run_id, command, exception, duration):
        """Log a failed run; click's normal exit is not a failure."""
        logger = logging.getLogger(f'{ROOT_LOGGER}.runs')
        if isinstance(exception, SystemExit) and not exception.code:
            return
        error_data = {
            'event': 'run_error',
            'run_id': run_id,
            'command': command,
            'timestamp': datetime.utcnow().isoformat(),
            'exception_type': type(exception).__name__,
            'exception_message': str(exception),
            'duration_ms': round(duration * 1000, 2),
        }
        logger.error('Run failed with exception', extra={'structured_data': error_data})


class StructuredFormatter(logging.Formatter):
    """
    JSON-lines formatter for the ``copmix`` loggers.

    Each record is stamped with the id of the run it belongs to, so the
    lines of one ``cluster`` or ``density`` invocation can be grepped out of
    a shared log file. ``structured_data`` extras are merged at top level.
    """

    def format(self, record):
        log_entry = {
            'timestamp': datetime.utcnow().isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'run_id': get_run_id(),
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }

        if hasattr(record, 'structured_data'):
            log_entry.update(record.structured_data)

        if record.exc_info:
            log_entry['exception'] = self.formatException(record.exc_info)

        return json.dumps(log_entry, default=str)


def log_performance(threshold_ms=1000):
    """
    Warn when a numerical step outlives its time budget.

    Used on the EM fit and the goodness-of-fit experiment; the warning goes to
    ``copmix.performance`` with the elapsed and allowed milliseconds.

    Args:
        threshold_ms (int): Budget of one call in milliseconds
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            started = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed_ms = (time.perf_counter() - started) * 1000
                if elapsed_ms > threshold_ms:
                    logging.getLogger(f'{ROOT_LOGGER}.performance').warning(
                        f'{func.__qualname__} ran {elapsed_ms:.0f}ms (budget {threshold_ms}ms)',
                        extra={'structured_data': {
                            'event': 'slow_step',
                            'function': func.__name__,
                            'elapsed_ms': round(elapsed_ms, 2),
                            'threshold_ms': threshold_ms,
                        }},
                    )

        return wrapper
    return decorator


def get_run_id():
    """
    Get the current run ID from Flask's g object.

    Returns:
        str: Current run ID or 'unknown' outside a tracked run
    """
    if not has_app_context():
        return 'unknown'
    return getattr(g, 'run_id', 'unknown')


def log_run_event(event, level=logging.INFO, **details):
    """
    Log a structured event inside the current run.

    Args:
        event (str): Short event name, e.g. ``em_iteration``
        level (int): Logging level
        **details: Event payload
    """
    logger = logging.getLogger(f'{ROOT_LOGGER}.events')
    event_data = {
        'event': event,
        'run_id': get_run_id(),
        'timestamp': datetime.utcnow().isoformat(),
    }
    if details:
        event_data['details'] = details

    logger.log(level, f'Run event: {event}', extra={'structured_data': event_data})
