"""
Middleware Package

This package contains the cross-cutting run logging components: the
structured JSON formatter, the run lifecycle tracker and the performance
and event logging helpers.
"""

from .logging import RunLoggingMiddleware, get_run_id, log_performance, log_run_event

__all__ = [
    'RunLoggingMiddleware',
    'log_performance',
    'log_run_event',
    'get_run_id',
]
