"""
Blueprints Package

This package contains the Flask blueprints of the application. Each one
contributes a command to the application's CLI group instead of routes:
``gendata``, ``density``, ``cluster`` and ``metrics``.
"""
