"""
Configuration Management for the copmix Application

This module provides environment-specific configuration classes for the
density estimation and copula-mixture clustering toolkit. Every numerical
knob used by the services has a default here; the CLI layers a JSON config
file and command-line flags on top of the selected class.
"""

import os


class Config:
    """
    Base configuration class containing common settings.

    Environment-specific classes inherit from this base class and override
    logging and reproducibility settings as needed.
    """

    # Reproducibility
    SEED = int(os.environ.get('COPMIX_SEED', 0))

    # Mesh and empirical CDF
    BINS_RULE = 'rice'
    N_BINS = None
    ECDF_PADDING = 0.0

    # Copula estimation
    PSEUDO_OBS_EPS = 1e-10
    DENSITY_FLOOR = 1e-300
    COPULA_FAMILIES = ('gaussian', 'clayton', 'gumbel', 'frank')
    COPULA_BOUNDS = {
        'clayton': (1e-4, 50.0),
        'gumbel': (1.0 + 1e-4, 50.0),
        'frank': (1e-4, 50.0),
    }
    FD_STEP = 1e-6

    # Expectation-maximization
    EM_K = 2
    EM_INIT = 'random'
    EM_RESTARTS = 5
    EM_TOL = 1e-4
    EM_MAX_ITER = 200
    EM_RESCUE_ATTEMPTS = 3
    MARGINAL_METHOD = 'bshqi'

    # Goodness-of-fit experiments
    GOF_REPETITIONS = 20
    ISE_GRID_POINTS = 2048
    PLOT_GRID_POINTS = 512

    # Logging Configuration
    LOG_LEVEL = 'INFO'
    LOG_FILE = None  # Override in environment-specific configs

    @staticmethod
    def init_app(app):
        """
        Initialize application-specific configuration.

        Args:
            app (Flask): The Flask application instance
        """
        pass


class DevelopmentConfig(Config):
    """
    Development environment configuration.

    Verbose logging with a JSON-lines log file under logs/.
    """

    DEBUG = True

    LOG_LEVEL = 'DEBUG'
    LOG_FILE = 'logs/development.log'

    @staticmethod
    def init_app(app):
        """Initialize development-specific configuration."""
        Config.init_app(app)
        os.makedirs('logs', exist_ok=True)


class TestingConfig(Config):
    """
    Testing environment configuration.

    Fewer repetitions and restarts keep the unit suite fast; the functional
    reproduction tests set their own values explicitly.
    """

    TESTING = True
    DEBUG = True

    GOF_REPETITIONS = 3
    EM_RESTARTS = 2
    EM_MAX_ITER = 50

    # Logging Configuration for Testing
    LOG_LEVEL = 'WARNING'
    LOG_FILE = None  # No file logging during tests

    @staticmethod
    def init_app(app):
        """Initialize testing-specific configuration."""
        Config.init_app(app)


class ProductionConfig(Config):
    """
    Production environment configuration.

    Used for batch reproduction runs; warnings also go to syslog.
    """

    DEBUG = False

    LOG_LEVEL = 'INFO'
    LOG_FILE = 'logs/production.log'

    @staticmethod
    def init_app(app):
        """Initialize production-specific configuration."""
        Config.init_app(app)
        os.makedirs('logs', exist_ok=True)

        import logging
        from logging.handlers import SysLogHandler

        try:
            syslog_handler = SysLogHandler()
        except OSError:
            return
        syslog_handler.setLevel(logging.WARNING)
        app.logger.addHandler(syslog_handler)


# Configuration dictionary for easy access
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': DevelopmentConfig
}
