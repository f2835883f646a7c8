"""
copmix Application Entry Point

This is the main entry point for the copmix toolkit using the application
factory pattern. Commands run through the Flask CLI:

    FLASK_APP=run.py flask gendata x1 --seed 7 -o x1.csv
    FLASK_APP=run.py flask cluster x1.csv -k 4

or directly with ``python run.py gendata x1 --seed 7 -o x1.csv``.
"""

import os

from flask.cli import FlaskGroup

from app import create_app

# Create application instance using the factory pattern
# The configuration is determined by the FLASK_ENV environment variable
config_name = os.environ.get('FLASK_ENV', 'development')
app = create_app(config_name)


@app.shell_context_processor
def make_shell_context():
    """Make the services available in ``flask shell``."""
    from app import services
    return {name: getattr(services, name) for name in services.__all__}


if __name__ == '__main__':
    FlaskGroup(create_app=lambda: app).main(prog_name='copmix')
