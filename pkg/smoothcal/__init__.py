"""
smoothcal: adaptive estimation of the smoothness index rho(N) for projection
estimators in regression, density and spectral-density problems.
"""
from flask import Flask

__version__ = '1.0.0'


def create_app(config_name='default'):
    """Application factory function."""
    from config import config

    if config_name not in config:
        raise KeyError(f"unknown configuration {config_name!r}; choose from {', '.join(sorted(config))}")
    app = Flask(__name__)

    # Load configuration from the specified config object
    app.config.from_object(config[config_name])
    config[config_name].init_app(app)

    app.logger.debug(f"Created smoothcal application with '{config_name}' configuration")
    return app
