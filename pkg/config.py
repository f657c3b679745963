import os
import logging
from dotenv import load_dotenv
from smoothcal.constants import MAX_TOEPLITZ_N

# Determine the base directory of the project
basedir = os.path.abspath(os.path.dirname(__file__))

# Load environment variables from .env file
load_dotenv(os.path.join(basedir, '.env'))


def _env_int(name, default):
    value = os.environ.get(name)
    if value is None or value.strip() == '':
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {value!r}") from None


class Config:
    """Base configuration settings."""
    LOG_LEVEL = os.environ.get('SMOOTHCAL_LOG_LEVEL', 'INFO').upper()

    # Thread pool used for replications
    WORKERS = _env_int('SMOOTHCAL_WORKERS', 4)

    OUTPUT_DIR = os.environ.get('SMOOTHCAL_OUTPUT_DIR', os.path.join(basedir, 'results'))

    # Largest stationary sequence simulated by Cholesky
    MAX_TOEPLITZ_N = _env_int('SMOOTHCAL_MAX_TOEPLITZ_N', MAX_TOEPLITZ_N)

    @staticmethod
    def init_app(app):
        app.logger.setLevel(getattr(logging, app.config['LOG_LEVEL'], logging.INFO))


class DevelopmentConfig(Config):
    """Development-specific configuration."""
    DEBUG = True
    LOG_LEVEL = 'DEBUG'


class TestingConfig(Config):
    """Testing-specific configuration."""
    TESTING = True
    LOG_LEVEL = 'WARNING'
    WORKERS = 1


class ProductionConfig(Config):
    """Production-specific configuration."""

    @classmethod
    def init_app(cls, app):
        Config.init_app(app)
        # Flask's stderr handler, with timestamps
        from flask.logging import default_handler
        default_handler.setLevel(logging.INFO)
        default_handler.setFormatter(logging.Formatter('%(asctime)s %(levelname)s %(name)s: %(message)s'))


# Dictionary mapping config names to their classes
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': ProductionConfig
}
