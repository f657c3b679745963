import json

import numpy as np
import pytest
from click.testing import CliRunner

from smoothcal import create_app
from smoothcal.models import CoefficientModel


@pytest.fixture
def app():
    """Application configured for testing (single worker, WARNING logging)."""
    return create_app('testing')


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cli_runner():
    return CliRunner()


@pytest.fixture
def density_model():
    """f = 1 + sum_{l<=10} 0.3 2^-l phi_{2l}."""
    coeffs = np.zeros(21)
    coeffs[0] = 1.0
    for l in range(1, 11):
        coeffs[2 * l - 1] = 0.3 * 2.0 ** -l
    return CoefficientModel(coeffs)


@pytest.fixture
def write_config(tmp_path):
    """Write a config document to tmp_path and return its path."""
    def _write(document, name='config.json'):
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding='utf-8')
        return str(path)
    return _write
