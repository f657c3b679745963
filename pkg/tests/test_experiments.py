import logging
import os

import numpy as np
import pytest
from flask import Flask

import run
from smoothcal import create_app
from smoothcal.constants import SCHEMA_TAG
from smoothcal.experiments import ExperimentRunner
from smoothcal.experiments.runners import REPORT_ONLY, report_only_rows
from smoothcal.forms import parse_config
from smoothcal.models import Problem, QuasiPower
from smoothcal.utils import read_csv, read_rho_hat_csv, write_csv


@pytest.fixture(autouse=True)
def testing_config(monkeypatch):
    monkeypatch.setattr(run, 'config_name', 'testing')


@pytest.fixture
def small_density(tmp_path):
    return {
        'problem': 'density',
        'model': {'type': 'coefficients', 'coeffs': [1.0, 0.3, 0.0, 0.15, 0.0, 0.075]},
        'n': 500,
        'K': 16,
        'N_range': [1, 8],
        'replications': 3,
        'seed': 1,
        'output': str(tmp_path / 'default-out'),
        'tailcheck': {'t_grid': [0.5, 1.0, 2.0], 'N': 4},
    }


def invoke(cli_runner, *args):
    return cli_runner.invoke(run.cli, [str(a) for a in args])


def read_bytes(path):
    with open(path, 'rb') as handle:
        return handle.read()


class TestSimulateCommand:
    def test_writes_all_outputs(self, cli_runner, write_config, small_density, tmp_path):
        out = tmp_path / 'sim'
        result = invoke(cli_runner, 'simulate', '--config', write_config(small_density), '--out', out)
        assert result.exit_code == 0, result.output
        for name in ('trajectories', 'summary', 'adaptive', 'rho_hat'):
            assert read_bytes(out / f'{name}.csv').decode().startswith(SCHEMA_TAG + '\n')
        _, header, rows = read_csv(str(out / 'trajectories.csv'))
        assert len(rows) == 3 * 8
        assert {'replication', 'N', 'rho_hat_raw', 'ci_lo', 'ci_hi', 'covered'} <= set(header)
        trajectory = read_rho_hat_csv(str(out / 'rho_hat.csv'))
        assert trajectory.n == 500 and trajectory.problem is Problem.B
        np.testing.assert_array_equal(trajectory.N, np.arange(1, 9))

    def test_uses_config_output_by_default(self, cli_runner, write_config, small_density):
        result = invoke(cli_runner, 'simulate', '--config', write_config(small_density))
        assert result.exit_code == 0, result.output
        assert os.path.exists(os.path.join(small_density['output'], 'summary.csv'))

    def test_output_is_reproducible(self, cli_runner, write_config, small_density, tmp_path):
        path = write_config(small_density)
        for name in ('a', 'b'):
            assert invoke(cli_runner, 'simulate', '--config', path, '--out', tmp_path / name).exit_code == 0
        for name in ('trajectories', 'summary', 'adaptive', 'rho_hat'):
            assert read_bytes(tmp_path / 'a' / f'{name}.csv') == read_bytes(tmp_path / 'b' / f'{name}.csv')

    def test_seed_override(self, cli_runner, write_config, small_density, tmp_path):
        path = write_config(small_density)
        invoke(cli_runner, 'simulate', '--config', path, '--out', tmp_path / 'a')
        invoke(cli_runner, '--seed', 2, 'simulate', '--config', path, '--out', tmp_path / 'b')
        assert read_bytes(tmp_path / 'a' / 'trajectories.csv') != read_bytes(tmp_path / 'b' / 'trajectories.csv')

    def test_reps_override(self, cli_runner, write_config, small_density, tmp_path):
        result = invoke(cli_runner, '--reps', 2, '--quiet', 'simulate', '--config', write_config(small_density),
                        '--out', tmp_path / 'sim')
        assert result.exit_code == 0
        assert result.output == ''
        _, _, rows = read_csv(str(tmp_path / 'sim' / 'adaptive.csv'))
        assert len(rows) == 2

    @pytest.mark.parametrize('document', [
        {'problem': 'spectral', 'model': {'type': 'coefficients', 'coeffs': [1.0, 0.0, 0.0, 0.3]},
         'n': 64, 'K': 16, 'replications': 2},
        {'problem': 'regression', 'model': {'type': 'quasi-power', 'c1': 1.0, 'alpha': 2.0, 'K': 48},
         'noise': {'kind': 'uniform', 'scale': 0.5}, 'n': 128, 'K': 32, 'replications': 2},
    ])
    def test_other_problems(self, cli_runner, write_config, tmp_path, document):
        result = invoke(cli_runner, 'simulate', '--config', write_config(document), '--out', tmp_path / 'sim')
        assert result.exit_code == 0, result.output

    def test_invalid_config_exits_2(self, cli_runner, write_config, small_density):
        small_density['alpha'] = 2.0
        result = invoke(cli_runner, 'simulate', '--config', write_config(small_density))
        assert result.exit_code == 2
        assert 'Error:' in result.output and 'alpha' in result.output

    def test_missing_config_exits_4(self, cli_runner, tmp_path):
        result = invoke(cli_runner, 'simulate', '--config', tmp_path / 'absent.json')
        assert result.exit_code == 4


class TestApplicationFactory:
    def test_testing_app_is_flask(self, app):
        assert isinstance(app, Flask)
        assert app.config['TESTING'] is True
        assert app.config['WORKERS'] == 1
        assert app.logger.name == 'smoothcal'
        assert app.logger.level == logging.WARNING

    def test_development_logs_debug(self):
        assert create_app('development').logger.level == logging.DEBUG

    def test_unknown_configuration(self):
        with pytest.raises(KeyError):
            create_app('staging')

    def test_cli_builds_the_app_from_config_name(self, cli_runner, monkeypatch, write_config, small_density, tmp_path):
        built = []
        monkeypatch.setattr(run, 'create_app', lambda name: built.append(name) or create_app(name))
        result = invoke(cli_runner, 'simulate', '--config', write_config(small_density), '--out', tmp_path / 'sim')
        assert result.exit_code == 0, result.output
        assert built == ['testing']


def test_thread_pool_matches_serial_run(app, small_density, tmp_path):
    config = parse_config(small_density, {'replications': 6})
    serial = ExperimentRunner(app).run_simulate(config, str(tmp_path / 'serial'))
    app.config['WORKERS'] = 4
    pooled = ExperimentRunner(app).run_simulate(config, str(tmp_path / 'pooled'))
    for name in serial:
        assert read_bytes(serial[name]) == read_bytes(pooled[name])


class TestFitCommand:
    @pytest.fixture
    def trajectory_file(self, tmp_path):
        truth = QuasiPower(0.8, 1.5, 0.4)
        Ns = np.arange(1, 25)
        return write_csv(str(tmp_path / 'rho_hat.csv'), ('N', 'rho_hat'), zip(Ns, truth.rho(Ns)), {'n': 1000})

    def test_fits_trajectory(self, cli_runner, trajectory_file, tmp_path):
        result = invoke(cli_runner, 'fit', '--input', trajectory_file, '--family', 'quasi-power',
                        '--out', tmp_path / 'fit')
        assert result.exit_code == 0, result.output
        _, header, rows = read_csv(str(tmp_path / 'fit' / 'fit.csv'))
        row = dict(zip(header, rows[0][1]))
        assert float(row['alpha']) == pytest.approx(1.5, rel=1e-6)
        assert row['converged'] == '1'
        _, header, rows = read_csv(str(tmp_path / 'fit' / 'curve.csv'))
        assert header == ['N', 'rho_hat', 'fitted'] and len(rows) == 24

    def test_theta_weighting(self, cli_runner, trajectory_file, tmp_path):
        result = invoke(cli_runner, 'fit', '--input', trajectory_file, '--weighting', 'theta',
                        '--out', tmp_path / 'fit')
        assert result.exit_code == 0, result.output

    def test_fits_simulated_trajectory(self, cli_runner, write_config, small_density, tmp_path):
        small_density.update(n=20000, K=64, N_range=[1, 12], replications=5)
        small_density['model']['coeffs'] = [1.0] + [0.1 / k ** 2 for k in range(1, 40)]
        assert invoke(cli_runner, 'simulate', '--config', write_config(small_density),
                      '--out', tmp_path / 'sim').exit_code == 0
        result = invoke(cli_runner, 'fit', '--input', tmp_path / 'sim' / 'rho_hat.csv', '--out', tmp_path / 'fit')
        assert result.exit_code in (0, 3)
        if result.exit_code == 3:
            assert 'numeric failure' in result.output

    def test_malformed_csv_exits_2_with_line(self, cli_runner, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('N,rho_hat\n1,0.5\ntwo,0.1\n', encoding='utf-8')
        result = invoke(cli_runner, 'fit', '--input', path, '--out', tmp_path / 'fit')
        assert result.exit_code == 2
        assert 'line 3' in result.output

    def test_too_few_points_exits_3(self, cli_runner, tmp_path):
        path = write_csv(str(tmp_path / 'short.csv'), ('N', 'rho_hat'), [(1, 0.5), (2, 0.2), (3, 0.1)])
        result = invoke(cli_runner, 'fit', '--input', path, '--out', tmp_path / 'fit')
        assert result.exit_code == 3


class TestTailcheckCommand:
    def test_writes_tables(self, cli_runner, write_config, small_density, tmp_path):
        small_density['replications'] = 40
        result = invoke(cli_runner, 'tailcheck', '--config', write_config(small_density), '--out', tmp_path / 'tc')
        assert result.exit_code == 0, result.output
        _, header, rows = read_csv(str(tmp_path / 'tc' / 'tailcheck.csv'))
        assert header == ['problem', 't', 'empirical_tail', 'mc_se', 'gaussian_bound', 'bphi_bound']
        assert [float(cells[1]) for _, cells in rows] == [0.5, 1.0, 2.0]
        for _, cells in rows:
            assert 0.0 <= float(cells[2]) <= 1.0
            assert 0.0 < float(cells[5]) <= 2.0
        _, header, rows = read_csv(str(tmp_path / 'tc' / 'report_only.csv'))
        assert all(cells[header.index('flag')] == REPORT_ONLY for _, cells in rows)


def test_report_only_rows():
    rows = report_only_rows()
    psi_rows = [row for row in rows if row['check'] == 'psi_phi2_over_sqrt_p']
    assert all(row['holds'] for row in psi_rows)
    assert all(row['flag'] == REPORT_ONLY for row in rows)


def test_spectral_truth_is_the_lag_sequence(app):
    config = parse_config({'problem': 'C', 'model': {'type': 'coefficients', 'coeffs': [1.0, 0.5, 0.2, 0.25]},
                           'n': 64, 'K': 8, 'tailcheck': {'N': 4}})
    truth = ExperimentRunner.truth_for(config)
    np.testing.assert_allclose(truth.coeffs[:3], [np.sqrt(2.0), 0.5, 0.25])
    assert ExperimentRunner.sigma_sq_for(config) == pytest.approx(2.0 + 0.25 + 0.04 + 0.0625)


def test_parametric_truth_uses_simulated_coefficients(app, tmp_path):
    config = parse_config({'problem': 'regression', 'n': 256, 'K': 32, 'N_range': [1, 8], 'replications': 2,
                           'model': {'type': 'quasi-power', 'c1': 2.0, 'alpha': 1.5, 'gamma': 0.5, 'K': 64}})
    assert config.model.tail_model is not None
    assert ExperimentRunner.truth_for(config).tail_model is None
    c = np.asarray(config.model.coeffs)
    paths = ExperimentRunner(app).run_simulate(config, str(tmp_path / 'sim'))
    _, header, rows = read_csv(paths['trajectories'])
    for _, cells in rows:
        row = dict(zip(header, cells))
        N = int(row['N'])
        assert float(row['rho_true']) == pytest.approx(np.sum(c[N:] ** 2), rel=1e-12)
