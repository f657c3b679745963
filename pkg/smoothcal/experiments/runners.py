"""
Experiment Runners

This module drives the estimation pipeline end to end for seeded batches of
replications and writes the results as versioned CSV files.
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

import numpy as np

from smoothcal.confidence import asymptotic_ci, gaussian_tail, nonasymptotic_tail, theta
from smoothcal.constants import MAX_TOEPLITZ_N
from smoothcal.estimators import (adaptive_estimate, empirical_coeffs, l2_error, projection_estimate,
                                  rho_hat_trajectory, select_N, sigma_for_problem)
from smoothcal.fourier_core import covariance_model, optimal_N, rho_tail, smoothness_profile
from smoothcal.model_fit import fit_family, fitted_curve
from smoothcal.models import Problem
from smoothcal.simulators import covariance_from_spectrum, simulate
from smoothcal.tail_calculus import phi2, psi_from_phi, upsilon_conjugate
from smoothcal.utils import read_rho_hat_csv, write_csv, write_dict_rows

REPORT_ONLY = 'REPORT-ONLY'


class ExperimentRunner:
    """
    Runs simulate, fit and tailcheck experiments for one application.
    """

    def __init__(self, app):
        self.app = app
        self.logger = app.logger
        self.max_toeplitz_n = int(app.config.get('MAX_TOEPLITZ_N', MAX_TOEPLITZ_N))

    # --- Shared helpers --- #

    def _map_replications(self, func, replications):
        """Run func(r) for r in range(replications); results come back in replication order."""
        workers = max(1, int(self.app.config.get('WORKERS', 1)))
        if workers == 1 or replications == 1:
            return [func(r) for r in range(replications)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, range(replications)))

    @staticmethod
    def truth_for(config):
        """Coefficients the data carries: c_1..c_K without any tail model, or the lag sequence for problem C."""
        simulated = config.model.truncated(config.model.K)
        if config.problem is Problem.C:
            return covariance_model(simulated, lags=config.K)
        return simulated

    @staticmethod
    def sigma_sq_for(config):
        if config.problem is Problem.A:
            return sigma_for_problem(Problem.A, {'noise': config.noise}) ** 2
        if config.problem is Problem.B:
            return 1.0
        return sigma_for_problem(Problem.C, {'model': config.model}) ** 2

    def _output_dir(self, config, out_dir):
        return out_dir or config.output or self.app.config.get('OUTPUT_DIR', 'results')

    # --- simulate --- #

    def _simulate_replication(self, config, truth, sigma_sq, replication):
        data = simulate(config.problem, config.model, config.n, config.noise, config.seed, replication,
                        max_n=self.max_toeplitz_n)
        coeffs = empirical_coeffs(data, config.K)
        trajectory = rho_hat_trajectory(coeffs, config.N_range, sigma_sq)
        rows = []
        for N, raw in zip(trajectory.N, trajectory.values):
            N = int(N)
            rho_true = rho_tail(truth, N)
            ci = asymptotic_ci(float(raw), config.n, N, config.alpha, config.ci_method)
            rows.append({
                'replication': replication,
                'N': N,
                'tau': float(raw) + sigma_sq * N / config.n,
                'rho_hat_raw': float(raw),
                'rho_hat_clamped': max(float(raw), 0.0),
                'rho_true': rho_true,
                'theta': theta(config.n, N, max(float(raw), 0.0)),
                'ci_lo': ci.lower,
                'ci_hi': ci.upper,
                'covered': ci.contains(rho_true),
                'sq_error': l2_error(projection_estimate(coeffs, N), truth),
            })
        N_tilde = select_N(coeffs)
        adaptive = {
            'replication': replication,
            'N_tilde': N_tilde,
            'adaptive_sq_error': l2_error(adaptive_estimate(coeffs), truth),
        }
        return rows, adaptive

    def run_simulate(self, config, out_dir: Optional[str] = None) -> Dict[str, str]:
        """
        Simulate replications and write trajectories, summary, adaptive and rho_hat files.

        Args:
            config: A validated ExperimentConfig
            out_dir: Output directory; defaults to config.output

        Returns:
            Mapping of output name to written path
        """
        out_dir = self._output_dir(config, out_dir)
        truth = self.truth_for(config)
        sigma_sq = self.sigma_sq_for(config)
        self.logger.info(f"simulate: problem {config.problem.label}, n={config.n}, K={config.K}, "
                         f"{config.replications} replications, seed {config.seed}")

        results = self._map_replications(
            lambda r: self._simulate_replication(config, truth, sigma_sq, r), config.replications)
        rows = sorted((row for rep_rows, _ in results for row in rep_rows),
                      key=lambda row: (row['replication'], row['N']))

        # Oracle truncation from the exact profile
        N_star = optimal_N(config.n, smoothness_profile(truth), sigma_sq)
        oracle_risk = sigma_sq * N_star / config.n + rho_tail(truth, N_star)
        adaptive_rows = []
        for _, adaptive in sorted(results, key=lambda item: item[1]['replication']):
            adaptive_rows.append({
                'replication': adaptive['replication'],
                'N_tilde': adaptive['N_tilde'],
                'N_star': N_star,
                'ratio': adaptive['N_tilde'] / N_star,
                'adaptive_sq_error': adaptive['adaptive_sq_error'],
                'oracle_risk': oracle_risk,
            })

        summary_rows = self._summarize(rows, config, sigma_sq)
        comments = {'problem': config.problem.value, 'n': config.n, 'seed': config.seed}
        paths = {
            'trajectories': write_dict_rows(os.path.join(out_dir, 'trajectories.csv'), rows, comments),
            'summary': write_dict_rows(os.path.join(out_dir, 'summary.csv'), summary_rows, comments),
            'adaptive': write_dict_rows(os.path.join(out_dir, 'adaptive.csv'), adaptive_rows, comments),
            'rho_hat': write_csv(os.path.join(out_dir, 'rho_hat.csv'), ('N', 'rho_hat'),
                                 ((row['N'], row['mean_rho_hat']) for row in summary_rows),
                                 {'n': config.n, 'problem': config.problem.value}),
        }
        coverage = np.mean([row['covered'] for row in rows])
        self.logger.info(f"simulate: mean coverage {coverage:.4f} at level {config.alpha}, N* = {N_star}")
        return paths

    @staticmethod
    def _summarize(rows: List[Dict[str, Any]], config, sigma_sq) -> List[Dict[str, Any]]:
        by_N: Dict[int, List[Dict[str, Any]]] = {}
        for row in rows:
            by_N.setdefault(row['N'], []).append(row)
        summary = []
        for N in sorted(by_N):
            group = by_N[N]
            rho_true = group[0]['rho_true']
            risk = sigma_sq * N / config.n + rho_true
            mise = float(np.mean([row['sq_error'] for row in group]))
            summary.append({
                'N': N,
                'mise': mise,
                'risk': risk,
                'mise_over_risk': mise / risk if risk > 0 else math.nan,
                'coverage': float(np.mean([row['covered'] for row in group])),
                'mean_rho_hat': float(np.mean([row['rho_hat_raw'] for row in group])),
                'rho_true': rho_true,
            })
        return summary

    # --- fit --- #

    def run_fit(self, input_path: str, family: str, out_dir: str, weighting: Optional[str] = None) -> Dict[str, str]:
        """
        Fit a parametric rho model to a trajectory file.

        Args:
            input_path: CSV with header N,rho_hat
            family: 'quasi-power' or 'quasi-exp'
            out_dir: Output directory for fit.csv and curve.csv
            weighting: None or 'theta'

        Returns:
            Mapping of output name to written path
        """
        trajectory = read_rho_hat_csv(input_path)
        self.logger.info(f"fit: {family} on {len(trajectory)} points from {input_path}")
        result = fit_family(trajectory, family, weighting=weighting)
        curve = fitted_curve(result, trajectory.N)
        self.logger.info(f"fit: {result.status} after {result.iterations} iterations, rss {result.rss:.6g}")
        return {
            'fit': write_dict_rows(os.path.join(out_dir, 'fit.csv'), [result.as_row()]),
            'curve': write_csv(os.path.join(out_dir, 'curve.csv'), ('N', 'rho_hat', 'fitted'),
                               zip(trajectory.N, trajectory.values, curve)),
        }

    # --- tailcheck --- #

    def _normalized_deviation(self, config, truth, sigma_sq, replication):
        data = simulate(config.problem, config.model, config.n, config.noise, config.seed, replication,
                        max_n=self.max_toeplitz_n)
        N = config.tail_N
        coeffs = empirical_coeffs(data, config.K)
        raw = rho_hat_trajectory(coeffs, (N, N), sigma_sq).values[0]
        rho = rho_tail(truth, N)
        return (raw - rho) / (math.sqrt(2.0) * theta(config.n, N, rho))

    def run_tailcheck(self, config, out_dir: Optional[str] = None) -> Dict[str, str]:
        """
        Compare empirical tails of the normalized deviation with the Gaussian and B(phi) bounds.

        Args:
            config: A validated ExperimentConfig
            out_dir: Output directory; defaults to config.output

        Returns:
            Mapping of output name to written path
        """
        out_dir = self._output_dir(config, out_dir)
        truth = self.truth_for(config)
        sigma_sq = self.sigma_sq_for(config)
        delta_sq = covariance_from_spectrum(config.model, 0) if config.problem is Problem.C else 1.0
        self.logger.info(f"tailcheck: problem {config.problem.label}, n={config.n}, N={config.tail_N}, "
                         f"{config.replications} replications")

        mu = np.array(self._map_replications(
            lambda r: self._normalized_deviation(config, truth, sigma_sq, r), config.replications))
        rows = []
        for t in config.t_grid:
            p = float(np.mean(np.abs(mu) > t))
            rows.append({
                'problem': config.problem.value,
                't': t,
                'empirical_tail': p,
                'mc_se': math.sqrt(p * (1.0 - p) / mu.size),
                'gaussian_bound': gaussian_tail(t),
                'bphi_bound': nonasymptotic_tail(config.problem, config.n, config.tail_N, 0.0, t,
                                                 delta_sq=delta_sq, normalized=True),
            })
        comments = {'problem': config.problem.value, 'n': config.n, 'N': config.tail_N, 'seed': config.seed}
        return {
            'tailcheck': write_dict_rows(os.path.join(out_dir, 'tailcheck.csv'), rows, comments),
            'report_only': write_dict_rows(os.path.join(out_dir, 'report_only.csv'), report_only_rows()),
        }


def report_only_rows():
    """Comparisons tabulated without a pass/fail verdict."""
    rows = []
    for t in range(1, 21):
        lhs = 2.0 * math.exp(-upsilon_conjugate(t))
        rhs = math.sqrt(t) * math.exp(-t / 2.0)
        rows.append({'check': 'upsilon_tail_vs_sqrt_t', 'x': float(t), 'lhs': lhs, 'rhs': rhs,
                     'holds': lhs <= rhs, 'flag': REPORT_ONLY})
    psi = psi_from_phi(phi2())
    for p in (1.0, 2.0, 4.0, 8.0, 16.0, 32.0):
        lhs = float(psi(p)) / math.sqrt(p)
        rhs = math.sqrt(math.e)
        rows.append({'check': 'psi_phi2_over_sqrt_p', 'x': p, 'lhs': lhs, 'rhs': rhs,
                     'holds': abs(lhs - rhs) <= 1e-3 * rhs, 'flag': REPORT_ONLY})
    return rows


def run_simulate(config, app, out_dir=None):
    return ExperimentRunner(app).run_simulate(config, out_dir)


def run_fit(input_path, family, out_dir, app, weighting=None):
    return ExperimentRunner(app).run_fit(input_path, family, out_dir, weighting)


def run_tailcheck(config, app, out_dir=None):
    return ExperimentRunner(app).run_tailcheck(config, out_dir)
