#!/usr/bin/env python
import os
import sys
import functools
import logging
import click
from flask import current_app
from flask.cli import FlaskGroup, ScriptInfo
from smoothcal import create_app
from smoothcal.constants import EXIT_CONFIG_ERROR, EXIT_IO_ERROR, EXIT_NUMERIC_ERROR
from smoothcal.errors import ConfigError, CsvParseError, DomainError, NumericError, SmoothcalError
from smoothcal.experiments import run_fit, run_simulate, run_tailcheck
from smoothcal.forms import parse_config
from smoothcal.utils import load_json

# Set SMOOTHCAL_CONFIG to 'development', 'testing' or 'production'
config_name = os.environ.get('SMOOTHCAL_CONFIG') or 'default'


def make_app():
    """Factory handed to FlaskGroup; reads config_name when the CLI first needs the app."""
    return create_app(config_name)


def handle_errors(f):
    """Echo errors as 'Error: ...' and exit with the matching code."""
    @functools.wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (ConfigError, CsvParseError, DomainError) as e:
            click.echo(f'Error: {e}', err=True)
            sys.exit(EXIT_CONFIG_ERROR)
        except NumericError as e:
            click.echo(f'Error: numeric failure: {e}', err=True)
            sys.exit(EXIT_NUMERIC_ERROR)
        except OSError as e:
            click.echo(f'Error: {e}', err=True)
            sys.exit(EXIT_IO_ERROR)
        except SmoothcalError as e:
            click.echo(f'Error: {e}', err=True)
            sys.exit(EXIT_NUMERIC_ERROR)
    return decorated_function


def _load_config(ctx, path):
    options = ctx.obj.data
    return parse_config(load_json(path), {'seed': options['seed'], 'replications': options['reps']})


def _report(ctx, paths):
    if not ctx.obj.data['quiet']:
        for name, path in paths.items():
            click.echo(f'{name}: {path}')


# --- CLI Commands --- #
@click.group(cls=FlaskGroup, create_app=make_app, add_default_commands=False, add_version_option=False,
             load_dotenv=False, set_debug_flag=False)
@click.option('--seed', type=int, default=None, help='Override the config seed.')
@click.option('--reps', type=int, default=None, help='Override the number of replications.')
@click.option('--quiet', is_flag=True, help='Only log warnings and errors.')
@click.pass_context
def cli(ctx, seed, reps, quiet):
    """Smoothness-index estimation experiments."""
    info = ctx.ensure_object(ScriptInfo)
    app = info.load_app()
    if quiet:
        app.logger.setLevel(logging.WARNING)
    info.data.update(seed=seed, reps=reps, quiet=quiet)


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False), help='JSON experiment config.')
@click.option('--out', 'out_dir', default=None, help='Output directory (defaults to the config output).')
@click.pass_context
@handle_errors
def simulate(ctx, config_path, out_dir):
    """Simulate replications and write trajectories, intervals and summaries."""
    config = _load_config(ctx, config_path)
    _report(ctx, run_simulate(config, current_app._get_current_object(), out_dir))


@cli.command()
@click.option('--input', 'input_path', required=True, type=click.Path(dir_okay=False), help='CSV with header N,rho_hat.')
@click.option('--family', type=click.Choice(['quasi-power', 'quasi-exp']), default='quasi-power')
@click.option('--out', 'out_dir', required=True, help='Output directory.')
@click.option('--weighting', type=click.Choice(['none', 'theta']), default='none',
              help='Least-squares weights; theta uses 1/Theta^2 and needs n in the input file.')
@click.pass_context
@handle_errors
def fit(ctx, input_path, family, out_dir, weighting):
    """Fit a quasi-power or quasi-exponential model to a rho_hat trajectory."""
    _report(ctx, run_fit(input_path, family, out_dir, current_app._get_current_object(),
                         weighting=None if weighting == 'none' else weighting))


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(dir_okay=False), help='JSON experiment config.')
@click.option('--out', 'out_dir', default=None, help='Output directory (defaults to the config output).')
@click.pass_context
@handle_errors
def tailcheck(ctx, config_path, out_dir):
    """Compare empirical tails with the Gaussian and B(phi) bounds."""
    config = _load_config(ctx, config_path)
    _report(ctx, run_tailcheck(config, current_app._get_current_object(), out_dir))


if __name__ == '__main__':
    cli()
