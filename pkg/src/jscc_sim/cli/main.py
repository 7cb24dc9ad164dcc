"""
jscc-sim CLI - Main Entry Point
"""

import logging

import click
from rich.logging import RichHandler

from jscc_sim.__version__ import __version__
from jscc_sim.experiments.config import KINDS


def _configure_logging(verbose: int, quiet: bool) -> None:
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=verbose > 0, show_path=verbose >= 2)],
        force=True,
    )


@click.group()
@click.version_option(version=__version__, prog_name='jscc-sim')
@click.option('-v', '--verbose', count=True, help='Increase verbosity (can be repeated)')
@click.option('-q', '--quiet', is_flag=True, help='Only report errors')
@click.pass_context
def cli(ctx, verbose, quiet):
    """
    jscc-sim - OFDM baseband simulator for deep joint source-channel coding

    Runs declarative experiments on synthetic or stored encoder features and
    writes hash-stamped CSV/YAML artifacts.
    """
    ctx.ensure_object(dict)
    ctx.obj['verbose'] = verbose
    ctx.obj['quiet'] = quiet
    _configure_logging(verbose, quiet)


def _experiment_options(func):
    func = click.option('--seed', type=int, help='Override the config seed')(func)
    func = click.option('--out', type=click.Path(file_okay=False),
                        help='Output directory (default: config, then $JSCC_SIM_OUT, then ./results)')(func)
    func = click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False),
                        help='Experiment YAML (defaults apply when omitted)')(func)
    return func


def _run(ctx, kind, config_path, out, seed):
    from jscc_sim.cli.run_command import run_experiment_command

    run_experiment_command(
        kind=kind,
        config_path=config_path,
        output_dir=out,
        seed=seed,
        verbose=ctx.obj['verbose'],
        quiet=ctx.obj['quiet'],
    )


@cli.command()
@_experiment_options
@click.pass_context
def papr(ctx, config_path, out, seed):
    """
    PAPR distributions with and without precoding and clip activation.

    Writes papr_cdf.csv and papr_summary.yaml.

    \b
    EXAMPLES:
      $ jscc-sim papr --config papr.yaml --out results/papr
    """
    _run(ctx, 'papr', config_path, out, seed)


@cli.command()
@_experiment_options
@click.pass_context
def correlation(ctx, config_path, out, seed):
    """
    Feature correlation over distance and received-symbol correlation.

    Writes feature_correlation.csv, subcarrier_correlation.csv and
    correlation_summary.yaml.
    """
    _run(ctx, 'correlation', config_path, out, seed)


@cli.command()
@_experiment_options
@click.pass_context
def precode(ctx, config_path, out, seed):
    """
    Optimize the precoding matrix and compare it to the identity.

    Writes precoder.bin, precode_history.csv and precode_summary.yaml.

    \b
    EXAMPLES:
      $ jscc-sim precode --config precode.yaml --seed 7
    """
    _run(ctx, 'precode', config_path, out, seed)


@cli.command()
@_experiment_options
@click.pass_context
def e2e(ctx, config_path, out, seed):
    """
    End-to-end feature error across an SNR sweep.

    Writes e2e.csv, subcarrier_mse.csv and e2e_summary.yaml.
    """
    _run(ctx, 'e2e', config_path, out, seed)


@cli.command()
@_experiment_options
@click.pass_context
def schedule(ctx, config_path, out, seed):
    """
    Feature budget and retained channels across latency budgets.

    Writes schedule.csv and progressive.csv.
    """
    _run(ctx, 'schedule', config_path, out, seed)


@cli.command()
@_experiment_options
@click.pass_context
def stream(ctx, config_path, out, seed):
    """
    Two-worker streaming pipeline timing.

    Writes stream_events.csv and stream_summary.yaml.
    """
    _run(ctx, 'stream', config_path, out, seed)


@cli.command('init-config')
@click.argument('kind', type=click.Choice(KINDS))
@click.option('--output', type=click.Path(dir_okay=False), help='Write to a file instead of stdout')
@click.option('--force', is_flag=True, help='Overwrite an existing file')
@click.pass_context
def init_config(ctx, kind, output, force):
    """
    Print a default experiment config.

    \b
    EXAMPLES:
      $ jscc-sim init-config e2e --output e2e.yaml
    """
    from jscc_sim.cli.init_command import write_default_config

    write_default_config(kind=kind, output=output, force=force)


@cli.command()
@click.argument('artifact', type=click.Path(exists=True, dir_okay=False))
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='Experiment YAML the artifact should come from')
@click.pass_context
def verify(ctx, artifact, config_path):
    """
    Check that an artifact was produced by a config.

    Exits with status 1 when the embedded config hash differs.
    """
    from jscc_sim.cli.verify_command import verify_artifact_command

    verify_artifact_command(artifact=artifact, config_path=config_path, verbose=ctx.obj['verbose'])


def main():
    """Entry point for CLI"""
    cli(obj={})


if __name__ == '__main__':
    main()
