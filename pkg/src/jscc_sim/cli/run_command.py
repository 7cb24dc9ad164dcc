"""
Experiment Command Implementation
"""

import sys
from typing import Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from jscc_sim.core.errors import JsccSimError


def _config_table(config, out_dir) -> Table:
    table = Table(title="Configuration", show_header=False)
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")

    ofdm = config.ofdm
    table.add_row("Experiment", config.kind)
    table.add_row("Config hash", config.config_hash())
    table.add_row("Seed", str(config.seed))
    table.add_row("Subcarriers", f"K={ofdm.n_subcarriers}, K_d={ofdm.n_data}, K_p={ofdm.n_pilots}, L={ofdm.cp_length}")
    table.add_row("Bandwidth", f"{ofdm.bandwidth / 1e6:g} MHz")
    if config.features.path:
        table.add_row("Features", config.features.path)
    else:
        f = config.features
        table.add_row("Features", f"{f.n_blocks} x {f.height}x{f.width}x{f.channels}, rho={f.rho}")
    table.add_row("SNR", ", ".join(f"{s:g} dB" for s in config.channel.snr_db))
    if config.precoder.enabled:
        table.add_row("Precoder", config.precoder.matrix_path or
                      f"omega={config.precoder.omega}, N_r={config.precoder.n_inits}")
    table.add_row("Output", str(out_dir))
    return table


def run_experiment_command(kind: str, config_path: Optional[str], output_dir: Optional[str],
                           seed: Optional[int], verbose: int, quiet: bool = False) -> None:
    """
    Load the config, run the experiment and list the artifacts.

    Args:
        kind: Experiment kind from the subcommand
        config_path: YAML file, or None for the defaults
        output_dir: Overrides the config's output directory
        seed: Overrides the config's seed
        verbose: Verbosity level
        quiet: Suppress the banner and tables
    """
    from jscc_sim.experiments.config import ExperimentConfig, load_experiment_config
    from jscc_sim.experiments.runners import run_experiment

    console = Console()

    try:
        if config_path:
            config = load_experiment_config(config_path, seed=seed, output_dir=output_dir, kind=kind)
        else:
            overrides = {"kind": kind}
            if seed is not None:
                overrides["seed"] = seed
            if output_dir is not None:
                overrides["output_dir"] = output_dir
            config = ExperimentConfig.from_dict(overrides)
        if config.kind != kind:
            console.print(f"[bold red]✗ {config_path} describes a '{config.kind}' experiment, "
                          f"not '{kind}'[/bold red]")
            sys.exit(1)

        out_dir = config.resolve_output_dir()
        if not quiet:
            console.print(Panel.fit(
                f"[bold cyan]jscc-sim {kind}[/bold cyan]\n"
                "OFDM DeepJSCC baseband simulation",
                border_style="cyan"
            ))
            console.print(_config_table(config, out_dir))
            console.print()

        artifacts = run_experiment(config, out_dir)

    except JsccSimError as e:
        console.print(f"[bold red]✗ {e}[/bold red]")
        if verbose:
            console.print_exception()
        sys.exit(1)
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted; partial outputs removed[/yellow]")
        sys.exit(130)

    if quiet:
        return
    results = Table(title="Artifacts")
    results.add_column("File", style="cyan")
    results.add_column("Size", justify="right", style="green")
    for path in artifacts:
        results.add_row(str(path), f"{path.stat().st_size:,} B")
    console.print(results)
    console.print(f"[bold green]✓ {kind} finished[/bold green]")
