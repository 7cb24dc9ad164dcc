"""
Verify Command Implementation
"""

import sys

from rich.console import Console

from jscc_sim.core.errors import ConfigHashMismatchError, JsccSimError


def verify_artifact_command(artifact: str, config_path: str, verbose: int) -> None:
    """
    Compare the config hash embedded in an artifact with a config file.

    Args:
        artifact: CSV or YAML artifact
        config_path: Experiment YAML
        verbose: Verbosity level
    """
    from jscc_sim.core.artifacts import read_artifact_stamp, verify_artifact
    from jscc_sim.experiments.config import load_experiment_config

    console = Console()
    try:
        expected = load_experiment_config(config_path).config_hash()
        _, seed = read_artifact_stamp(artifact)
        verify_artifact(artifact, expected)
    except ConfigHashMismatchError as e:
        console.print(f"[bold red]✗ {e}[/bold red]")
        sys.exit(1)
    except JsccSimError as e:
        console.print(f"[bold red]✗ {e}[/bold red]")
        if verbose:
            console.print_exception()
        sys.exit(1)

    console.print(f"[bold green]✓ {artifact} matches config hash {expected} (seed {seed})[/bold green]")
