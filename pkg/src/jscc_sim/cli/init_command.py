"""
Init-Config Command Implementation
"""

import sys
from pathlib import Path
from typing import Optional

import click
from rich.console import Console


def write_default_config(kind: str, output: Optional[str], force: bool = False) -> None:
    """
    Emit the default YAML config for an experiment kind.

    Args:
        kind: Experiment kind
        output: Destination file; stdout when None
        force: Overwrite an existing destination
    """
    from jscc_sim.experiments.config import default_config_yaml

    text = default_config_yaml(kind)
    if output is None:
        click.echo(text, nl=False)
        return

    console = Console()
    path = Path(output)
    if path.exists() and not force:
        console.print(f"[bold red]✗ {path} already exists (use --force to overwrite)[/bold red]")
        sys.exit(1)
    path.write_text(text)
    console.print(f"[bold green]✓ Wrote {kind} config to {path}[/bold green]")
