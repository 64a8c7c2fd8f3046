"""
Validation command: cross-checks of the analytic routes against quadrature and finite lattices
"""

import asyncio
import json
from typing import List, Optional

import typer
from rich import print as rprint
from rich.console import Console

from core.validation import run_validation
from misc.utils import format_validation_report


async def validate_command(
    quick: bool = True,
    only: Optional[List[str]] = None,
    seed: int = 0,
    as_json: bool = False,
    console: Console = Console(),
):
    """
    Run the validation checks and report pass/fail per check.

    Raises:
        typer.Exit: With code 1 for unknown check names, 2 if any check failed
    """
    mode = "quick" if quick else "full"
    try:
        with console.status(f"[bold green]Running {mode} validation...[/bold green]"):
            report = await asyncio.to_thread(run_validation, quick, only, seed)
    except ValueError as e:
        rprint(f"[bold red]Error:[/bold red] {e}")
        raise typer.Exit(code=1)

    if as_json:
        typer.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        rprint(format_validation_report(report))
    if not report.passed:
        raise typer.Exit(code=report.exit_code)
