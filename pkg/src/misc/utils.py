from pathlib import Path
from typing import Optional

from rich.panel import Panel
from rich.table import Table
from rich.text import Text


class CustomPanel(Panel):
    """Custom Panel class that includes the content in the string representation."""

    def __str__(self):
        """Custom string representation that includes the content."""
        # Handle either string or Text object as renderable
        if isinstance(self.renderable, Text):
            return str(self.renderable.plain)
        return str(self.renderable)


def format_run_summary(
    command: str,
    total_points: int,
    rows: int,
    failed_points: int,
    csv_path: Optional[Path],
    svg_path: Optional[Path] = None,
) -> Panel:
    """
    Format the statistics of one command run for display.

    Args:
        command: Subcommand name
        total_points: Number of sweep points
        rows: Number of rows written
        failed_points: Number of sweep points that raised
        csv_path: Written CSV file (None when nothing was written)
        svg_path: Written SVG file, if any

    Returns:
        Rich Panel containing the formatted summary
    """
    summary = [
        f"{command} complete",
        f"{total_points - failed_points}/{total_points} sweep points evaluated",
        f"{rows} rows written",
    ]
    if failed_points:
        summary.append(f"{failed_points} points failed")
    if csv_path is not None:
        summary.append(f"\nCSV: {csv_path}")
    if svg_path is not None:
        summary.append(f"SVG: {svg_path}")

    summary_text = "\n".join(summary)
    return CustomPanel(summary_text, title="Run Summary")


def format_validation_report(report) -> Table:
    """One row per check: verdict, runtime and the numeric summary."""
    mode = "quick" if report.quick else "full"
    table = Table(title=f"Validation ({mode})")
    table.add_column("Check", style="bold")
    table.add_column("Result")
    table.add_column("Time", justify="right")
    table.add_column("Detail")
    for check in report.checks:
        if check.skipped:
            verdict = "[yellow]skipped[/yellow]"
        elif check.passed:
            verdict = "[green]pass[/green]"
        else:
            verdict = "[bold red]FAIL[/bold red]"
        table.add_row(check.name, verdict, f"{check.elapsed:.1f}s", check.detail)
    return table
