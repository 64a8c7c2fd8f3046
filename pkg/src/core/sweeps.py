"""
Worker pool for parameter sweeps
"""

import asyncio
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence

from loguru import logger
from rich import print as rprint
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)

from misc.errors import NUMERICAL_EXIT_CODE, SSHBathError

Row = Dict[str, Any]
Worker = Callable[[Dict[str, Any]], List[Row]]


@dataclass
class SweepOutcome:
    """Rows of the successful points in sweep order, plus one entry per failed point."""

    rows: List[Row] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    total: int = 0

    @property
    def exit_code(self) -> int:
        return max((f["exit_code"] for f in self.failures), default=0)


def sweep_points(sweep: Dict[str, Sequence[float]]) -> List[Dict[str, float]]:
    """Cartesian product of the sweep axes, first axis slowest."""
    if not sweep:
        return [{}]
    keys = list(sweep)
    return [dict(zip(keys, values)) for values in itertools.product(*(sweep[k] for k in keys))]


async def run_sweep(
    points: List[Dict[str, Any]],
    worker: Worker,
    console,
    max_concurrent: int = 4,
    description: str = "Sweeping",
) -> SweepOutcome:
    """
    Evaluate worker(point) for every point in a bounded thread pool.

    Args:
        points: Sweep points, evaluated independently
        worker: Returns the output rows of one point; may raise SSHBathError
        console: Rich console for the progress bar
        max_concurrent: Maximum number of points in flight
        description: Progress bar label

    Returns:
        SweepOutcome with rows re-ordered by point index
    """
    semaphore = asyncio.Semaphore(max_concurrent)

    async def evaluate(index: int, point: Dict[str, Any]) -> Dict[str, Any]:
        async with semaphore:
            try:
                rows = await asyncio.to_thread(worker, point)
                return {"status": "success", "index": index, "rows": rows}
            except SSHBathError as e:
                return {"status": "failed", "index": index, "point": point, **e.to_dict()}
            except Exception as e:
                logger.exception(f"Unexpected failure at sweep point {point}")
                return {
                    "status": "failed",
                    "index": index,
                    "point": point,
                    "error": type(e).__name__,
                    "message": str(e),
                    "exit_code": NUMERICAL_EXIT_CODE,
                }

    results = []
    with Progress(
        SpinnerColumn(),
        TextColumn("[bold blue]{task.description}[/bold blue]"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        TimeElapsedColumn(),
        console=console,
    ) as progress:
        task = progress.add_task(
            f"{description} {len(points)} points (max {max_concurrent} concurrent)...",
            total=len(points),
        )
        for future in asyncio.as_completed([evaluate(i, p) for i, p in enumerate(points)]):
            result = await future
            results.append(result)
            if result["status"] == "failed":
                rprint(
                    f"\n[bold red]Error at point {result['point']}: {result['message']}[/bold red]"
                )
            progress.update(task, advance=1)

    outcome = SweepOutcome(total=len(points))
    for result in sorted(results, key=lambda r: r["index"]):
        if result["status"] == "success":
            outcome.rows.extend(result["rows"])
        else:
            outcome.failures.append(result)

    rprint(f"[bold green]✓[/bold green] Evaluated {len(points) - len(outcome.failures)} sweep points")
    if outcome.failures:
        rprint(f"\n[bold yellow]⚠[/bold yellow] {len(outcome.failures)} sweep points failed")
    return outcome
