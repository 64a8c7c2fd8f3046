"""
Phase command: physical and mirage phase labels over a (gamma_b, j1) grid
"""

from typing import Any, Dict, List, Optional

from pydantic import ValidationError
from rich.console import Console

from api.models import Command, RunConfig
from commands.common import fail, finish, resolve_run_config, run_points
from core.bath_model import phase_grid
from misc.errors import ConfigError, SSHBathError

DEFAULTS = {
    "bath": {"j1": 1.0, "j2": 1.0},
    "sweep": {
        "j1": [round(0.05 * i, 10) for i in range(41)],
        "gamma_b": [0.0, 0.05, 0.1, 0.2, 0.4],
    },
}


def phase_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    return phase_grid(run.bath.j2, [run.bath.j1], [run.bath.gamma_b])


async def phase_command(
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    console: Console = Console(),
):
    """
    Label every grid point TopologicalLineGap / PointGap / TrivialLineGap (physical
    bath) and Topological / Trivial (mirage bath); gap closings are labeled Boundary.

    Raises:
        typer.Exit: On configuration errors or failed grid points
    """
    try:
        run = resolve_run_config(Command.PHASE, preset, config_path, overrides, DEFAULTS)
        if not {"j1", "gamma_b"} <= set(run.sweep):
            raise ConfigError("The phase diagram needs sweep axes j1 and gamma_b")
        outcome = await run_points(run, phase_rows, console, workers, axes=("j1", "gamma_b"))
    except (SSHBathError, ValidationError, ValueError) as e:
        fail(e)
    finish(run, outcome, preset or "phase", x="j1", ys=["physical", "mirage"], group="gamma_b")
