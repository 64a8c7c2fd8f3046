"""
Dynamics command: emitter amplitudes through the contour transform or on a finite lattice
"""

from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError
from rich.console import Console

from api.models import Command, RunConfig, TimeSeries
from commands.common import centred, fail, finish, resolve_run_config, run_points
from core.dynamics import evolve_emitters
from core.lattice_oracle import build_heff, emitter_label, evolve_state
from misc.errors import SSHBathError

DEFAULTS = {
    "bath": {"j1": 1.1, "j2": 1.0, "gamma_b": 0.05},
    "emitters": [{"omega_rabi": 0.2, "gamma_a": 0.05}],
    "sheet": "mirage",
    "times": {"t_max": 100.0, "n_points": 201},
}


def _series(run: RunConfig) -> TimeSeries:
    t_grid = run.times.grid()
    if not run.lattice_cells:
        return evolve_emitters(run.bath, run.emitters, t_grid, run.sheet, run.contour, run.initial)
    op = build_heff(run.bath, centred(run.emitters, run.lattice_cells), run.lattice_cells, run.boundary, run.sheet)
    return evolve_state(op, op.basis_state(emitter_label(run.initial)), t_grid)


def dynamics_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    series = _series(run)
    route = "lattice" if run.lattice_cells else "contour"
    decay = np.exp(run.bath.gamma_b * series.times)
    rows = []
    for i, t in enumerate(series.times):
        row: Dict[str, Any] = {**point, "t": float(t), "route": route}
        for m in range(len(run.emitters)):
            amplitude = complex(series[f"a{m}"][i])
            row[f"a{m}"] = amplitude
            row[f"n{m}"] = abs(amplitude) ** 2
            row[f"n{m}_tilde"] = float(decay[i]) * abs(amplitude) ** 2
        rows.append(row)
    return rows


async def dynamics_command(
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    console: Console = Console(),
):
    """
    Time evolution of the emitter amplitudes after exciting emitter `initial`.

    The frequency route transforms the Green matrix on the configured sheet;
    lattice_cells switches to integrating the finite effective Hamiltonian.
    n{m}_tilde carries the bath loss factor exp(gamma_b t) removed.

    Raises:
        typer.Exit: On configuration errors or failed sweep points
    """
    try:
        run = resolve_run_config(Command.DYNAMICS, preset, config_path, overrides, DEFAULTS)
        outcome = await run_points(run, dynamics_rows, console, workers, axes=("j1", "gamma_b", "delta"))
    except (SSHBathError, ValidationError, ValueError) as e:
        fail(e)
    group = next((key for key in ("j1", "gamma_b", "delta") if key in run.sweep), None)
    ys = [f"n{m}" for m in range(len(run.emitters))]
    finish(run, outcome, preset or "dynamics", x="t", ys=ys, group=group)
