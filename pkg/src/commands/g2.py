"""
Nonlinear emitter command: two-photon emission D(t) and steady-state g2(tau)
"""

from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError
from rich.console import Console

from api.models import Boundary, Command, RunConfig, Sheet
from commands.common import fail, finish, resolve_run_config, run_points
from core.lattice_oracle import evolve_state, label_key, two_excitation_build
from core.multi_excitation import g2_series, pair_emission_dynamics
from misc.errors import SSHBathError

DEFAULTS = {
    "bath": {"j1": 1.01, "j2": 1.0, "gamma_b": 0.1},
    "nonlinear": {"base": {"omega_rabi": 0.01, "gamma_a": 0.06}, "u": 0.1},
    "sheet": "mirage",
    "sweep": {"u": [0.0, 0.05, 0.1, 0.2, 0.3, 0.4]},
}


def emission_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    emitter = run.nonlinear
    t_grid = run.times.grid()
    series = pair_emission_dynamics(run.bath, emitter, emitter.u, t_grid, run.sheet)
    lattice = None
    if run.lattice_cells:
        n_b = run.lattice_cells
        moved = emitter.model_copy(update={"base": emitter.base.model_copy(update={"cell": n_b // 2})})
        op = two_excitation_build(run.bath, moved, n_b, Boundary.PBC, Sheet.FIRST)
        doubly = op.basis[0]
        lattice = -1j * evolve_state(op, op.basis_state(doubly), t_grid, observe=[doubly])[label_key(doubly)]

    rows = []
    for i, t in enumerate(t_grid):
        value = complex(series["D"][i])
        row: Dict[str, Any] = {**point, "u": emitter.u, "t": float(t), "D": value, "abs_D": abs(value)}
        if lattice is not None:
            row["D_lattice"] = complex(lattice[i])
            row["abs_D_lattice"] = abs(lattice[i])
        rows.append(row)
    return rows


def correlation_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    taus = run.sweep.get("tau", [0.0])
    values = g2_series(run.bath, run.nonlinear, taus, run.sheet)
    return [
        {**point, "u": run.nonlinear.u, "omega_d": run.nonlinear.drive_omega, "tau": float(tau), "g2": float(value)}
        for tau, value in zip(taus, np.asarray(values))
    ]


async def g2_command(
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    console: Console = Console(),
):
    """
    Kerr emitter observables.

    With emission set, the two-photon Green function D(t) of the doubly
    excited emitter (plus the two-excitation lattice result when
    lattice_cells is given); otherwise g2 over the tau axis for every
    (u, omega_d, delta) point.

    Raises:
        typer.Exit: On configuration errors or failed sweep points
    """
    try:
        run = resolve_run_config(Command.G2, preset, config_path, overrides, DEFAULTS)
        axes = ("j1", "gamma_b", "delta", "u", "omega_d")
        worker = emission_rows if run.emission else correlation_rows
        outcome = await run_points(run, worker, console, workers, axes=axes)
    except (SSHBathError, ValidationError, ValueError) as e:
        fail(e)
    name = preset or "g2"
    if run.emission:
        ys = ["abs_D", "abs_D_lattice"] if run.lattice_cells else ["abs_D"]
        finish(run, outcome, name, x="t", ys=ys, group="u" if "u" in run.sweep else None)
    elif len(run.sweep.get("tau", [0.0])) > 1:
        finish(run, outcome, name, x="tau", ys=["g2"], group="u" if "u" in run.sweep else None)
    else:
        x = "u" if "u" in run.sweep else "omega_d"
        finish(run, outcome, name, x=x, ys=["g2"], group="j1" if "j1" in run.sweep else None)
