"""
Bound-state command: analytic photon profiles, optionally next to the lattice eigenvector
"""

from dataclasses import replace
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError
from rich.console import Console

from api.models import Boundary, Command, EmitterSpec, RunConfig, Sheet, Sublattice
from commands.common import centred, fail, finish, resolve_run_config, run_points
from core.bound_states import BoundState, bs_wavefunction, obc_dark_state
from core.lattice_oracle import build_heff, eigenmode_near, embed_bound_state, phase_aligned, site_profile
from misc.errors import SSHBathError

DEFAULTS = {
    "bath": {"j1": 1.1, "j2": 1.0, "gamma_b": 0.1},
    "emitters": [{"sublattice": "A", "omega_rabi": 0.1, "gamma_a": 0.1}],
}


def _analytic(run: RunConfig, emitter: EmitterSpec) -> BoundState:
    if run.boundary == Boundary.OBC:
        return obc_dark_state(run.bath, emitter, n_b=run.lattice_cells or 20)
    return bs_wavefunction(run.bath, emitter, run.sheet)


def _lattice_profiles(run: RunConfig, emitter: EmitterSpec, state: BoundState) -> Tuple[np.ndarray, np.ndarray]:
    """Lattice |f_A|, |f_B| on the cells of `state` that fit the lattice (NaN elsewhere)."""
    n_b = run.lattice_cells
    if run.boundary == Boundary.OBC:
        keep = np.ones(state.cells.size, dtype=bool)
        sheet = Sheet.FIRST
    else:
        keep = np.abs(state.cells - emitter.cell) <= (n_b - 1) // 2
        sheet = run.sheet
    window = replace(state, cells=state.cells[keep], f_a=state.f_a[keep], f_b=state.f_b[keep])
    op = build_heff(run.bath, [emitter], n_b, run.boundary, sheet)
    _, vector = eigenmode_near(op, state.omega_bs.value + 1e-7)
    vector = phase_aligned(vector, embed_bound_state(op, window))

    cells = [int(cell) % n_b for cell in window.cells]
    profiles = []
    for sublattice in (Sublattice.A, Sublattice.B):
        full = np.full(state.cells.size, np.nan)
        full[keep] = np.abs(site_profile(op, vector, sublattice, cells))
        profiles.append(full)
    return profiles[0], profiles[1]


def bs_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    rows = []
    for m, emitter in enumerate(run.emitters):
        if run.lattice_cells and run.boundary == Boundary.PBC:
            emitter = centred([emitter], run.lattice_cells)[0]
        state = _analytic(run, emitter)
        lattice = _lattice_profiles(run, emitter, state) if run.lattice_cells else None
        for i, cell in enumerate(state.cells):
            row = {
                **point,
                "emitter": m,
                "sublattice": emitter.sublattice,
                "offset": int(cell) - emitter.cell,
                "cell": int(cell),
                "omega_bs": complex(state.omega_bs.value),
                "phi_a": state.phi_a,
                "f_a": complex(state.f_a[i]),
                "f_b": complex(state.f_b[i]),
                "abs_f_a": float(np.abs(state.f_a[i])),
                "abs_f_b": float(np.abs(state.f_b[i])),
            }
            if lattice is not None:
                row["abs_f_a_lattice"] = float(lattice[0][i])
                row["abs_f_b_lattice"] = float(lattice[1][i])
            rows.append(row)
    return rows


async def bs_command(
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    console: Console = Console(),
):
    """
    Photon profiles |f_A|, |f_B| of each emitter's bound state on the
    configured sheet (the dark state for open boundaries). Emitters are
    treated one at a time. With lattice_cells set the shift-and-invert
    eigenvector of that lattice is written alongside.

    Raises:
        typer.Exit: On configuration errors or failed sweep points
    """
    try:
        run = resolve_run_config(Command.BS, preset, config_path, overrides, DEFAULTS)
        outcome = await run_points(run, bs_rows, console, workers, axes=("j1", "gamma_b", "delta"))
    except (SSHBathError, ValidationError, ValueError) as e:
        fail(e)
    ys = ["abs_f_a", "abs_f_b"]
    if run.lattice_cells:
        ys += ["abs_f_a_lattice", "abs_f_b_lattice"]
    finish(run, outcome, preset or "bs", x="offset", ys=ys, group="sublattice", log_y=True)
