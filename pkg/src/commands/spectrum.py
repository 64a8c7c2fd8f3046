"""
Spectrum command: Bloch bands of one bath variant, or eigenvalues of a finite lattice
"""

from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError
from rich.console import Console

from api.models import Command, RunConfig
from commands.common import centred, fail, finish, resolve_run_config, run_points
from core.bath_model import band_energies, bloch_coefficients
from core.lattice_oracle import build_heff, finite_spectrum, two_excitation_build
from misc.errors import SSHBathError

DEFAULTS = {"bath": {"j1": 1.1, "j2": 1.0, "gamma_b": 0.05}}


def band_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    k = np.linspace(-np.pi, np.pi, run.k_points, endpoint=False)
    plus, minus = band_energies(bloch_coefficients(run.bath, run.variant), k)
    return [
        {**point, "variant": run.variant, "k": float(k[i]), "band_plus": complex(plus[i]), "band_minus": complex(minus[i])}
        for i in range(k.size)
    ]


def lattice_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    n_b = run.lattice_cells
    if run.nonlinear is not None:
        emitter = run.nonlinear.model_copy(update={"base": centred([run.nonlinear.base], n_b)[0]})
        op = two_excitation_build(run.bath, emitter, n_b, run.boundary, run.sheet)
    else:
        op = build_heff(run.bath, centred(run.emitters, n_b), n_b, run.boundary, run.sheet)
    values = finite_spectrum(op)
    values = values[np.lexsort((values.imag, values.real))]
    return [
        {**point, "sheet": run.sheet, "boundary": run.boundary, "sector": op.sector, "index": i, "energy": complex(value)}
        for i, value in enumerate(values)
    ]


async def spectrum_command(
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    console: Console = Console(),
):
    """
    Dispersion bands on a k grid; with lattice_cells set, the eigenvalues of the
    finite lattice instead (two-excitation sector when a nonlinear emitter is given).

    Raises:
        typer.Exit: On configuration errors or failed sweep points
    """
    try:
        run = resolve_run_config(Command.SPECTRUM, preset, config_path, overrides, DEFAULTS)
        worker = lattice_rows if run.lattice_cells else band_rows
        outcome = await run_points(run, worker, console, workers, axes=("j1", "gamma_b", "delta", "u"))
    except (SSHBathError, ValidationError, ValueError) as e:
        fail(e)
    if run.lattice_cells:
        finish(run, outcome, preset or "spectrum", x="energy_re", ys=["energy_im"])
    else:
        group = "j1" if "j1" in run.sweep else None
        finish(
            run,
            outcome,
            preset or "spectrum",
            x="k",
            ys=["band_plus_re", "band_minus_re", "band_plus_im", "band_minus_im"],
            group=group,
        )
