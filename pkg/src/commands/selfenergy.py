"""
Self-energy command: residue self-energies on a frequency grid next to the k-space quadrature
"""

import math
from typing import Any, Dict, List, Optional

from pydantic import ValidationError
from rich.console import Console

from api.models import BathVariant, Command, RunConfig, Sheet, SublatticePair
from commands.common import fail, finish, resolve_run_config, run_points
from config.settings import settings
from core.self_energy import sigma_cross, sigma_quadrature_oracle
from misc.errors import NearSpectrum, OnBranchLoop, SSHBathError

DEFAULTS = {
    "bath": {"j1": 1.02, "j2": 1.0, "gamma_b": 0.05},
    "emitters": [{"omega_rabi": 0.2}],
    "frequencies": {"re_min": -3.0, "re_max": 3.0, "n_points": 121, "im": 0.1},
}

_NAN = complex(math.nan, math.nan)


def selfenergy_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    d = int(point.get("d", 0))
    pair = run.pair or SublatticePair.AA
    omega_rabi = run.emitters[0].omega_rabi
    variant = BathVariant.PHYSICAL if run.sheet == Sheet.FIRST else BathVariant.MIRAGE
    rows = []
    for omega in run.frequencies.grid():
        try:
            value = sigma_cross(run.bath, omega_rabi, omega, d, pair, run.sheet)
            sigma, region = value.value, value.region
        except OnBranchLoop:
            sigma, region = _NAN, None
        try:
            oracle = sigma_quadrature_oracle(run.bath, omega_rabi, omega, d, pair, variant, n_k=settings.K_GRID)
        except NearSpectrum:
            oracle = _NAN
        rows.append(
            {
                **point,
                "d": d,
                "pair": pair,
                "sheet": run.sheet,
                "omega": complex(omega),
                "sigma": complex(sigma),
                "oracle": oracle,
                "oracle_delta": abs(sigma - oracle),
                "region": region.value if region is not None else "",
            }
        )
    return rows


async def selfenergy_command(
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    console: Console = Console(),
):
    """
    Tabulate Sigma_d for one sublattice pair (AA by default, i.e. Sigma_0 at d = 0)
    over the configured frequency grid, for every separation in the d sweep.

    Raises:
        typer.Exit: On configuration errors or failed sweep points
    """
    try:
        run = resolve_run_config(Command.SELFENERGY, preset, config_path, overrides, DEFAULTS)
        outcome = await run_points(run, selfenergy_rows, console, workers, axes=("j1", "gamma_b", "d"))
    except (SSHBathError, ValidationError, ValueError) as e:
        fail(e)
    finish(run, outcome, preset or "selfenergy", x="omega_re", ys=["sigma_re", "sigma_im"], group="d")
