"""
Interaction command: bound-state mediated couplings Sigma_d between two emitters
"""

from typing import Any, Dict, List, Optional

from pydantic import ValidationError
from rich.console import Console

from api.models import Command, RunConfig, SublatticePair
from commands.common import fail, finish, resolve_run_config, run_points
from core.bound_states import interaction_at_bound_state
from core.self_energy import interaction_single_pole
from misc.errors import NotMidgap, SSHBathError

DEFAULTS = {
    "bath": {"j1": 1.1, "j2": 1.0, "gamma_b": 0.1},
    "emitters": [{"omega_rabi": 0.1, "gamma_a": 0.1}],
    "sheet": "mirage",
    "sweep": {"j1": [0.5, 0.75, 0.9, 1.1, 1.25, 1.5], "d": [1, 2, 3, 4, 5]},
}


def _coupling(run: RunConfig, d: int, pair: SublatticePair) -> complex:
    emitter = run.emitters[0]
    try:
        return interaction_single_pole(run.bath, emitter.omega_rabi, emitter.delta_prime, d, pair, run.sheet)
    except NotMidgap:
        return interaction_at_bound_state(run.bath, emitter, d, pair, run.sheet)


def interaction_rows(run: RunConfig, point: Dict[str, float]) -> List[Dict[str, Any]]:
    d = int(point.get("d", 1))
    sigma_ab = _coupling(run, d, SublatticePair.AB)
    sigma_ba = _coupling(run, d, SublatticePair.BA)
    return [
        {
            **point,
            "d": d,
            "sheet": run.sheet,
            "sigma_AB": sigma_ab,
            "sigma_BA": sigma_ba,
            "abs_AB": abs(sigma_ab),
            "abs_BA": abs(sigma_ba),
        }
    ]


async def interaction_command(
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    workers: Optional[int] = None,
    console: Console = Console(),
):
    """
    Sigma^AB_d and Sigma^BA_d at the bound-state energy, over j1 and d.

    Midgap emitters use the single-pole closed form; any other detuning
    evaluates Sigma_d at the root-found bound-state energy.

    Raises:
        typer.Exit: On configuration errors or failed sweep points
    """
    try:
        run = resolve_run_config(Command.INTERACTION, preset, config_path, overrides, DEFAULTS)
        outcome = await run_points(run, interaction_rows, console, workers, axes=("j1", "gamma_b", "delta", "d"))
    except (SSHBathError, ValidationError, ValueError) as e:
        fail(e)
    x = "j1" if "j1" in run.sweep else "d"
    finish(
        run,
        outcome,
        preset or "interaction",
        x=x,
        ys=["abs_AB", "abs_BA"],
        group="d" if x == "j1" else None,
        log_y=True,
    )
