"""
SSH Bath: Main entry point
"""

import asyncio
from typing import Any, Dict, List, Optional

import typer
from rich import print as rprint
from rich.console import Console
from rich.panel import Panel

from api.models import BathVariant, Boundary, Sheet, SublatticePair
from commands.bs import bs_command
from commands.common import fail, parse_values
from commands.dynamics import dynamics_command
from commands.g2 import g2_command
from commands.interaction import interaction_command
from commands.phase import phase_command
from commands.selfenergy import selfenergy_command
from commands.setup import setup_command
from commands.spectrum import spectrum_command
from commands.validate import validate_command
from config.config import get_config
from misc.logger import setup_logging

HELP = (
    "Quantum emitters in closed, dissipative and mirage SSH photonic baths: phase diagrams, "
    "self-energies, bound states, dynamics, bath-mediated interactions and photon correlations, "
    "cross-checked against finite lattices."
)

# Create Typer app
app = typer.Typer(help=HELP)
console = Console()

PRESET = typer.Option(None, "--preset", "-p", help="Shipped preset, named after the figure it reproduces")
CONFIG = typer.Option(None, "--config", "-c", help="JSON run configuration")
OUTPUT = typer.Option(None, "--output", "-o", help="CSV path (default: OUTPUT_DIR/<preset or command>.csv)")
SVG = typer.Option(False, "--svg", help="Also write an SVG plot next to the CSV")
WORKERS = typer.Option(None, "--workers", "-w", help="Concurrent sweep points (overrides .env)")
J1 = typer.Option(None, "--j1", help="Intra-cell hopping J1")
J2 = typer.Option(None, "--j2", help="Inter-cell hopping J2")
GAMMA_B = typer.Option(None, "--gamma-b", help="Uniform bath loss gamma_b")
OMEGA = typer.Option(None, "--omega", help="Emitter coupling Omega")
GAMMA_A = typer.Option(None, "--gamma-a", help="Emitter loss gamma_a")
DELTA = typer.Option(None, "--delta", help="Emitter detuning Delta")
SHEET = typer.Option(None, "--sheet", case_sensitive=False, help="physical (first) or mirage (second) sheet")
BOUNDARY = typer.Option(None, "--boundary", case_sensitive=False, help="PBC or OBC lattice")
LATTICE = typer.Option(None, "--lattice-cells", "-n", help="Use a finite lattice of this many cells")
T_MAX = typer.Option(None, "--t-max", help="Last output time")
N_TIMES = typer.Option(None, "--n-times", help="Number of output times")
J1_VALUES = typer.Option(None, "--j1-values", help="Sweep J1: 'a,b,c' or 'start:stop:count'")
GAMMA_VALUES = typer.Option(None, "--gamma-values", help="Sweep gamma_b: 'a,b,c' or 'start:stop:count'")
DELTA_VALUES = typer.Option(None, "--delta-values", help="Sweep Delta: 'a,b,c' or 'start:stop:count'")
D_VALUES = typer.Option(None, "--d", help="Cell separations, e.g. '0,1,3,10'")


def _pruned(values: Dict[str, Any]) -> Dict[str, Any]:
    """Drop unset options so they do not override the preset."""
    pruned = {}
    for key, value in values.items():
        if isinstance(value, dict):
            value = _pruned(value)
            if not value:
                continue
        if value is None:
            continue
        pruned[key] = value
    return pruned


def _overrides(
    j1: Optional[float] = None,
    j2: Optional[float] = None,
    gamma_b: Optional[float] = None,
    omega: Optional[float] = None,
    gamma_a: Optional[float] = None,
    delta: Optional[float] = None,
    sheet: Optional[Sheet] = None,
    boundary: Optional[Boundary] = None,
    lattice_cells: Optional[int] = None,
    t_max: Optional[float] = None,
    n_times: Optional[int] = None,
    output: Optional[str] = None,
    svg: bool = False,
    sweep: Optional[Dict[str, Optional[str]]] = None,
    **extra: Any,
) -> Dict[str, Any]:
    """
    Collect CLI flags into a run-config override.

    Raises:
        ValueError: If a sweep value list cannot be parsed
    """
    return _pruned(
        {
            "bath": {"j1": j1, "j2": j2, "gamma_b": gamma_b},
            "emitter": {"omega_rabi": omega, "gamma_a": gamma_a, "delta": delta},
            "sheet": sheet.value if sheet else None,
            "boundary": boundary.value if boundary else None,
            "lattice_cells": lattice_cells,
            "times": {"t_max": t_max, "n_points": n_times},
            "output": {"path": output, "svg": True if svg else None},
            "sweep": {key: parse_values(text) for key, text in (sweep or {}).items()},
            **extra,
        }
    )


def _run(build, command, preset, config, workers, **kwargs) -> None:
    try:
        overrides = build()
    except ValueError as e:
        fail(e)
    asyncio.run(command(preset, config, overrides, workers, console=console, **kwargs))


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    log_level: Optional[str] = typer.Option(None, "--log-level", "-l", help="loguru level (overrides .env)"),
):
    """
    Quantum emitters in closed, dissipative and mirage SSH photonic baths.
    """
    try:
        config = get_config(cli_log_level=log_level)
    except ValueError as e:
        rprint(f"[bold red]Error:[/bold red] {e}")
        raise typer.Exit(code=1)
    setup_logging(config["LOG_LEVEL"])

    if ctx.invoked_subcommand is None:
        rprint(
            Panel(
                "[bold]SSH Bath[/bold]\n\n"
                f"{HELP}\n\n"
                "[bold yellow]Available commands:[/bold yellow]\n"
                "  [bold]setup[/bold]        - Create a template .env file (and the run-config schema)\n"
                "  [bold]phase[/bold]        - Physical and mirage phase diagram\n"
                "  [bold]spectrum[/bold]     - Bloch bands or finite-lattice eigenvalues\n"
                "  [bold]selfenergy[/bold]   - Self-energy tables with quadrature deltas\n"
                "  [bold]bs[/bold]           - Bound-state photon profiles\n"
                "  [bold]dynamics[/bold]     - Emitter amplitudes in time\n"
                "  [bold]interaction[/bold]  - Bound-state mediated couplings\n"
                "  [bold]g2[/bold]           - Two-photon emission and g2 of a Kerr emitter\n"
                "  [bold]validate[/bold]     - Cross-check the analytic routes\n\n"
                "Run [bold]python src/app.py --help[/bold] for more information on available commands.",
                title="SSH Bath",
                expand=False,
            )
        )


@app.command()
def setup(
    schema: Optional[str] = typer.Option(
        None, "--schema", help="Also write the run-config JSON schema to this path"
    ),
):
    """
    Create a template .env.example file for configuration.
    """
    setup_command(schema)


@app.command()
def phase(
    preset: Optional[str] = PRESET,
    config: Optional[str] = CONFIG,
    output: Optional[str] = OUTPUT,
    svg: bool = SVG,
    workers: Optional[int] = WORKERS,
    j2: Optional[float] = J2,
    j1_values: Optional[str] = J1_VALUES,
    gamma_values: Optional[str] = GAMMA_VALUES,
):
    """
    Phase labels of the physical and the mirage bath over a (gamma_b, J1) grid.
    """
    _run(
        lambda: _overrides(j2=j2, output=output, svg=svg, sweep={"j1": j1_values, "gamma_b": gamma_values}),
        phase_command,
        preset,
        config,
        workers,
    )


@app.command()
def spectrum(
    preset: Optional[str] = PRESET,
    config: Optional[str] = CONFIG,
    output: Optional[str] = OUTPUT,
    svg: bool = SVG,
    workers: Optional[int] = WORKERS,
    j1: Optional[float] = J1,
    j2: Optional[float] = J2,
    gamma_b: Optional[float] = GAMMA_B,
    variant: Optional[BathVariant] = typer.Option(
        None, "--variant", case_sensitive=False, help="closed, physical or mirage Bloch bath"
    ),
    k_points: Optional[int] = typer.Option(None, "--k-points", help="Number of k samples"),
    sheet: Optional[Sheet] = SHEET,
    boundary: Optional[Boundary] = BOUNDARY,
    lattice_cells: Optional[int] = LATTICE,
    j1_values: Optional[str] = J1_VALUES,
):
    """
    Dispersion of one bath variant, or the eigenvalues of a finite lattice.
    """
    _run(
        lambda: _overrides(
            j1=j1,
            j2=j2,
            gamma_b=gamma_b,
            sheet=sheet,
            boundary=boundary,
            lattice_cells=lattice_cells,
            output=output,
            svg=svg,
            sweep={"j1": j1_values},
            variant=variant.value if variant else None,
            k_points=k_points,
        ),
        spectrum_command,
        preset,
        config,
        workers,
    )


@app.command()
def selfenergy(
    preset: Optional[str] = PRESET,
    config: Optional[str] = CONFIG,
    output: Optional[str] = OUTPUT,
    svg: bool = SVG,
    workers: Optional[int] = WORKERS,
    j1: Optional[float] = J1,
    j2: Optional[float] = J2,
    gamma_b: Optional[float] = GAMMA_B,
    omega: Optional[float] = OMEGA,
    sheet: Optional[Sheet] = SHEET,
    pair: Optional[SublatticePair] = typer.Option(None, "--pair", case_sensitive=False, help="AA, BB, AB or BA"),
    d: Optional[str] = D_VALUES,
    re_min: Optional[float] = typer.Option(None, "--re-min", help="Lowest Re(omega)"),
    re_max: Optional[float] = typer.Option(None, "--re-max", help="Highest Re(omega)"),
    n_omega: Optional[int] = typer.Option(None, "--n-omega", help="Number of frequencies"),
    im: Optional[float] = typer.Option(None, "--im", help="Im(omega) of the grid"),
):
    """
    Sigma_d on a frequency grid next to the Brillouin-zone quadrature.
    """
    _run(
        lambda: _overrides(
            j1=j1,
            j2=j2,
            gamma_b=gamma_b,
            omega=omega,
            sheet=sheet,
            output=output,
            svg=svg,
            sweep={"d": d},
            pair=pair.value if pair else None,
            frequencies={"re_min": re_min, "re_max": re_max, "n_points": n_omega, "im": im},
        ),
        selfenergy_command,
        preset,
        config,
        workers,
    )


@app.command()
def bs(
    preset: Optional[str] = PRESET,
    config: Optional[str] = CONFIG,
    output: Optional[str] = OUTPUT,
    svg: bool = SVG,
    workers: Optional[int] = WORKERS,
    j1: Optional[float] = J1,
    j2: Optional[float] = J2,
    gamma_b: Optional[float] = GAMMA_B,
    omega: Optional[float] = OMEGA,
    gamma_a: Optional[float] = GAMMA_A,
    delta: Optional[float] = DELTA,
    sheet: Optional[Sheet] = SHEET,
    boundary: Optional[Boundary] = BOUNDARY,
    lattice_cells: Optional[int] = LATTICE,
    j1_values: Optional[str] = J1_VALUES,
    delta_values: Optional[str] = DELTA_VALUES,
):
    """
    Photon profile of the emitter bound state (dark state for open chains).
    """
    _run(
        lambda: _overrides(
            j1=j1,
            j2=j2,
            gamma_b=gamma_b,
            omega=omega,
            gamma_a=gamma_a,
            delta=delta,
            sheet=sheet,
            boundary=boundary,
            lattice_cells=lattice_cells,
            output=output,
            svg=svg,
            sweep={"j1": j1_values, "delta": delta_values},
        ),
        bs_command,
        preset,
        config,
        workers,
    )


@app.command()
def dynamics(
    preset: Optional[str] = PRESET,
    config: Optional[str] = CONFIG,
    output: Optional[str] = OUTPUT,
    svg: bool = SVG,
    workers: Optional[int] = WORKERS,
    j1: Optional[float] = J1,
    j2: Optional[float] = J2,
    gamma_b: Optional[float] = GAMMA_B,
    omega: Optional[float] = OMEGA,
    gamma_a: Optional[float] = GAMMA_A,
    delta: Optional[float] = DELTA,
    sheet: Optional[Sheet] = SHEET,
    boundary: Optional[Boundary] = BOUNDARY,
    lattice_cells: Optional[int] = LATTICE,
    t_max: Optional[float] = T_MAX,
    n_times: Optional[int] = N_TIMES,
    j1_values: Optional[str] = J1_VALUES,
    gamma_values: Optional[str] = GAMMA_VALUES,
):
    """
    Emitter amplitudes and populations after one emitter is excited.
    """
    _run(
        lambda: _overrides(
            j1=j1,
            j2=j2,
            gamma_b=gamma_b,
            omega=omega,
            gamma_a=gamma_a,
            delta=delta,
            sheet=sheet,
            boundary=boundary,
            lattice_cells=lattice_cells,
            t_max=t_max,
            n_times=n_times,
            output=output,
            svg=svg,
            sweep={"j1": j1_values, "gamma_b": gamma_values},
        ),
        dynamics_command,
        preset,
        config,
        workers,
    )


@app.command()
def interaction(
    preset: Optional[str] = PRESET,
    config: Optional[str] = CONFIG,
    output: Optional[str] = OUTPUT,
    svg: bool = SVG,
    workers: Optional[int] = WORKERS,
    j2: Optional[float] = J2,
    gamma_b: Optional[float] = GAMMA_B,
    omega: Optional[float] = OMEGA,
    gamma_a: Optional[float] = GAMMA_A,
    delta: Optional[float] = DELTA,
    sheet: Optional[Sheet] = SHEET,
    d: Optional[str] = D_VALUES,
    j1_values: Optional[str] = J1_VALUES,
):
    """
    Bound-state mediated couplings Sigma^AB_d and Sigma^BA_d over J1 and d.
    """
    _run(
        lambda: _overrides(
            j2=j2,
            gamma_b=gamma_b,
            omega=omega,
            gamma_a=gamma_a,
            delta=delta,
            sheet=sheet,
            output=output,
            svg=svg,
            sweep={"j1": j1_values, "d": d},
        ),
        interaction_command,
        preset,
        config,
        workers,
    )


@app.command()
def g2(
    preset: Optional[str] = PRESET,
    config: Optional[str] = CONFIG,
    output: Optional[str] = OUTPUT,
    svg: bool = SVG,
    workers: Optional[int] = WORKERS,
    j1: Optional[float] = J1,
    j2: Optional[float] = J2,
    gamma_b: Optional[float] = GAMMA_B,
    omega: Optional[float] = OMEGA,
    gamma_a: Optional[float] = GAMMA_A,
    delta: Optional[float] = DELTA,
    sheet: Optional[Sheet] = SHEET,
    u: Optional[float] = typer.Option(None, "--u", help="Kerr strength U"),
    omega_d: Optional[float] = typer.Option(None, "--omega-d", help="Drive frequency"),
    u_values: Optional[str] = typer.Option(None, "--u-values", help="Sweep U: 'a,b,c' or 'start:stop:count'"),
    omega_d_values: Optional[str] = typer.Option(None, "--omega-d-values", help="Sweep the drive frequency"),
    tau: Optional[str] = typer.Option(None, "--tau", help="Delays for g2(tau)"),
    emission: Optional[bool] = typer.Option(None, "--emission", help="Two-photon emission D(t) instead of g2"),
    lattice_cells: Optional[int] = LATTICE,
    t_max: Optional[float] = T_MAX,
    n_times: Optional[int] = N_TIMES,
):
    """
    Two-photon emission and steady-state g2 of a weakly driven Kerr emitter.
    """
    _run(
        lambda: _overrides(
            j1=j1,
            j2=j2,
            gamma_b=gamma_b,
            omega=omega,
            gamma_a=gamma_a,
            delta=delta,
            sheet=sheet,
            lattice_cells=lattice_cells,
            t_max=t_max,
            n_times=n_times,
            output=output,
            svg=svg,
            sweep={"u": u_values, "omega_d": omega_d_values, "tau": tau},
            nonlinear={"u": u, "drive_omega": omega_d},
            emission=emission,
        ),
        g2_command,
        preset,
        config,
        workers,
    )


@app.command()
def validate(
    quick: bool = typer.Option(False, "--quick", "-q", help="Reduced lattice sizes and time windows"),
    only: Optional[List[str]] = typer.Option(None, "--only", help="Run only this check (repeatable)"),
    seed: int = typer.Option(0, "--seed", help="Seed of the randomized checks"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
):
    """
    Cross-check the closed forms against quadrature, the other sheet and finite lattices.
    """
    asyncio.run(validate_command(quick=quick, only=only, seed=seed, as_json=as_json, console=console))


if __name__ == "__main__":
    app()
