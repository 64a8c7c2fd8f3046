"""
Helpers shared by the subcommands: run-config resolution, sweep dispatch and result files
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence

import numpy as np
import typer
from loguru import logger
from pydantic import ValidationError
from rich import print as rprint
from rich.console import Console

from api.models import BathParams, Command, EmitterSpec, RunConfig
from config.config import get_config, load_preset, load_run_config
from core.sweeps import SweepOutcome, run_sweep, sweep_points
from misc.errors import CONFIG_EXIT_CODE, NUMERICAL_EXIT_CODE, ConfigError, SSHBathError
from misc.output import plot_rows, write_csv
from misc.utils import format_run_summary

Row = Dict[str, Any]


def error_payload(error: Exception) -> Dict[str, Any]:
    """Machine-readable description of an error, with its exit code."""
    if isinstance(error, SSHBathError):
        return error.to_dict()
    exit_code = CONFIG_EXIT_CODE if isinstance(error, (ValidationError, ValueError)) else NUMERICAL_EXIT_CODE
    return {"error": type(error).__name__, "message": str(error), "exit_code": exit_code}


def fail(error: Exception) -> NoReturn:
    """Report an error on the console, its JSON payload on stdout, and exit."""
    payload = error_payload(error)
    rprint(f"[bold red]Error:[/bold red] {payload['message']}")
    typer.echo(json.dumps(payload, sort_keys=True))
    raise typer.Exit(code=payload["exit_code"])


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def resolve_run_config(
    command: Command,
    preset: Optional[str],
    config_path: Optional[str],
    overrides: Optional[Dict[str, Any]] = None,
    defaults: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """
    Build the run configuration of a subcommand.

    The base comes from a preset, a JSON file, or the command defaults; CLI
    overrides are merged on top (None values are ignored, "emitter" updates
    every emitter) and the result is validated and normalized to units of J2.

    Raises:
        ValueError: If both a preset and a config file are given
        ConfigError: If the loaded config belongs to another command
        pydantic.ValidationError: If the merged config is invalid
    """
    if preset and config_path:
        raise ValueError("Use either --preset or --config, not both")
    if preset:
        base = load_preset(preset).model_dump(mode="json")
    elif config_path:
        base = load_run_config(config_path).model_dump(mode="json")
    else:
        base = _merge({"command": command.value}, defaults or {})
    if base["command"] != command.value:
        raise ConfigError(f"The configuration is for '{base['command']}', not '{command.value}'")

    overrides = dict(overrides or {})
    emitter = {k: v for k, v in (overrides.pop("emitter", None) or {}).items() if v is not None}
    merged = _merge(base, overrides)
    if emitter:
        merged["emitters"] = [_merge(spec, emitter) for spec in merged.get("emitters", [])]
        if merged.get("nonlinear"):
            merged["nonlinear"]["base"] = _merge(merged["nonlinear"]["base"], emitter)
    run = RunConfig.model_validate(merged)
    logger.debug(f"Resolved {command.value} config: {run.description or 'inline'}")
    return run.normalized()


def at_point(run: RunConfig, point: Dict[str, float]) -> RunConfig:
    """The configuration with the sweep values of one point applied (d and tau are left to the worker)."""
    update: Dict[str, Any] = {}
    bath = {key: point[key] for key in ("j1", "gamma_b") if key in point}
    if bath:
        update["bath"] = BathParams(**{**run.bath.model_dump(), **bath})
    if "delta" in point:
        update["emitters"] = [e.model_copy(update={"delta": point["delta"]}) for e in run.emitters]
    if run.nonlinear is not None:
        nonlinear: Dict[str, Any] = {}
        if "delta" in point:
            nonlinear["base"] = run.nonlinear.base.model_copy(update={"delta": point["delta"]})
        if "u" in point:
            nonlinear["u"] = point["u"]
        if "omega_d" in point:
            nonlinear["drive_omega"] = point["omega_d"]
        if nonlinear:
            update["nonlinear"] = run.nonlinear.model_copy(update=nonlinear)
    return run.model_copy(update=update)


def parse_values(text: Optional[str]) -> Optional[List[float]]:
    """
    Parse a CLI value list: "0.7,1.02,1.1" or an inclusive range "start:stop:count".

    Raises:
        ValueError: If the text is not a number list or range
    """
    if text is None:
        return None
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"Range '{text}' must look like start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError(f"Range '{text}' needs a positive count")
        return [float(v) for v in np.linspace(start, stop, count)]
    return [float(part) for part in text.split(",") if part.strip()]


def centred(emitters: Sequence[EmitterSpec], n_b: int) -> List[EmitterSpec]:
    """Shift emitters rigidly so the first one sits in the middle cell of an n_b-cell lattice."""
    if not emitters:
        return []
    offset = n_b // 2 - emitters[0].cell
    return [e.model_copy(update={"cell": e.cell + offset}) for e in emitters]


def output_path(run: RunConfig, name: str, output_dir: str) -> Path:
    if run.output.path:
        return Path(run.output.path)
    return Path(output_dir) / f"{name}.csv"


async def run_points(
    run: RunConfig,
    worker: Callable[[RunConfig, Dict[str, float]], List[Row]],
    console: Console,
    workers: Optional[int] = None,
    axes: Optional[Sequence[str]] = None,
) -> SweepOutcome:
    """
    Evaluate worker at every point of the run's sweep (restricted to `axes`) in the worker pool.

    Raises:
        ValueError: If the worker count from CLI or settings is invalid
    """
    config = get_config(cli_workers=workers)
    sweep = run.sweep if axes is None else {k: v for k, v in run.sweep.items() if k in axes}
    points = sweep_points(sweep)

    def evaluate(point: Dict[str, float]) -> List[Row]:
        return worker(at_point(run, point), point)

    return await run_sweep(
        points,
        evaluate,
        console,
        max_concurrent=config["SSH_WORKERS"],
        description=f"Evaluating {run.command.value}:",
    )


def finish(
    run: RunConfig,
    outcome: SweepOutcome,
    name: str,
    x: str,
    ys: Sequence[str],
    group: Optional[str] = None,
    log_y: bool = False,
) -> Path:
    """
    Write the rows of a run, show the summary, and exit non-zero if any point failed.

    Returns:
        Path of the CSV file
    """
    config = get_config()
    path = write_csv(outcome.rows, output_path(run, name, config["OUTPUT_DIR"]))
    svg = None
    if run.output.svg and outcome.rows:
        svg = plot_rows(outcome.rows, x, ys, path.with_suffix(".svg"), group=group, title=run.description, log_y=log_y)
    rprint(format_run_summary(run.command.value, outcome.total, len(outcome.rows), len(outcome.failures), path, svg))
    if outcome.failures:
        for failure in outcome.failures:
            payload = {key: value for key, value in failure.items() if key not in ("status", "rows")}
            typer.echo(json.dumps(payload, sort_keys=True, default=str))
        raise typer.Exit(code=outcome.exit_code)
    return path
