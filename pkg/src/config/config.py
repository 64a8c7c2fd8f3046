import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from rich import print as rprint

from api.models import RunConfig
from config.settings import Settings, settings

PRESET_DIR = Path(__file__).parent / "presets"
LOG_LEVELS = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}


def get_config(
    cli_workers: Optional[int] = None,
    cli_output_dir: Optional[str] = None,
    cli_log_level: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Load configuration from .env file with CLI overrides.

    Args:
        cli_workers: Optional number of concurrent sweep workers from CLI arguments
        cli_output_dir: Optional directory for result files from CLI arguments
        cli_log_level: Optional loguru level from CLI arguments

    Returns:
        Dictionary with configuration values

    Raises:
        ValueError: If a configuration value is invalid
    """
    config = {
        "SSH_WORKERS": cli_workers or settings.SSH_WORKERS,
        "OUTPUT_DIR": cli_output_dir or settings.OUTPUT_DIR,
        "LOG_LEVEL": (cli_log_level or settings.LOG_LEVEL).upper(),
    }

    if config["SSH_WORKERS"] < 1:
        raise ValueError(f"SSH_WORKERS must be at least 1 (got {config['SSH_WORKERS']})")
    if config["LOG_LEVEL"] not in LOG_LEVELS:
        raise ValueError(
            f"Unknown log level {config['LOG_LEVEL']}. Choose one of: {', '.join(sorted(LOG_LEVELS))}"
        )
    return config


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Read and validate a JSON run configuration.

    Raises:
        ValueError: If the file does not exist or is not valid JSON
        pydantic.ValidationError: If the content does not match the schema
    """
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"Config file '{path}' does not exist")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"Config file '{path}' is not valid JSON: {e}") from e
    return RunConfig.model_validate(payload)


def list_presets() -> List[str]:
    return sorted(path.stem for path in PRESET_DIR.glob("*.json"))


def load_preset(name: str) -> RunConfig:
    """
    Load a shipped preset by name (the figure it reproduces, e.g. fig2b).

    Raises:
        ValueError: If no preset has this name
    """
    path = PRESET_DIR / f"{name}.json"
    if not path.is_file():
        raise ValueError(f"Unknown preset '{name}'. Available: {', '.join(list_presets())}")
    return load_run_config(path)


def write_schema(path: Union[str, Path] = "run_config.schema.json") -> Path:
    """Publish the JSON schema of run configurations."""
    path = Path(path)
    path.write_text(json.dumps(RunConfig.model_json_schema(), indent=2) + "\n", encoding="utf-8")
    return path


def create_env_example() -> None:
    """
    Create a .env.example file listing every setting with its default.
    """
    lines = ["# Settings for the SSH bath toolkit; every value below is the default", ""]
    for name, info in Settings.model_fields.items():
        lines.append(f"{name}={info.default}")
    env_example_content = "\n".join(lines) + "\n"

    with open(".env.example", "w") as f:
        f.write(env_example_content)

    rprint("[bold green]Created .env.example file successfully.[/bold green]")
