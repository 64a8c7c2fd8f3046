"""
Setup command for the SSH bath toolkit
"""

from typing import Optional

from rich import print as rprint
from rich.panel import Panel

from config.config import create_env_example, list_presets, write_schema


def setup_command(schema: Optional[str] = None):
    """
    Create a template .env.example file and, optionally, the run-config JSON schema.
    """
    create_env_example()
    message = (
        "[bold green]Setup completed![/bold green]\n\n"
        "A .env.example file has been created. Rename it to .env to change worker count, "
        "output directory or numerical tolerances."
    )
    if schema:
        path = write_schema(schema)
        message += f"\n\nRun-config schema written to {path}."
    message += f"\n\nPresets: {', '.join(list_presets())}"
    rprint(Panel(message, title="SSH Bath - Setup", expand=False))
