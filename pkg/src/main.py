"""
Console entry point: `python src/main.py <command>`
"""

import os
import sys

# src/ holds top-level packages (api, commands, core, ...)
SRC_DIR = os.path.dirname(os.path.abspath(__file__))
if SRC_DIR not in sys.path:
    sys.path.insert(0, SRC_DIR)

from app import app  # noqa: E402


def run() -> None:
    app(prog_name="ssh-bath")


if __name__ == "__main__":
    run()
