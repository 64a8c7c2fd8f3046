"""
Tests for the main app module
"""

import os
import sys
from unittest.mock import AsyncMock, MagicMock, patch

import pytest
from rich.panel import Panel
from typer.testing import CliRunner

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from app import _overrides, _pruned, app, main, setup


class TestApp:
    """Tests for the main app."""

    runner = CliRunner()

    def test_main_without_command(self):
        """Test main function without subcommand."""
        with patch("app.rprint") as mock_print, patch("app.setup_logging") as mock_logging:
            ctx = MagicMock()
            ctx.invoked_subcommand = None

            main(ctx, log_level=None)

            mock_logging.assert_called_once()
            mock_print.assert_called_once()
            panel_arg = mock_print.call_args[0][0]
            assert isinstance(panel_arg, Panel)
            assert "SSH Bath" in str(panel_arg.title)

    def test_setup_command(self):
        """Test setup command."""
        with patch("app.setup_command") as mock_setup:
            setup(schema=None)

            mock_setup.assert_called_once_with(None)

    def test_pruned(self):
        values = {"bath": {"j1": None, "j2": 1.0}, "emitter": {"omega_rabi": None}, "sheet": None}
        assert _pruned(values) == {"bath": {"j2": 1.0}}

    def test_overrides(self):
        overrides = _overrides(j1=0.7, svg=True, sweep={"d": "0,1", "j1": None}, k_points=32)
        assert overrides == {
            "bath": {"j1": 0.7},
            "output": {"svg": True},
            "sweep": {"d": [0.0, 1.0]},
            "k_points": 32,
        }

    @pytest.mark.parametrize(
        "command,expected_exit_code",
        [
            (["--help"], 0),
            (["setup"], 0),
            (["phase", "--help"], 0),
            (["--log-level", "LOUD"], 1),
        ],
    )
    def test_cli_commands(self, command, expected_exit_code):
        """Test CLI commands using CliRunner."""
        with patch("app.setup_command"):
            result = self.runner.invoke(app, command)
            assert result.exit_code == expected_exit_code

    def test_phase_sweep_values(self):
        with patch("app.phase_command", new_callable=AsyncMock) as mock_phase:
            result = self.runner.invoke(app, ["phase", "--j1-values", "0.5,1.5", "-w", "3"])

        assert result.exit_code == 0
        args = mock_phase.call_args[0]
        assert args[:2] == (None, None)
        assert args[2] == {"sweep": {"j1": [0.5, 1.5]}}
        assert args[3] == 3

    def test_bad_sweep_values(self):
        with patch("app.phase_command", new_callable=AsyncMock) as mock_phase:
            result = self.runner.invoke(app, ["phase", "--j1-values", "abc"])

        assert result.exit_code == 1
        assert '"exit_code": 1' in result.output
        mock_phase.assert_not_called()

    def test_dynamics_preset_overrides(self):
        with patch("app.dynamics_command", new_callable=AsyncMock) as mock_dynamics:
            result = self.runner.invoke(
                app, ["dynamics", "-p", "fig2b", "--sheet", "mirage", "-n", "20", "--t-max", "10"]
            )

        assert result.exit_code == 0
        preset, config, overrides, workers = mock_dynamics.call_args[0]
        assert preset == "fig2b"
        assert config is None
        assert overrides == {"sheet": "mirage", "lattice_cells": 20, "times": {"t_max": 10.0}}
        assert workers is None

    def test_g2_emission(self):
        with patch("app.g2_command", new_callable=AsyncMock) as mock_g2:
            result = self.runner.invoke(app, ["g2", "--u", "0.2", "--emission"])

        assert result.exit_code == 0
        overrides = mock_g2.call_args[0][2]
        assert overrides == {"nonlinear": {"u": 0.2}, "emission": True}

    def test_validate_options(self):
        with patch("app.validate_command", new_callable=AsyncMock) as mock_validate:
            result = self.runner.invoke(app, ["validate", "-q", "--only", "g2_sanity", "--seed", "3"])

        assert result.exit_code == 0
        kwargs = mock_validate.call_args[1]
        assert kwargs["quick"] is True
        assert kwargs["only"] == ["g2_sanity"]
        assert kwargs["seed"] == 3
        assert kwargs["as_json"] is False
