"""
Tests for the setup command
"""

import os
import sys
from unittest.mock import patch

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from commands.setup import setup_command


class TestSetupCommand:
    """Tests for setup command."""

    def test_setup_command(self):
        """Test setup command creates environment file."""
        with (
            patch("commands.setup.create_env_example") as mock_create_env,
            patch("commands.setup.write_schema") as mock_schema,
            patch("commands.setup.rprint"),
        ):
            setup_command()

            mock_create_env.assert_called_once()
            mock_schema.assert_not_called()

    def test_setup_command_with_schema(self):
        """Test setup command also writes the schema when asked."""
        with (
            patch("commands.setup.create_env_example"),
            patch("commands.setup.write_schema") as mock_schema,
            patch("commands.setup.rprint") as mock_rprint,
        ):
            mock_schema.return_value = "schema.json"
            setup_command("schema.json")

            mock_schema.assert_called_once_with("schema.json")
            panel = mock_rprint.call_args[0][0]
            assert "schema.json" in str(panel.renderable)
            assert "fig2b" in str(panel.renderable)
