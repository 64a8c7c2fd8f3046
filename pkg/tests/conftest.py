"""
Shared fixtures for tests
"""

import os
import sys
import time
from unittest.mock import MagicMock

import pytest
from rich.console import Console

# Set environment variables for testing
os.environ["SSH_WORKERS"] = "2"
os.environ["LOG_LEVEL"] = "WARNING"

sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from api.models import BathParams, EmitterSpec  # noqa: E402


@pytest.fixture
def point_gap_bath():
    """Dissipative bath with the emitter frequency inside the point gap."""
    return BathParams(j1=1.02, j2=1.0, gamma_b=0.05)


@pytest.fixture
def trivial_bath():
    """Dissipative bath in the trivial line-gapped phase."""
    return BathParams(j1=1.1, j2=1.0, gamma_b=0.05)


@pytest.fixture
def closed_bath():
    """Closed bath in the trivial phase."""
    return BathParams(j1=1.1, j2=1.0)


@pytest.fixture
def emitter():
    """Resonant emitter with gamma_a = gamma_b of the dissipative fixtures."""
    return EmitterSpec(omega_rabi=0.2, gamma_a=0.05)


@pytest.fixture
def mock_console():
    """Mock Rich console for testing."""
    mock_console = MagicMock(spec=Console)
    # Add required attributes for Rich Progress
    mock_console.get_time = MagicMock(return_value=time.monotonic())
    mock_console.is_jupyter = False
    mock_console.is_interactive = True
    return mock_console
