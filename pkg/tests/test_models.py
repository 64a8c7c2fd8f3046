"""
Tests for data models
"""

import os
import sys

import numpy as np
import pytest
from pydantic import ValidationError

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from api.models import (
    BathParams,
    Command,
    ContourSpec,
    EmitterSpec,
    FrequencyGrid,
    NonlinearEmitterSpec,
    RunConfig,
    Sublattice,
    SublatticePair,
)


def _dynamics(**extra):
    data = {
        "command": "dynamics",
        "bath": {"j1": 1.1, "j2": 1.0, "gamma_b": 0.05},
        "emitters": [{"omega_rabi": 0.2, "gamma_a": 0.05}],
    }
    data.update(extra)
    return RunConfig(**data)


class TestParameterModels:
    """Tests for bath and emitter parameters."""

    def test_bath_defaults(self):
        """Test the bath is closed unless gamma_b is given."""
        bath = BathParams(j1=0.9, j2=1.0)
        assert bath.gamma_b == 0.0
        assert BathParams(j1=0.9, j2=1.0, gamma_b=0.1).closed() == bath

    def test_bath_rejects_negative(self):
        """Test negative hoppings and losses are rejected."""
        with pytest.raises(ValidationError):
            BathParams(j1=-0.1, j2=1.0)
        with pytest.raises(ValidationError):
            BathParams(j1=1.0, j2=0.0)
        with pytest.raises(ValidationError):
            BathParams(j1=1.0, j2=1.0, gamma_b=-0.1)

    def test_delta_prime(self):
        """Test the complex detuning Delta - i gamma_a/2."""
        emitter = EmitterSpec(delta=0.3, gamma_a=0.1, omega_rabi=0.2)
        assert emitter.delta_prime == complex(0.3, -0.05)
        assert emitter.sublattice == Sublattice.A

    def test_frozen(self):
        """Test parameter models are immutable."""
        with pytest.raises(ValidationError):
            BathParams(j1=1.0, j2=1.0).j1 = 2.0

    def test_pair_from_sites(self):
        """Test sublattice pairs are built from row and column sites."""
        assert SublatticePair.from_sites(Sublattice.B, Sublattice.A) == SublatticePair.BA

    def test_contour_power_of_two(self):
        """Test contour sample counts must be powers of two."""
        assert ContourSpec(n_omega=1024).n_omega == 1024
        with pytest.raises(ValidationError):
            ContourSpec(n_omega=1000)

    def test_frequency_grid(self):
        """Test the grid is real-spaced at a fixed imaginary part."""
        grid = FrequencyGrid(re_min=-1, re_max=1, n_points=3, im=0.1).grid()
        assert np.allclose(grid, [-1 + 0.1j, 0.1j, 1 + 0.1j])
        with pytest.raises(ValidationError):
            FrequencyGrid(re_min=1, re_max=-1)


class TestRunConfig:
    """Tests for complete run configurations."""

    def test_valid_dynamics(self):
        """Test a minimal dynamics configuration."""
        run = _dynamics()
        assert run.command == Command.DYNAMICS
        assert run.times.grid()[-1] == 100.0
        assert run.lattice_cells is None

    def test_emitter_required(self):
        """Test emitter commands need an emitter."""
        with pytest.raises(ValidationError) as exc_info:
            _dynamics(emitters=[])
        assert "needs at least one emitter" in str(exc_info.value)

    def test_nonlinear_required(self):
        """Test g2 needs a Kerr emitter."""
        with pytest.raises(ValidationError):
            RunConfig(command="g2", bath={"j1": 1.01, "j2": 1.0})

    def test_unknown_sweep_key(self):
        """Test sweep axes are restricted to known names."""
        with pytest.raises(ValidationError) as exc_info:
            _dynamics(sweep={"temperature": [1.0]})
        assert "temperature" in str(exc_info.value)

    def test_initial_in_range(self):
        """Test the initially excited emitter must exist."""
        with pytest.raises(ValidationError):
            _dynamics(initial=1)

    def test_normalized_units(self):
        """Test frequencies are divided and times multiplied by the unit scale."""
        run = _dynamics(
            unit_scale=2.0,
            bath={"j1": 2.2, "j2": 2.0, "gamma_b": 0.1},
            emitters=[{"omega_rabi": 0.4, "gamma_a": 0.1, "delta": 0.2}],
            sweep={"j1": [1.8, 2.2], "d": [1, 2]},
            times={"t_max": 50.0, "n_points": 11},
        ).normalized()
        assert run.unit_scale == 1.0
        assert run.bath == BathParams(j1=1.1, j2=1.0, gamma_b=0.05)
        assert run.emitters[0].omega_rabi == pytest.approx(0.2)
        assert run.emitters[0].delta == pytest.approx(0.1)
        assert run.sweep == {"j1": [0.9, 1.1], "d": [1, 2]}
        assert run.times.t_max == 100.0

    def test_normalized_nonlinear(self):
        """Test the Kerr strength and drive are rescaled too."""
        run = RunConfig(
            command="g2",
            unit_scale=10.0,
            bath={"j1": 10.1, "j2": 10.0, "gamma_b": 1.0},
            nonlinear=NonlinearEmitterSpec(base=EmitterSpec(omega_rabi=0.1, gamma_a=0.6), u=1.0, drive_omega=0.5),
        ).normalized()
        assert run.nonlinear.u == pytest.approx(0.1)
        assert run.nonlinear.drive_omega == pytest.approx(0.05)
        assert run.nonlinear.base.gamma_a == pytest.approx(0.06)

    def test_normalized_identity(self):
        """Test unit scale one leaves the configuration untouched."""
        run = _dynamics()
        assert run.normalized() is run
