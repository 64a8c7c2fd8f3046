"""
Tests for the bound-state module
"""

import os
import sys

import numpy as np
import pytest

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from api.models import BathParams, Boundary, EmitterSpec, Sheet, Sublattice, SublatticePair
from core.bound_states import (
    MAX_WINDOW,
    MIN_WINDOW,
    bs_energy,
    bs_midgap_closed_form,
    bs_wavefunction,
    default_window,
    enumerate_bs_energies,
    interaction_at_bound_state,
    obc_dark_state,
    pole_equation,
)
from core.lattice_oracle import build_heff, embed_bound_state
from core.self_energy import interaction_single_pole
from misc.errors import ConfigError, NotMidgap, WindowTooSmall


class TestEnergies:
    """Tests for the pole-equation roots."""

    @pytest.mark.parametrize("sheet", list(Sheet))
    def test_midgap_energy(self, trivial_bath, emitter, sheet):
        """Test a resonant emitter binds at -i gamma_b/2."""
        omega = bs_energy(trivial_bath, emitter, sheet)
        assert omega.value == -0.025j
        assert omega.sheet == sheet

    def test_detuned_root_in_closed_gap(self, closed_bath):
        """Test a detuned emitter binds on the real axis inside the gap."""
        emitter = EmitterSpec(delta=0.02, omega_rabi=0.05)
        omega = bs_energy(closed_bath, emitter, Sheet.FIRST).value
        assert abs(omega.imag) < 1e-9
        assert abs(omega.real) < 0.1
        assert abs(complex(pole_equation(closed_bath, emitter, omega, Sheet.FIRST))) < 1e-10

    def test_enumerate_finds_midgap_root(self, closed_bath):
        """Test the grid scan finds the root at zero of a resonant emitter."""
        roots = enumerate_bs_energies(closed_bath, EmitterSpec(omega_rabi=0.05), Sheet.FIRST)
        assert roots
        assert abs(roots[0].value) < 1e-9


class TestProfiles:
    """Tests for bound-state wavefunctions."""

    def test_wavefunction_is_normalized(self, trivial_bath, emitter):
        """Test the emitter and photon weights sum to one."""
        state = bs_wavefunction(trivial_bath, emitter, Sheet.SECOND)
        assert state.norm() == pytest.approx(1.0)
        assert state.phi_a.real > 0

    @pytest.mark.parametrize("sublattice", list(Sublattice))
    @pytest.mark.parametrize("j1", [0.7, 1.3])
    def test_closed_form_matches_wavefunction(self, sublattice, j1):
        """Test the midgap tables agree with the Green-function profile."""
        params = BathParams(j1=j1, j2=1.0)
        emitter = EmitterSpec(sublattice=sublattice, omega_rabi=0.1)
        numeric = bs_wavefunction(params, emitter, Sheet.FIRST, window=60)
        closed = bs_midgap_closed_form(params, emitter, Sheet.FIRST, window=60)
        assert np.allclose(numeric.f_a, closed.f_a, atol=1e-10)
        assert np.allclose(numeric.f_b, closed.f_b, atol=1e-10)

    def test_midgap_dresses_other_sublattice(self, trivial_bath, emitter):
        """Test an A emitter at midgap leaves the A sites dark."""
        state = bs_midgap_closed_form(trivial_bath, emitter, Sheet.SECOND)
        assert np.all(state.f_a == 0)
        assert np.any(state.f_b != 0)
        assert state.amplitude(Sublattice.B, 10**6) == 0

    def test_closed_form_not_midgap(self, trivial_bath):
        """Test the tables refuse detuned emitters."""
        with pytest.raises(NotMidgap):
            bs_midgap_closed_form(trivial_bath, EmitterSpec(delta=0.1, gamma_a=0.05, omega_rabi=0.2), Sheet.FIRST)

    def test_window_too_small(self, closed_bath):
        """Test a truncated profile with visible tails is refused."""
        with pytest.raises(WindowTooSmall):
            bs_wavefunction(closed_bath, EmitterSpec(omega_rabi=0.1), Sheet.FIRST, window=3)

    @pytest.mark.parametrize("window", [60, None])
    def test_rounding_on_dark_sublattice(self, window):
        """Test rounding noise on the dark sublattice does not count as a tail."""
        params = BathParams(j1=1.3, j2=1.0)
        state = bs_wavefunction(params, EmitterSpec(omega_rabi=0.1), Sheet.FIRST, window=window)
        assert np.max(np.abs(state.f_a)) < 1e-12
        assert state.norm() == pytest.approx(1.0)

    def test_default_window(self):
        """Test the window bounds for fast and slow decay."""
        assert default_window(0.0) == MIN_WINDOW
        assert default_window(1e-6) == MIN_WINDOW
        assert default_window(0.9) == 263
        assert default_window(0.99999) == MAX_WINDOW


class TestDarkState:
    """Tests for the open-chain dark state."""

    @pytest.mark.parametrize("j1", [0.9, 1.1])
    @pytest.mark.parametrize("sublattice,cell", [(Sublattice.A, 5), (Sublattice.B, 14)])
    def test_exact_eigenvector(self, j1, sublattice, cell):
        """Test H_eff applied to the dark state returns -i gamma_b/2 times it."""
        params = BathParams(j1=j1, j2=1.0, gamma_b=0.1)
        emitter = EmitterSpec(sublattice=sublattice, cell=cell, gamma_a=0.1, omega_rabi=0.1)
        state = obc_dark_state(params, emitter, n_b=20)
        op = build_heff(params, [emitter], 20, Boundary.OBC, Sheet.FIRST)
        vector = embed_bound_state(op, state)
