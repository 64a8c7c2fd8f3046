"""
Tests for the validation suite
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
from core import validation
from core.lattice_oracle import build_heff
from core.self_energy import interaction_single_pole
from core.validation import CHECKS, CheckResult, ValidationReport, run_validation
from misc.errors import NoConvergence

FAST_CHECKS = ["self_energy_quadrature", "region_two_zero", "g2_sanity", "spectral_duality", "contraction"]


class TestRegistry:
    """Tests for the check registry."""

    def test_all_checks_registered(self):
        """Test every acceptance check is registered in order."""
        assert list(CHECKS) == [
            "self_energy_quadrature",
            "region_two_zero",
            "bound_state_profiles",
            "sheet_equivalence",
            "contour_vs_oracle",
            "anomalous_interaction",
            "two_excitation_duality",
            "g2_sanity",
            "spectral_duality",
            "contraction",
        ]

    def test_unknown_check(self):
        """Test unknown names are refused before anything runs."""
        with pytest.raises(ValueError):
            run_validation(only=["nope"])


class TestReport:
    """Tests for the validation report."""

    def test_exit_code(self):
        """Test a failed check makes the report exit with the numerical code."""
        report = ValidationReport(quick=True, checks=[CheckResult("a", True, "", 0.1), CheckResult("b", False, "", 0.2)])
        assert not report.passed
        assert report.exit_code == 2
        assert report.to_dict()["checks"][1]["name"] == "b"

    def test_error_becomes_failure(self, monkeypatch):
        """Test a check raising a library error is reported as failed."""

        def broken(quick, rng):
            raise NoConvergence("stuck")

        monkeypatch.setitem(validation.CHECKS, "broken", broken)
        report = run_validation(only=["broken"])
        assert report.checks[0].passed is False
        assert "NoConvergence" in report.checks[0].detail

    def test_skipped_in_quick_mode(self):
        """Test the long exchange check is skipped in quick mode."""
        report = run_validation(quick=True, only=["anomalous_interaction"])
        assert report.checks[0].skipped
        assert report.passed

    def test_seeded(self, monkeypatch):
        """Test every check gets a generator seeded the same way."""
        draws = []

        def sampler(quick, rng):
            draws.append(rng.random())
            return True, ""

        monkeypatch.setitem(validation.CHECKS, "sampler", sampler)
        run_validation(only=["sampler", "sampler"], seed=7)
        assert draws[0] == draws[1] == np.random.default_rng(7).random()


class TestQuickChecks:
    """Quick-mode runs of the inexpensive checks."""

    @pytest.mark.parametrize("name", FAST_CHECKS)
    def test_check_passes(self, name):
        """Test the check passes at quick scale."""
        report = run_validation(quick=True, only=[name])
        assert report.passed, report.checks[0].detail


class TestBoundStateProfiles:
    """Tests for the bound-state profile comparison."""

    def test_unbuilt_profile_fails(self, monkeypatch):
        """Test a case whose profile raises fails the check instead of being dropped."""

        def stuck(*args, **kwargs):
            raise NoConvergence("stuck")

        case = ("closed j1=1.1", BathParams(j1=1.1, j2=1.0), EmitterSpec(omega_rabi=0.1), Sheet.FIRST)
        monkeypatch.setattr(validation, "_bound_state_cases", lambda: [case])
        monkeypatch.setattr(validation, "bs_wavefunction", stuck)
        passed, detail = validation.check_bound_state_profiles(False, np.random.default_rng(0))
        assert not passed
        assert "closed j1=1.1 (NoConvergence)" in detail

    def test_wide_profile_gets_larger_ring(self):
        """Test a slowly decaying profile is compared on a ring that holds its tails."""
        params = BathParams(j1=1.02, j2=1.0)
        emitter = EmitterSpec(omega_rabi=0.1)
        state, ring = validation._fitted_bound_state(params, emitter, Sheet.FIRST, 500)
        assert ring > 500
        assert validation._edge(state) < validation.BS_TOLERANCE / 10
        op = build_heff(params, [emitter.model_copy(update={"cell": ring // 2})], ring, Boundary.PBC, Sheet.FIRST)
        assert validation._profile_error(op, state) < validation.BS_TOLERANCE


class TestExchange:
    """Tests for the point-gap exchange prediction."""

    def test_dressed_splitting_carries_emitter_weight(self):
        """Test the dressed pole pair splits by about 2 Z g, well below the bare 2 g."""
        params = BathParams(j1=1.02, **validation.REGIME_BATH)
        emitter = EmitterSpec(**validation.REGIME_EMITTER)
        pair = [
            EmitterSpec(sublattice=Sublattice.A, cell=0, **validation.REGIME_EMITTER),
            EmitterSpec(sublattice=Sublattice.B, cell=10, **validation.REGIME_EMITTER),
        ]
        couplings = [
            interaction_single_pole(params, emitter.omega_rabi, emitter.delta_prime, 10, order, Sheet.SECOND)
            for order in (SublatticePair.AB, SublatticePair.BA)
        ]
        bare = 2 * np.sqrt(abs(couplings[0] * couplings[1]))
        midgap = -0.5j * params.gamma_b
        weight = abs(validation._quasiparticle_weight(params, emitter, midgap))
        assert 0.3 < weight < 0.7
        splitting = validation._dressed_splitting(params, pair, (midgap + weight * bare / 2, midgap - weight * bare / 2))
        assert splitting < 0.75 * bare
        assert splitting == pytest.approx(weight * bare, rel=0.2)
