"""
Tests for the contour-transform dynamics
"""

import math
import os
import sys

import numpy as np
import pytest

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from api.models import BathParams, Boundary, ContourSpec, EmitterSpec, Sheet, Sublattice, TimeSeries
from config.settings import settings
from core.dynamics import (
    bath_correlation,
    evolve_emitters,
    green_matrix,
    rabi_frequency_estimate,
    rabi_frequency_fit,
    renormalized_population,
    resolve_contour,
    rounding_error,
    singularity_top,
)
from core.lattice_oracle import build_heff, emitter_chain, emitter_label, evolve_state
from core.self_energy import sigma_onsite
from misc.errors import AliasingDetected, ConfigError, ContourTooLow, NoOscillationDetected

REGIMES = [0.7, 1.02, 1.1]


def _regime(j1):
    return BathParams(j1=j1, j2=1.0, gamma_b=0.05), EmitterSpec(omega_rabi=0.2, gamma_a=0.05)


class TestEvolveEmitters:
    """Tests for emitter amplitudes from the Green matrix."""

    @pytest.mark.parametrize("sheet", list(Sheet))
    def test_initial_amplitude(self, trivial_bath, emitter, sheet):
        """Test the excited emitter starts with amplitude one."""
        series = evolve_emitters(trivial_bath, [emitter], np.array([0.0, 1.0]), sheet)
        assert series["a0"][0] == pytest.approx(1.0, abs=1e-6)

    def test_two_emitters_start_apart(self, trivial_bath, emitter):
        """Test only the initially excited emitter is populated at t = 0."""
        partner = EmitterSpec(sublattice=Sublattice.B, cell=3, omega_rabi=0.2, gamma_a=0.05)
        series = evolve_emitters(trivial_bath, [emitter, partner], np.array([0.0, 1.0]), Sheet.FIRST, initial=1)
        assert series["a1"][0] == pytest.approx(1.0, abs=1e-6)
        assert abs(series["a0"][0]) < 1e-6

    @pytest.mark.parametrize("j1", REGIMES)
    def test_sheets_agree(self, j1):
        """Test both sheets give the same populations."""
        params, emitter = _regime(j1)
        t_grid = np.linspace(0.0, 30.0, 121)
        first = evolve_emitters(params, [emitter], t_grid, Sheet.FIRST)["a0"]
        second = evolve_emitters(params, [emitter], t_grid, Sheet.SECOND)["a0"]
        assert np.max(np.abs(np.abs(first) - np.abs(second))) < 1e-6

    @pytest.mark.parametrize("j1", REGIMES)
    def test_matches_lattice(self, j1):
        """Test the transform against direct integration on a 400-cell ring."""
        params, emitter = _regime(j1)
        t_grid = np.linspace(0.0, 30.0, 121)
        contour = np.abs(evolve_emitters(params, [emitter], t_grid, Sheet.FIRST)["a0"]) ** 2
        placed = emitter.model_copy(update={"cell": 200})
        op = build_heff(params, [placed], 400, Boundary.PBC, Sheet.FIRST)
        oracle = np.abs(evolve_state(op, op.basis_state(emitter_label(0)), t_grid)["a0"]) ** 2
        assert np.max(np.abs(contour - oracle)) < 1e-4

    def test_bad_initial(self, trivial_bath, emitter):
        """Test an initial index beyond the emitters is refused."""
        with pytest.raises(ConfigError):
            evolve_emitters(trivial_bath, [emitter], np.array([0.0, 1.0]), Sheet.FIRST, initial=1)

    def test_contour_too_low(self, trivial_bath, emitter):
        """Test a line below the real axis is refused on the first sheet."""
        with pytest.raises(ContourTooLow):
            evolve_emitters(trivial_bath, [emitter], np.array([0.0, 1.0]), Sheet.FIRST, ContourSpec(eta=-0.01))

    def test_aliasing(self, trivial_bath, emitter):
        """Test times beyond the resolvable window are refused."""
        with pytest.raises(AliasingDetected):
            evolve_emitters(trivial_bath, [emitter], np.array([0.0, 1e5]), Sheet.FIRST)

    @pytest.mark.parametrize("initial", [0, 1])
    def test_sheets_agree_two_emitters(self, point_gap_bath, emitter, initial):
        """Test both sheets give the same amplitudes for an A-B pair ten cells apart."""
        partner = EmitterSpec(sublattice=Sublattice.B, cell=10, omega_rabi=0.2, gamma_a=0.05)
        t_grid = np.linspace(0.0, 60.0, 121)
        first = evolve_emitters(point_gap_bath, [emitter, partner], t_grid, Sheet.FIRST, initial=initial)
        second = evolve_emitters(point_gap_bath, [emitter, partner], t_grid, Sheet.SECOND, initial=initial)
        for key in ("a0", "a1"):
            assert np.max(np.abs(np.abs(first[key]) - np.abs(second[key]))) < 1e-6

    def test_sheets_agree_emitter_chain(self, trivial_bath):
        """Test both sheets give the same amplitudes along a chain of ten emitters."""
        chain = emitter_chain(10, 0, 0.2, gamma_a=0.05)
        t_grid = np.linspace(0.0, 30.0, 61)
        first = evolve_emitters(trivial_bath, chain, t_grid, Sheet.FIRST)
        second = evolve_emitters(trivial_bath, chain, t_grid, Sheet.SECOND)
        for m in range(10):
            key = f"a{m}"
            assert np.max(np.abs(np.abs(first[key]) - np.abs(second[key]))) < 1e-6

    def test_long_run_stays_bounded(self, point_gap_bath, emitter):
        """Test a long physical-sheet run keeps |a| <= 1 and matches the mirage sheet."""
        t_grid = np.linspace(0.0, 1200.0, 121)
        first = evolve_emitters(point_gap_bath, [emitter], t_grid, Sheet.FIRST)["a0"]
        second = evolve_emitters(point_gap_bath, [emitter], t_grid, Sheet.SECOND)["a0"]
        assert np.max(np.abs(first)) <= 1 + 1e-6
        assert np.max(np.abs(second)) <= 1 + 1e-6
        assert np.max(np.abs(np.abs(first) - np.abs(second))) < 1e-5


class TestContour:
    """Tests for contour placement."""

    def test_first_sheet_bound(self, trivial_bath, emitter):
        """Test the first sheet is bounded by the real axis."""
        assert singularity_top(trivial_bath, [emitter], Sheet.FIRST) == 0.0

    def test_second_sheet_bound(self, emitter):
        """Test the mirage bound sits at -min(gamma_a, gamma_b)/2."""
        params = BathParams(j1=1.1, j2=1.0, gamma_b=0.1)
        assert singularity_top(params, [emitter], Sheet.SECOND) == pytest.approx(-0.025)

    def test_defaults_fill_fields(self):
        """Test unset fields get the margin, span and sample count defaults."""
        line = resolve_contour(None, -0.025, 2.0, -1j, 10.0)
        assert line.eta == pytest.approx(0.025)
        assert line.span == pytest.approx(16.0)
        assert line.n_omega == 65536
        assert line.step == pytest.approx(32.0 / 65536)

    def test_explicit_eta_below_top(self):
        """Test an explicit line under the bound is refused."""
        with pytest.raises(ContourTooLow):
            resolve_contour(ContourSpec(eta=-0.05), -0.025, 2.0, -1j, 10.0)

    def test_long_window_lowers_eta(self):
        """Test a default line is lowered until exp(eta t) keeps rounding under the tolerance."""
        line = resolve_contour(None, 0.0, 2.07, -1j, 1200.0)
        assert 0.0 < line.eta < 0.05
        assert rounding_error(line, 0.0, 1200.0) <= settings.CONTOUR_CHECK_TOLERANCE

    def test_short_window_keeps_margin(self):
        """Test short windows leave the default margin alone."""
        line = resolve_contour(None, 0.0, 2.07, -1j, 30.0)
        assert line.eta == pytest.approx(0.05)

    def test_explicit_eta_amplifies_rounding(self):
        """Test an explicit line too high for the time window is refused."""
        with pytest.raises(AliasingDetected):
            resolve_contour(ContourSpec(eta=0.05), 0.0, 2.07, -1j, 1200.0)


class TestBathCorrelation:
    """Tests for the bath propagator."""

    @pytest.mark.parametrize("sheet", list(Sheet))
    def test_initial_value(self, trivial_bath, sheet):
        """Test C(0) = -i on one site and 0 between sites."""
        same = bath_correlation(trivial_bath, 0.0, ("A", 0), ("A", 0), sheet)
        other = bath_correlation(trivial_bath, 0.0, ("B", 2), ("A", 0), sheet)
        assert same == pytest.approx(-1j, abs=1e-6)
        assert abs(other) < 1e-6

    def test_sheets_agree(self, trivial_bath):
        """Test the propagator is the same on both sheets."""
        first = bath_correlation(trivial_bath, 5.0, ("A", 0), ("A", 0), Sheet.FIRST)
        second = bath_correlation(trivial_bath, 5.0, ("A", 0), ("A", 0), Sheet.SECOND)
        assert first == pytest.approx(second, abs=1e-6)

    def test_negative_time(self, trivial_bath):
        """Test negative times are refused."""
        with pytest.raises(ConfigError):
            bath_correlation(trivial_bath, -1.0, ("A", 0), ("A", 0), Sheet.FIRST)


class TestRabiEstimate:
    """Tests for the oscillation frequency estimate."""

    def test_synthetic_oscillation(self):
        """Test the estimate on a damped cosine."""
        times = np.linspace(0.0, 100.0, 4001)
        values = np.cos(0.5 * times) * np.exp(-0.05 * times)
        series = TimeSeries(times, {"a1": values})
        assert rabi_frequency_estimate(series, "a1", gamma_b=0.1) == pytest.approx(1.0, rel=1e-3)

    def test_fit_over_few_periods(self):
        """Test the damped-cosine fit recovers the frequency once a transient has died out."""
        times = np.linspace(0.0, 1200.0, 2401)
        population = 0.4 - 0.3 * np.exp(-0.001 * times) * np.cos(0.033 * times) - 0.1 * np.exp(-0.03 * times)
        series = TimeSeries(times, {"a1": np.sqrt(population)})
        fitted = rabi_frequency_fit(series, "a1", start=150.0)
        assert fitted == pytest.approx(0.033, rel=1e-3)

    def test_fit_without_peaks(self):
        """Test the fit refuses a signal with nothing to seed it."""
        times = np.linspace(0.0, 20.0, 201)
        series = TimeSeries(times, {"a1": np.exp(-times)})
        with pytest.raises(NoOscillationDetected):
            rabi_frequency_fit(series, "a1")

    def test_no_oscillation(self):
        """Test a monotonic decay has no frequency."""
        times = np.linspace(0.0, 20.0, 201)
        series = TimeSeries(times, {"a1": np.exp(-times)})
        with pytest.raises(NoOscillationDetected):
            rabi_frequency_estimate(series, "a1")

    def test_renormalized_population(self):
        """Test the uniform loss is divided out."""
        times = np.linspace(0.0, 10.0, 11)
        series = TimeSeries(times, {"a0": np.exp(-0.05 * times)})
        assert np.allclose(renormalized_population(series, "a0", 0.1), 1.0)

    def test_time_grid_must_increase(self):
        """Test series refuse unordered times."""
        with pytest.raises(ValueError):
            TimeSeries(np.array([0.0, 2.0, 1.0]))


class TestGreenMatrix:
    """Tests for the emitter Green matrix."""

    @pytest.mark.parametrize("sheet", list(Sheet))
    def test_single_emitter(self, trivial_bath, emitter, sheet):
        """Test one emitter reduces to 1 / (omega - delta' - Sigma_0)."""
        omega = 0.3 + 0.2j
        green = green_matrix(trivial_bath, [emitter], omega, sheet)
        sigma = sigma_onsite(trivial_bath, emitter.omega_rabi, omega, sheet).value
        assert green.matrix.shape == (1, 1)
        assert green.matrix[0, 0] == pytest.approx(1 / (omega - emitter.delta_prime - sigma))

    def test_symmetric_pair(self, trivial_bath, emitter):
        """Test two emitters on the same sublattice see the same diagonal."""
        far = emitter.model_copy(update={"cell": 3})
        green = green_matrix(trivial_bath, [emitter, far], 0.3 + 0.2j, Sheet.FIRST)
        assert green.matrix[0, 0] == pytest.approx(green.matrix[1, 1])
