"""
Tests for the self-energy module
"""

import os
import sys

import numpy as np
import pytest

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from api.models import Band, BathParams, BathVariant, Region, Sheet, Sublattice, SublatticePair
from core.bath_model import dispersion
from core.self_energy import (
    discriminant,
    interaction_single_pole,
    pair_sites,
    poles_z,
    sigma_cross,
    sigma_onsite,
    sigma_quadrature_oracle,
    xi_exponent,
)
from misc.errors import MirageUndefined, NearSpectrum, NotMidgap, OnBranchLoop

OMEGA = 0.3 + 0.2j


class TestResidueAgainstQuadrature:
    """Tests comparing the residue evaluation with the Brillouin-zone integral."""

    @pytest.mark.parametrize("pair", list(SublatticePair))
    @pytest.mark.parametrize("d", [0, 1, -2])
    @pytest.mark.parametrize("j1", [0.7, 1.02, 1.1])
    def test_first_sheet(self, pair, d, j1):
        """Test first-sheet Sigma_d equals the physical quadrature."""
        params = BathParams(j1=j1, j2=1.0, gamma_b=0.05)
        residue = sigma_cross(params, 0.2, OMEGA, d, pair, Sheet.FIRST).value
        oracle = sigma_quadrature_oracle(params, 0.2, OMEGA, d, pair, BathVariant.PHYSICAL)
        assert residue == pytest.approx(oracle, rel=1e-8, abs=1e-14)

    @pytest.mark.parametrize("pair", list(SublatticePair))
    @pytest.mark.parametrize("d", [0, 3, -1])
    def test_second_sheet(self, pair, d):
        """Test second-sheet Sigma_d equals the gauge-dressed mirage quadrature."""
        params = BathParams(j1=1.1, j2=1.0, gamma_b=0.1)
        residue = sigma_cross(params, 0.2, OMEGA, d, pair, Sheet.SECOND).value
        oracle = sigma_quadrature_oracle(params, 0.2, OMEGA, d, pair, BathVariant.MIRAGE)
        assert residue == pytest.approx(oracle, rel=1e-8, abs=1e-14)

    def test_onsite_matches_cross_at_zero(self, trivial_bath):
        """Test Sigma_0 is the AA element at d = 0."""
        onsite = sigma_onsite(trivial_bath, 0.2, OMEGA, Sheet.FIRST)
        cross = sigma_cross(trivial_bath, 0.2, OMEGA, 0, SublatticePair.AA, Sheet.FIRST)
        assert onsite.value == pytest.approx(cross.value)
        assert onsite.region == Region.REGION_I
        assert onsite.sheet == Sheet.FIRST

    def test_quadrature_rejects_coarse_grid(self, trivial_bath):
        """Test the oracle needs at least 16 momenta."""
        with pytest.raises(ValueError):
            sigma_quadrature_oracle(trivial_bath, 0.2, OMEGA, 0, SublatticePair.AA, BathVariant.PHYSICAL, n_k=8)

    def test_quadrature_near_spectrum(self, trivial_bath):
        """Test a frequency on a band sample is refused."""
        omega = dispersion(trivial_bath, 0.0, Band.PLUS).value
        with pytest.raises(NearSpectrum):
            sigma_quadrature_oracle(trivial_bath, 0.2, omega, 0, SublatticePair.AA, BathVariant.PHYSICAL, n_k=64)


class TestBranchStructure:
    """Tests for regions and branch loops."""

    def test_region_two_vanishes(self, point_gap_bath):
        """Test Sigma_0 is exactly zero inside the point gap on the first sheet."""
        result = sigma_onsite(point_gap_bath, 0.2, -0.025j, Sheet.FIRST)
        assert result.value == 0
        assert result.region == Region.REGION_II

    def test_second_sheet_does_not_vanish(self, point_gap_bath):
        """Test the continuation through the loop is non-zero at the same point."""
        result = sigma_onsite(point_gap_bath, 0.2, -0.025j + 0.01, Sheet.SECOND)
        assert abs(result.value) > 0

    def test_on_branch_loop(self, point_gap_bath):
        """Test a band energy is rejected on the first sheet."""
        omega = dispersion(point_gap_bath, 0.7, Band.PLUS).value
        with pytest.raises(OnBranchLoop) as info:
            sigma_onsite(point_gap_bath, 0.2, omega, Sheet.FIRST)
        assert info.value.exit_code == 2

    def test_second_sheet_needs_mirage(self):
        """Test the second sheet is undefined for j1 <= gamma_b / 2."""
        with pytest.raises(MirageUndefined):
            sigma_onsite(BathParams(j1=0.02, j2=1.0, gamma_b=0.05), 0.2, OMEGA, Sheet.SECOND)

    def test_pair_sites(self):
        """Test the orientation of the sublattice pairs."""
        assert pair_sites(SublatticePair.AB, 3) == (("A", 0), ("B", 3))
        assert pair_sites(SublatticePair.BA, 3) == (("B", 3), ("A", 0))
        assert pair_sites(SublatticePair.BB, -1) == (("B", -1), ("B", 0))


class TestSinglePole:
    """Tests for the midgap bound-state coupling."""

    @pytest.mark.parametrize("pair", [SublatticePair.AB, SublatticePair.BA])
    @pytest.mark.parametrize("d", [-3, -1, 0, 1, 2, 5])
    @pytest.mark.parametrize("j1", [0.7, 1.1])
    def test_closed_bath_matches_residue(self, pair, d, j1):
        """Test the closed form equals Sigma_d at omega = 0 of the closed bath."""
        params = BathParams(j1=j1, j2=1.0)
        closed_form = interaction_single_pole(params, 0.1, 0.0, d, pair, Sheet.FIRST)
        residue = sigma_cross(params, 0.1, 0.0, d, pair, Sheet.FIRST).value
        assert closed_form == pytest.approx(residue, abs=1e-12)

    @pytest.mark.parametrize("sheet", list(Sheet))
    @pytest.mark.parametrize("pair", [SublatticePair.AB, SublatticePair.BA])
    @pytest.mark.parametrize("d", [-2, 0, 3])
    def test_dissipative_bath_matches_residue(self, trivial_bath, sheet, pair, d):
        """Test the closed form equals Sigma_d at -i gamma_b/2 on both sheets."""
        closed_form = interaction_single_pole(trivial_bath, 0.2, -0.025j, d, pair, sheet)
        residue = sigma_cross(trivial_bath, 0.2, -0.025j, d, pair, sheet).value
        assert closed_form == pytest.approx(residue, abs=1e-12)

    def test_same_sublattice_vanishes(self, trivial_bath):
        """Test AA and BB couplings are zero at midgap."""
        for pair in (SublatticePair.AA, SublatticePair.BB):
            assert interaction_single_pole(trivial_bath, 0.2, -0.025j, 2, pair, Sheet.SECOND) == 0

    def test_regime_side(self):
        """Test a trivial closed bath couples only to the right."""
        params = BathParams(j1=1.5, j2=1.0)
        assert interaction_single_pole(params, 1.0, 0.0, -1, SublatticePair.AB, Sheet.FIRST) == 0
        assert interaction_single_pole(params, 1.0, 0.0, 1, SublatticePair.AB, Sheet.FIRST) == pytest.approx(
            -(1 / 1.5) * (-1 / 1.5)
        )

    def test_not_midgap(self, trivial_bath):
        """Test detuned emitters are refused."""
        with pytest.raises(NotMidgap) as info:
            interaction_single_pole(trivial_bath, 0.2, 0.1 - 0.025j, 1, SublatticePair.AB, Sheet.FIRST)
        assert info.value.exit_code == 1


class TestPoles:
    """Tests for the pole quadratic."""

    def test_pole_product_and_sum(self, point_gap_bath):
        """Test Vieta relations of the physical pole pair."""
        a_plus, a_minus = 1.02 + 0.025, 1.02 - 0.025
        s = OMEGA + 0.025j
        poles = poles_z(point_gap_bath, OMEGA, BathVariant.PHYSICAL)
        assert poles.z_plus * poles.z_minus == pytest.approx(a_minus / a_plus)
        assert poles.z_plus + poles.z_minus == pytest.approx((s**2 - a_plus * a_minus - 1.0) / a_plus)

    def test_mirage_poles_are_reciprocal(self, point_gap_bath):
        poles = poles_z(point_gap_bath, OMEGA, BathVariant.MIRAGE)
        assert poles.z_plus * poles.z_minus == pytest.approx(1.0)

    @pytest.mark.parametrize("variant", [BathVariant.PHYSICAL, BathVariant.MIRAGE])
    def test_discriminant(self, point_gap_bath, variant):
        """Test Lambda squares to the quartic in s."""
        s = OMEGA + 0.025j
        product = 1.02**2 - 0.025**2
        expected = (s**2 - product - 1.0) ** 2 - 4 * product
        assert discriminant(point_gap_bath, OMEGA, variant) ** 2 == pytest.approx(expected)


class TestGauge:
    """Tests for the xi gauge exponents."""

    @pytest.mark.parametrize(
        "site,expected", [((Sublattice.A, 0), 0), ((Sublattice.A, 3), -3), ((Sublattice.B, 3), -4), (("B", -2), 1)]
    )
    def test_xi_exponent(self, site, expected):
        """Test xi is r^-j on A sites and r^(-j-1) on B sites."""
        assert xi_exponent(site) == expected
