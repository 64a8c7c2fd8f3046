"""
Tests for the shipped presets
"""

import os
import sys

import pytest

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from api.models import Boundary, Command, Sheet, Sublattice
from config.config import list_presets, load_preset
from core.bath_model import classify_phase

COMMANDS = {
    "fig2b": Command.DYNAMICS,
    "fig2c": Command.DYNAMICS,
    "fig3a": Command.DYNAMICS,
    "fig3b": Command.PHASE,
    "fig3c": Command.DYNAMICS,
    "fig4a": Command.SPECTRUM,
    "fig4b": Command.SPECTRUM,
    "fig4c_blue": Command.G2,
    "fig4c_red": Command.G2,
    "fig4d": Command.G2,
    "fig4d_inset": Command.G2,
    "fig6": Command.BS,
    "fig7a": Command.INTERACTION,
    "fig7b": Command.DYNAMICS,
    "fig9": Command.BS,
    "fig10a": Command.INTERACTION,
    "fig10b": Command.DYNAMICS,
    "fig11": Command.BS,
    "fig12": Command.INTERACTION,
    "fig13": Command.DYNAMICS,
    "fig14": Command.BS,
    "fig15": Command.BS,
}


class TestPresets:
    """Tests for the preset files."""

    def test_all_presets_listed(self):
        assert list_presets() == sorted(COMMANDS)

    @pytest.mark.parametrize("name", sorted(COMMANDS))
    def test_preset_loads(self, name):
        run = load_preset(name)
        assert run.command == COMMANDS[name]
        assert run.description

    def test_single_emitter_regimes(self):
        """The three single-emitter curves cover every physical phase."""
        run = load_preset("fig2b")
        labels = {
            classify_phase(run.bath.model_copy(update={"j1": j1})).value for j1 in run.sweep["j1"]
        }
        assert labels == {"TopologicalLineGap", "PointGap", "TrivialLineGap"}
        assert run.sheet == Sheet.FIRST

    def test_mirage_counterpart(self):
        physical, mirage = load_preset("fig2b"), load_preset("fig3a")
        assert mirage.sheet == Sheet.SECOND
        assert mirage.bath == physical.bath
        assert mirage.sweep == physical.sweep

    def test_two_emitter_separation(self):
        run = load_preset("fig2c")
        first, second = run.emitters
        assert (first.sublattice, second.sublattice) == (Sublattice.A, Sublattice.B)
        assert second.cell - first.cell == 10
        assert run.initial == 1

    def test_emitter_chain(self):
        run = load_preset("fig13")
        assert len(run.emitters) == 10
        assert [e.cell for e in run.emitters] == list(range(10))
        assert [e.sublattice for e in run.emitters[:2]] == [Sublattice.A, Sublattice.B]
        assert run.lattice_cells == 2000

    def test_open_chain(self):
        run = load_preset("fig14")
        assert run.boundary == Boundary.OBC
        assert run.lattice_cells == 20
        assert [e.cell for e in run.emitters] == [5, 14]

    def test_kerr_presets(self):
        blue = load_preset("fig4c_blue")
        red = load_preset("fig4c_red")
        assert blue.emission and red.emission
        assert (blue.nonlinear.u, red.nonlinear.u) == (0.1, 0.4)
        assert load_preset("fig4d").nonlinear.base == blue.nonlinear.base

    def test_midgap_emitters(self):
        """Interaction presets use emitters whose loss matches the bath."""
        for name in ("fig7a", "fig10a", "fig12"):
            run = load_preset(name)
            emitter = run.emitters[0]
            assert emitter.delta == 0
            assert emitter.gamma_a == run.bath.gamma_b
