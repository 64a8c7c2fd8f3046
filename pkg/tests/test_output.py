"""
Tests for the result file writers
"""

import json
import os
import sys

import numpy as np

# Add src directory to path
sys.path.insert(
    0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
)

from api.models import Region
from misc.output import flatten_rows, plot_rows, write_csv, write_json


class TestFlatten:
    """Tests for row flattening."""

    def test_complex_split(self):
        """Test complex values become _re and _im columns."""
        rows = flatten_rows([{"omega": 0.5 - 0.25j, "region": Region.REGION_I, "n": np.int64(3)}])
        assert rows == [{"omega_re": 0.5, "omega_im": -0.25, "region": "RegionI", "n": 3}]


class TestWriteCsv:
    """Tests for CSV output."""

    def test_header_and_precision(self, tmp_path):
        """Test one header row, first-seen column order and 17 significant digits."""
        path = write_csv([{"t": 0.1, "a0": 1 / 3 + 0j}, {"t": 0.2, "a0": 0.5j, "extra": 1}], tmp_path / "out" / "r.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "t,a0_re,a0_im,extra"
        assert lines[1].split(",")[1] == "0.33333333333333331"
        assert len(lines) == 3

    def test_deterministic(self, tmp_path):
        """Test identical rows give byte-identical files."""
        rows = [{"x": float(x), "y": complex(x, -x)} for x in np.linspace(0, 1, 5)]
        first = write_csv(rows, tmp_path / "a.csv").read_bytes()
        second = write_csv(rows, tmp_path / "b.csv").read_bytes()
        assert first == second

    def test_explicit_columns(self, tmp_path):
        """Test an explicit column order is kept."""
        path = write_csv([{"a": 1, "b": 2}], tmp_path / "c.csv", columns=["b", "a"])
        assert path.read_text().splitlines()[0] == "b,a"


class TestOtherWriters:
    """Tests for JSON and SVG output."""

    def test_json(self, tmp_path):
        """Test reports are written with sorted keys."""
        path = write_json({"b": 1, "a": [1, 2]}, tmp_path / "report.json")
        assert json.loads(path.read_text()) == {"a": [1, 2], "b": 1}
        assert path.read_text().index('"a"') < path.read_text().index('"b"')

    def test_svg(self, tmp_path):
        """Test grouped rows plot to an SVG file."""
        rows = [{"t": t, "n0": np.exp(-t * d), "d": d} for d in (1, 2) for t in np.linspace(0, 1, 5)]
        path = plot_rows(rows, "t", ["n0"], tmp_path / "plot.svg", group="d", log_y=True, title="decay")
        assert path.read_text().lstrip().startswith("<?xml")
