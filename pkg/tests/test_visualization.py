import os

import pytest

from backend.core.diagram_ops import gen1_sphere_diagram
from backend.data.bundle_gen import sphere_base_bundle_diagram
from backend.data.schemes import scheme_stack, scheme_zigzag
from visualization.chart_exporter import ChartExporter
from visualization.panel_strip_chart import generate_panel_strip
from visualization.scheme_grid_chart import generate_scheme_grid


def _read(path):
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def test_scheme_grid_cells(tmp_path):
    """One SVG group per (row, drawn column)"""
    s = scheme_stack([[1, 2, 3]])
    out = tmp_path / "stack.svg"
    generate_scheme_grid(s, str(out))
    svg = _read(out)
    for k in range(1, 4):
        for c in range(s.N + 1):
            assert f'id="cell-{k}-{c}"' in svg
    assert 'id="cell-4-0"' not in svg


def test_scheme_grid_is_deterministic(tmp_path):
    """Same scheme twice -> byte-identical SVG"""
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    generate_scheme_grid(scheme_zigzag(4), str(a))
    generate_scheme_grid(scheme_zigzag(4), str(b))
    assert _read(a) == _read(b)


def test_panel_strip_groups(tmp_path):
    """Sphere bundle over a 4-vertex base -> a group per panel"""
    d = sphere_base_bundle_diagram(4, 0)
    out = tmp_path / "s4.svg"
    generate_panel_strip(d, str(out))
    svg = _read(out)
    for p in sorted(set(d.panels) - {-1}):
        assert f'id="panel-{p}"' in svg


def test_panel_strip_without_panels(tmp_path):
    """Diagram with no panel map -> drawn as a single panel"""
    out = tmp_path / "gen1.svg"
    generate_panel_strip(gen1_sphere_diagram(3, 1), str(out))
    assert 'id="panel-1"' in _read(out)


class TestChartExporter:

    def test_paths_are_sanitized(self, tmp_path):
        exporter = ChartExporter(str(tmp_path / "out"))
        path = exporter.export_scheme(scheme_stack([[1, 2, 3]]))
        assert os.path.basename(path) == "stack_123_.svg"
        assert os.path.getsize(path) > 0

    def test_unnamed_falls_back_to_kind(self, tmp_path):
        exporter = ChartExporter(str(tmp_path))
        d = gen1_sphere_diagram(3, 1).model_copy(update={"name": ""})
        assert os.path.basename(exporter.export_diagram(d)) == "diagram.svg"

    @pytest.mark.parametrize("name", ["custom", "with space"])
    def test_explicit_name(self, tmp_path, name):
        path = ChartExporter(str(tmp_path)).export_scheme(scheme_zigzag(3), name=name)
        assert os.path.basename(path) == name.replace(" ", "_") + ".svg"
