import os

from backend.core.diagram_models import MultisectionDiagram, Scheme
from visualization.panel_strip_chart import generate_panel_strip
from visualization.scheme_grid_chart import generate_scheme_grid


class ChartExporter:
    """Writes SVG renderings of schemes and diagrams into one output directory."""

    def __init__(self, output_dir: str = "generated_diagrams"):
        self.output_dir = output_dir
        os.makedirs(self.output_dir, exist_ok=True)

    def _path(self, name: str, kind: str) -> str:
        safe = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in name) or kind
        return os.path.join(self.output_dir, f"{safe}.svg")

    def export_scheme(self, s: Scheme, name: str = "") -> str:
        path = self._path(name or s.name, "scheme")
        generate_scheme_grid(s, path)
        return path

    def export_diagram(self, d: MultisectionDiagram, name: str = "") -> str:
        path = self._path(name or d.name, "diagram")
        generate_panel_strip(d, path)
        return path
