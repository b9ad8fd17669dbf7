from collections import Counter
from typing import Dict, List

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import FancyBboxPatch

from backend.core.diagram_models import MultisectionDiagram
from visualization.chart_config import CHART_STYLE, COLOR_GRID, COLOR_TUBE, SVG_METADATA, family_color


def _panel_loads(d: MultisectionDiagram) -> Dict[int, Counter]:
    """panel -> family -> number of curve darts lying on that panel (tubes are panel -1)."""
    panels = d.panels if d.panels is not None else tuple(1 for _ in d.map.darts)
    loads: Dict[int, Counter] = {p: Counter() for p in sorted(set(panels))}
    for j, family in enumerate(d.families, start=1):
        for c in family:
            for x in c.darts:
                loads[panels[x]][j] += 1
    return loads


def generate_panel_strip(d: MultisectionDiagram, output_path: str) -> None:
    """
    Panels drawn left to right with a bar per family giving how much of that
    family runs over the panel; tubes sit between neighbouring panels. Each
    panel is an SVG group ``panel-<p>``.
    """
    plt.rcParams.update(CHART_STYLE)
    loads = _panel_loads(d)
    tube_load = loads.pop(-1, Counter())
    panels: List[int] = sorted(loads)
    top = max([1] + [v for counter in loads.values() for v in counter.values()])

    fig, ax = plt.subplots(figsize=(1.5 + 2.2 * len(panels), 3.2))
    for i, p in enumerate(panels):
        x = 2.2 * i
        box = FancyBboxPatch((x, 0), 1.6, 2.0, boxstyle="round,pad=0.05",
                             facecolor="none", edgecolor=COLOR_GRID, linewidth=1.5)
        box.set_gid(f"panel-{p}")
        ax.add_patch(box)
        for j in range(1, d.n + 1):
            height = 1.6 * loads[p][j] / top
            bars = ax.bar(x + 0.15 + (j - 1) * 1.3 / max(1, d.n), height, width=1.1 / max(1, d.n),
                         bottom=0.2, color=family_color(j), align="edge")
            for patch in bars:
                patch.set_gid(f"panel-{p}-family-{j}")
        ax.text(x + 0.8, 2.2, f"S{p}", ha="center", fontsize=10)
        if i + 1 < len(panels) or (len(panels) > 1 and tube_load):
            ax.plot([x + 1.65, x + 2.15], [1.0, 1.0], color=COLOR_TUBE, linewidth=6, solid_capstyle="round")

    ax.set_xlim(-0.3, 2.2 * len(panels))
    ax.set_ylim(-0.3, 2.6)
    ax.axis("off")
    ax.set_title(f"{d.name or 'diagram'}: genus {d.genus}, {d.n} families", fontsize=12)
    plt.tight_layout()
    plt.savefig(output_path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
