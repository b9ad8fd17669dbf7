import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from backend.core.diagram_models import Scheme
from visualization.chart_config import CHART_STYLE, COLOR_GRID, COLOR_TEXT, COLOR_WRAP, SVG_METADATA, family_color


def generate_scheme_grid(s: Scheme, output_path: str) -> None:
    """
    Scheme table as a grid: one cell per (row, drawn column) coloured by its
    piece, the missing piece of every column written on top and the two wrap
    halves outlined. Each cell is an SVG group ``cell-<row>-<drawn column>``.
    """
    plt.rcParams.update(CHART_STYLE)
    width = s.N + 1
    fig, ax = plt.subplots(figsize=(1.0 + 0.8 * width, 1.0 + 0.6 * s.rows))

    for k, row in enumerate(s.cells, start=1):
        y = s.rows - k
        for c, label in enumerate(row):
            wrap = c in (0, s.N)
            cell = Rectangle((c, y), 1, 1, facecolor=family_color(label), alpha=0.55,
                             edgecolor=COLOR_WRAP if wrap else COLOR_GRID, linewidth=2 if wrap else 1)
            cell.set_gid(f"cell-{k}-{c}")
            ax.add_patch(cell)
            ax.text(c + 0.5, y + 0.5, f"W{label}", ha="center", va="center", fontsize=9, color=COLOR_TEXT)
        ax.text(-0.2, y + 0.5, f"X{k}", ha="right", va="center", fontsize=10)

    for c in range(width):
        missing = s.drawn_missing(c)
        ax.text(c + 0.5, s.rows + 0.3, "-" if missing is None else f"W{missing}",
                ha="center", va="bottom", fontsize=9, fontweight="bold")

    ax.set_xlim(-1, width + 0.2)
    ax.set_ylim(-0.2, s.rows + 1)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(s.name or "scheme", fontsize=12)
    plt.tight_layout()
    plt.savefig(output_path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
