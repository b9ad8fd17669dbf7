"""
Global configuration for the SVG renderers so scheme grids and panel strips share one look.
"""
from backend.app_config import settings
from backend.data.config import GENERATOR_CONFIG

# Colors
COLOR_BACKGROUND = "#1e1e2e"  # Dark background
COLOR_TEXT = "#cdd6f4"        # Light text
COLOR_GRID = "#45475a"        # Subtle grid
COLOR_TUBE = "#585b70"
COLOR_WRAP = "#f5c2e7"        # wrap column outline

FAMILY_COLORS = GENERATOR_CONFIG["family_colors"]

CHART_STYLE = {
    "text.color": COLOR_TEXT,
    "axes.labelcolor": COLOR_TEXT,
    "axes.edgecolor": COLOR_GRID,
    "axes.facecolor": COLOR_BACKGROUND,
    "figure.facecolor": COLOR_BACKGROUND,
    "font.family": "sans-serif",
    "font.sans-serif": ["DejaVu Sans"],
    # byte-identical output for identical input
    "svg.hashsalt": settings.SVG_HASHSALT,
    "svg.fonttype": "none",
}

# savefig metadata; a fixed Date keeps the SVG deterministic
SVG_METADATA = {"Date": None, "Creator": None}


def family_color(j: int) -> str:
    """Colour of family j (1-based), cycling through the palette."""
    return FAMILY_COLORS[(j - 1) % len(FAMILY_COLORS)]
