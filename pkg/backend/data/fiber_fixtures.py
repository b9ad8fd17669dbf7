"""
Built-in fiber diagrams: the genus-1 trisection of CP^2 and the genus-2
trisection of S^2 x S^2. The CP^2 diagram also ships as ``fixtures/cp2.msd``
for the command line.
"""
from backend.core.combinatorial_map import map_from_cycles
from backend.core.curves import Curve
from backend.core.diagram_models import MultisectionDiagram, tag_families
from backend.core.diagram_ops import refine
from backend.core.map_editor import MapEditor, realize_boundary

# 3x3 triangulated torus: vertex v = i + 3j owns darts 6v + dir, dir E, NE, N, W, SW, S
CP2_PAIRS = [
    (0, 9), (1, 28), (2, 23), (6, 15), (7, 34), (8, 29), (12, 3), (13, 22), (14, 35),
    (18, 27), (19, 46), (20, 41), (24, 33), (25, 52), (26, 47), (30, 21), (31, 40), (32, 53),
    (36, 45), (37, 10), (38, 5), (42, 51), (43, 16), (44, 11), (48, 39), (49, 4), (50, 17),
]
CP2_FAMILIES = [[0, 6, 12], [19, 43, 13], [2, 20, 38]]

S2XS2_ROTATION = [
    (0, 18, 3, 12), (14, 2, 20, 1), (21, 7, 15, 4),
    (6, 22, 5, 16), (8, 13, 11, 19), (10, 17, 9, 23),
]


def cp2_trisection() -> MultisectionDiagram:
    """Slopes (1,0), (1,1) and (0,1) on the torus, pairwise meeting once."""
    cmap = map_from_cycles(CP2_PAIRS, [tuple(range(6 * v, 6 * v + 6)) for v in range(9)])
    families = [[Curve(darts=tuple(darts))] for darts in CP2_FAMILIES]
    return MultisectionDiagram(map=cmap, families=tag_families(families), name="cp2",
                               provenance="cp2_trisection()")


def s2xs2_trisection() -> MultisectionDiagram:
    """
    Genus-2 trisection of S^2 x S^2: each family pairs a curve through one
    handle with the neighbourhood boundary of a loop pair on another.
    """
    cmap = map_from_cycles([(2 * i, 2 * i + 1) for i in range(12)], S2XS2_ROTATION)
    editor = MapEditor(cmap)
    editor.track("m1", [12, 19])
    editor.track("m2", [16, 23])
    editor.track("bridge", [14, 21])
    realize_boundary(editor, range(0, 4), 0, key="l1")
    realize_boundary(editor, range(4, 8), 4, key="l2")
    realize_boundary(editor, range(8, 12), 11, key="loop")
    frozen, remap = editor.freeze()
    layout = [["m1", "l2"], ["m2", "l1"], ["loop", "bridge"]]
    families = [[Curve(darts=tuple(editor.frozen_path(key, remap)), label=key) for key in fam] for fam in layout]
    d = MultisectionDiagram(map=frozen, families=tag_families(families), name="s2xs2",
                            provenance="s2xs2_trisection()")
    return refine(d)
