"""
Arc systems on punctured panels.
"""
import pytest

from backend.core.combinatorial_map import face_walk, surface_of_genus
from backend.core.map_editor import MapEditor
from backend.data.arcs import arc_cut_regions, arc_system_punctured


def _panel(g: int, b: int):
    """Genus-g surface with b monogon punctures; returns the map and the puncture darts."""
    editor = MapEditor(surface_of_genus(g))
    slots = [editor.add_slot(0) for _ in range(b)]
    cmap, remap = editor.freeze()
    return cmap, [remap[s] for s in slots]


class TestArcSystem:

    @pytest.mark.parametrize("g,b,expected", [(0, 1, 0), (0, 3, 2), (1, 1, 2), (1, 2, 3), (2, 3, 6)])
    def test_arc_count(self, g, b, expected):
        """2g + b - 1 arcs"""
        cmap, slots = _panel(g, b)
        _, system = arc_system_punctured(cmap, slots[0], slots[1:])
        assert len(system.arcs) == expected

    @pytest.mark.parametrize("g,b", [(0, 1), (1, 1), (1, 3), (2, 2)])
    def test_cuts_to_a_disk(self, g, b):
        """Removing the punctures and cutting along the arcs leaves one disk"""
        cmap, slots = _panel(g, b)
        refined, system = arc_system_punctured(cmap, slots[0], slots[1:])
        punctures = [system.puncture] + sorted(set(system.targets.values()))
        assert arc_cut_regions(refined, system.arcs, punctures) == [1]

    def test_targets_reach_every_other_puncture(self):
        """One arc per extra puncture, each ending on a distinct one"""
        cmap, slots = _panel(1, 3)
        refined, system = arc_system_punctured(cmap, slots[0], slots[1:])
        assert len(system.targets) == 2
        assert len(set(system.targets.values())) == 2
        for index, dart in system.targets.items():
            rim = {refined.tail(x) for x in face_walk(refined, dart)}
            assert refined.head(system.arcs[index][-1]) in rim
        assert refined.genus == 1

    def test_arcs_are_disjoint(self):
        """No two arcs share an edge"""
        cmap, slots = _panel(2, 1)
        refined, system = arc_system_punctured(cmap, slots[0])
        seen = set()
        for arc in system.arcs:
            keys = {refined.edge_key(x) for x in arc}
            assert not keys & seen
            seen |= keys
