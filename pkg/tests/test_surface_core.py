"""
Surface core: maps, curves, cutting, homology and isomorphism.
"""
import pytest

from backend.core.combinatorial_map import (
    CombinatorialMap,
    build_map,
    grid_torus,
    map_from_cycles,
    mirror_map,
    surface_of_genus,
)
from backend.core.curves import (
    Curve,
    are_disjoint,
    curve_free_faces,
    face_boundary_curve,
    intersection_count,
    is_simple,
    simplicity_problem,
)
from backend.core.cutting import are_parallel, cut_along, is_cut_system
from backend.core.diagram_models import MultisectionDiagram
from backend.core.diagram_ops import connected_sum, gen1_sphere_diagram, intersection_matrix, refine
from backend.core.errors import (
    AlphaFixedPoint,
    AlphaNotInvolution,
    Disconnected,
    InvalidCurve,
    NotTransverse,
    TrackedHitsCutLocus,
)
from backend.core.homology import family_rank, gf2_rank, h1_class_vector, same_span
from backend.core.isomorphism import diagrams_isomorphic, find_isomorphism, maps_isomorphic
from backend.core.map_editor import MapEditor, realize_boundary, route_chord


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _meridian(p: int, q: int, i: int = 0) -> Curve:
    """Column i of a p×q grid torus, walking north."""
    return Curve(darts=tuple(4 * (i + p * j) + 1 for j in range(q)))


def _longitude(p: int, q: int, j: int = 0) -> Curve:
    return Curve(darts=tuple(4 * (i + p * j) for i in range(p)))


def _renumber(d: MultisectionDiagram, shift: int = 7) -> MultisectionDiagram:
    """Same diagram with darts relabelled by a cyclic shift."""
    size = d.map.dart_count
    perm = {x: (x + shift) % size for x in range(size)}
    alpha = [0] * size
    rot = [0] * size
    for x in range(size):
        alpha[perm[x]] = perm[d.map.alpha[x]]
        rot[perm[x]] = perm[d.map.rot[x]]
    families = tuple(tuple(c.relabel(perm) for c in fam) for fam in d.families)
    return MultisectionDiagram(map=CombinatorialMap(alpha=tuple(alpha), rot=tuple(rot)), families=families)


def _genus_two() -> MultisectionDiagram:
    d1 = refine(gen1_sphere_diagram(3, 1))
    d2 = refine(gen1_sphere_diagram(3, 2))
    f1 = curve_free_faces(d1.map, d1.all_curves())[0]
    f2 = curve_free_faces(d2.map, d2.all_curves())[0]
    return connected_sum(d1, d2, f1, f2)


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------

class TestCombinatorialMap:

    def test_one_vertex_torus(self):
        """Square with opposite sides glued -> genus 1, chi 0"""
        torus = surface_of_genus(1)
        assert torus.vertex_count == 1
        assert torus.face_count == 1
        assert torus.euler == 0
        assert torus.genus == 1

    def test_theta_graph(self):
        """Theta graph on the sphere -> 2 vertices, 3 edges, 3 faces, genus 0"""
        theta = map_from_cycles([(0, 1), (2, 3), (4, 5)], [(0, 2, 4), (1, 5, 3)])
        assert (theta.vertex_count, theta.edge_count, theta.face_count) == (2, 3, 3)
        assert theta.euler == 2
        assert theta.genus == 0

    def test_alpha_fixed_point(self):
        """alpha fixing a dart -> AlphaFixedPoint"""
        with pytest.raises(AlphaFixedPoint):
            build_map([0, 1], [0, 1])

    def test_alpha_not_involution(self):
        """alpha of order 3 -> AlphaNotInvolution"""
        with pytest.raises(AlphaNotInvolution):
            build_map([1, 2, 0], [0, 1, 2])

    def test_disconnected_rejected(self):
        """Two separate loops -> Disconnected"""
        with pytest.raises(Disconnected):
            build_map([1, 0, 3, 2], [1, 0, 3, 2])

    @pytest.mark.parametrize("g", [0, 1, 2, 3])
    def test_surface_of_genus(self, g):
        """One-vertex 4g-gon -> requested genus, Euler formula holds"""
        cmap = surface_of_genus(g)
        assert cmap.genus == g
        assert cmap.vertex_count - cmap.edge_count + cmap.face_count == 2 - 2 * g

    def test_grid_torus_cells(self):
        """3×2 grid torus -> 6 vertices, 12 edges, 6 faces"""
        cmap = grid_torus(3, 2)
        assert cmap.summary()["vertices"] == 6
        assert cmap.summary()["edges"] == 12
        assert cmap.summary()["faces"] == 6
        assert cmap.genus == 1

    def test_mirror_keeps_genus(self):
        """Mirror -> same cell counts"""
        cmap = grid_torus(2, 3)
        assert mirror_map(cmap).summary() == cmap.summary()


# ---------------------------------------------------------------------------
# Editing
# ---------------------------------------------------------------------------

class TestMapEditor:

    def test_subdivide_rewrites_tracked_paths(self):
        """Subdivide a curve edge -> the tracked curve grows by one dart and stays closed"""
        cmap = grid_torus(2, 2)
        m = _meridian(2, 2)
        editor = MapEditor(cmap)
        editor.track("m", m.darts)
        editor.subdivide(m.darts[0])
        frozen, remap = editor.freeze()
        curve = Curve(darts=tuple(editor.frozen_path("m", remap)))
        assert len(curve) == len(m) + 1
        assert is_simple(frozen, curve)
        assert frozen.genus == 1

    def test_add_slot_makes_monogon(self):
        """add_slot -> returned dart bounds a one-dart face"""
        editor = MapEditor(grid_torus(1, 1))
        slot = editor.add_slot(0)
        assert editor.face_walk(slot) == [slot]
        frozen, _ = editor.freeze()
        assert frozen.genus == 1

    def test_truncate_vertex_then_chord(self):
        """Truncate a degree-4 vertex -> square face; a chord across it splits the square, genus kept"""
        cmap = grid_torus(2, 2)
        editor = MapEditor(cmap)
        old = editor.vertex_darts(0)
        polygon = editor.truncate_vertex(0)
        assert len(editor.face_walk(polygon)) == len(old)
        chord = route_chord(editor, editor.rot_inv[old[0]], editor.rot_inv[old[2]], set())
        assert len(chord) == 1
        frozen, _ = editor.freeze()
        assert frozen.vertex_count == cmap.vertex_count + len(old) - 1
        assert frozen.face_count == cmap.face_count + 2
        assert frozen.genus == 1

    def test_chord_without_a_route(self):
        """Target corner outside the polygon and nothing crossable -> InvalidCurve"""
        editor = MapEditor(grid_torus(2, 2))
        polygon = editor.truncate_vertex(0)
        outside = next(d for d in range(editor.size) if d not in editor.face_walk(polygon))
        with pytest.raises(InvalidCurve):
            route_chord(editor, polygon, outside, set())

    def test_realize_boundary_of_meridian_is_parallel(self):
        """Pushoff of a meridian -> disjoint and parallel to it"""
        editor = MapEditor(grid_torus(2, 2))
        m = _meridian(2, 2)
        editor.track("m", m.darts)
        sub = set(m.darts) | {editor.alpha[x] for x in m.darts}
        realize_boundary(editor, sub, m.darts[0], key="push")
        frozen, remap = editor.freeze()
        a = Curve(darts=tuple(editor.frozen_path("m", remap)))
        b = Curve(darts=tuple(editor.frozen_path("push", remap)))
        assert are_disjoint(frozen, a, b)
        assert are_parallel(frozen, a, b)


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------

class TestCurves:

    def test_meridian_meets_longitude_once(self):
        """Grid meridian vs longitude -> 1 crossing"""
        cmap = grid_torus(3, 3)
        assert intersection_count(cmap, _meridian(3, 3), _longitude(3, 3)) == 1

    def test_parallel_meridians_do_not_meet(self):
        """Two meridian columns -> 0 crossings"""
        cmap = grid_torus(3, 3)
        assert intersection_count(cmap, _meridian(3, 3, 0), _meridian(3, 3, 1)) == 0

    def test_cp2_curves_pairwise_meet_once(self):
        """CP^2 trisection curves -> pairwise 1"""
        from backend.data.fiber_fixtures import cp2_trisection
        d = cp2_trisection()
        curves = d.all_curves()
        for i in range(3):
            for j in range(i + 1, 3):
                assert intersection_count(d.map, curves[i], curves[j]) == 1

    def test_shared_edge_is_not_transverse(self):
        """Curve against itself -> NotTransverse"""
        cmap = grid_torus(2, 2)
        with pytest.raises(NotTransverse):
            intersection_count(cmap, _meridian(2, 2), _meridian(2, 2))

    def test_face_boundary_is_simple(self):
        """Square face of a 2×2 grid -> simple closed curve"""
        cmap = grid_torus(2, 2)
        assert is_simple(cmap, face_boundary_curve(cmap, 0))

    def test_vertex_visited_twice_names_the_normal_form(self):
        """Figure-eight walk through the single vertex of a torus -> rejected, reason names vertex and normal form"""
        torus = map_from_cycles([(0, 2), (1, 3)], [(0, 1, 2, 3)])
        reason = simplicity_problem(torus, Curve(darts=(0, 1)))
        assert reason.startswith("curve visits vertex 0 twice")
        assert "normal form" in reason
        assert not is_simple(torus, Curve(darts=(0, 1)))


# ---------------------------------------------------------------------------
# Cutting
# ---------------------------------------------------------------------------

class TestCutting:

    def test_torus_cut_along_meridian(self):
        """Torus cut along one meridian -> one piece, capped genus 0, 2 holes"""
        cmap = grid_torus(3, 3)
        pieces = cut_along(cmap, [_meridian(3, 3)])
        assert len(pieces) == 1
        assert pieces[0].capped_genus == 0
        assert pieces[0].hole_count == 2

    def test_torus_cut_along_two_meridians(self):
        """Torus cut along two parallel meridians -> two annuli"""
        cmap = grid_torus(3, 3)
        pieces = cut_along(cmap, [_meridian(3, 3, 0), _meridian(3, 3, 1)])
        assert len(pieces) == 2
        assert all(p.capped_genus == 0 and p.hole_count == 2 for p in pieces)

    def test_genus_two_cut_system(self):
        """Genus-2 sum cut along one meridian per handle -> one sphere with 4 holes"""
        d = _genus_two()
        pieces = cut_along(d.map, list(d.family(1)))
        assert len(pieces) == 1
        assert pieces[0].capped_genus == 0
        assert pieces[0].hole_count == 4

    def test_tracked_curve_on_cut_locus(self):
        """Tracked curve crossing the cut -> TrackedHitsCutLocus"""
        cmap = grid_torus(3, 3)
        with pytest.raises(TrackedHitsCutLocus):
            cut_along(cmap, [_meridian(3, 3)], tracked={"l": _longitude(3, 3)})

    def test_is_cut_system(self):
        """Meridian -> cut system; face boundary -> not"""
        cmap = grid_torus(3, 3)
        assert is_cut_system(cmap, [_meridian(3, 3)])
        assert not is_cut_system(cmap, [face_boundary_curve(cmap, 0)])

    def test_gen1_meridians_parallel(self):
        """The k meridians of gen1_sphere_diagram(5, 3) -> pairwise parallel"""
        d = gen1_sphere_diagram(5, 3)
        meridians = [d.family(i)[0] for i in range(1, 4)]
        for i in range(3):
            for j in range(i + 1, 3):
                assert are_parallel(d.map, meridians[i], meridians[j])

    def test_meridians_of_different_handles_not_parallel(self):
        """Meridians on the two handles of a genus-2 sum -> not parallel"""
        d = _genus_two()
        a, b = d.family(1)
        assert not are_parallel(d.map, a, b)


# ---------------------------------------------------------------------------
# Homology
# ---------------------------------------------------------------------------

class TestHomology:

    def test_face_boundary_is_zero(self):
        """Every face boundary -> zero class"""
        cmap = grid_torus(3, 2)
        for face in cmap.faces:
            assert not h1_class_vector(cmap, face_boundary_curve(cmap, face[0])).any()

    def test_meridian_longitude_independent(self):
        """Meridian and longitude -> rank 2"""
        cmap = grid_torus(3, 3)
        assert family_rank(cmap, [_meridian(3, 3), _longitude(3, 3)]) == 2

    def test_cut_system_rank_equals_genus(self):
        """Each family of a genus-2 diagram -> rank 2"""
        d = _genus_two()
        for family in d.families:
            assert family_rank(d.map, family) == 2

    def test_parallel_curves_share_class(self):
        """Two parallel meridians -> same span"""
        cmap = grid_torus(3, 3)
        assert same_span(cmap, [_meridian(3, 3, 0)], [_meridian(3, 3, 2)])

    def test_gf2_rank_empty(self):
        """No rows -> rank 0"""
        assert gf2_rank([]) == 0


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------

class TestIsomorphism:

    def test_renumbered_diagram_isomorphic(self):
        """Diagram vs itself with darts shifted -> isomorphic"""
        d = gen1_sphere_diagram(4, 2)
        assert diagrams_isomorphic(d, _renumber(d))

    def test_torus_vs_genus_two(self):
        """Torus vs genus-2 surface -> not isomorphic"""
        assert not maps_isomorphic(surface_of_genus(1), surface_of_genus(2))

    def test_family_order_matters_unless_flagged(self):
        """gen1(3,1) vs gen1(3,2) -> different in order, equal up to family relabelling"""
        d1 = gen1_sphere_diagram(3, 1)
        d2 = gen1_sphere_diagram(3, 2)
        assert not diagrams_isomorphic(d1, d2)
        assert diagrams_isomorphic(d1, d2, unordered_families=True)
        assert intersection_matrix(d1).values.sum() == intersection_matrix(d2).values.sum()

    def test_find_isomorphism_seeded(self):
        """Map vs its renumbering -> bijection commuting with alpha and rot"""
        d = gen1_sphere_diagram(3, 1)
        shifted = _renumber(d, shift=3)
        mapping = find_isomorphism(d.map, shifted.map, seed=(0, 3))
        assert mapping is not None
        assert all(mapping[d.map.rot[x]] == shifted.map.rot[mapping[x]] for x in d.map.darts)
