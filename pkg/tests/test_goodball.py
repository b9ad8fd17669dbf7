"""
Simplicial complexes and good ball decompositions.
"""
import networkx as nx
import pytest

from backend.core.errors import NotClosedManifold, NotSimple
from backend.data.goodball import (
    extract_base_graph,
    graph_is_connected,
    greedy_collapse,
    inclusion_exclusion_euler,
    predicted_genus,
    require_simple,
    rpn_decomposition,
    s2xs1_decomposition,
    sphere_decomposition,
    star_decomposition,
    stratum_table,
    validate_ball_likeness,
)
from backend.data.models import BaseEdge, BaseGraph
from backend.data.simplicial import (
    barycentric_subdivision,
    boundary_simplex,
    check_closed_manifold,
    closure,
    complex_from_facets,
    link,
    torus_complex,
)


# ---------------------------------------------------------------------------
# Simplicial complexes
# ---------------------------------------------------------------------------

class TestSimplicial:

    def test_closure_counts(self):
        """Closure of one triangle -> 3 vertices, 3 edges, 1 triangle"""
        faces = closure([(2, 0, 1)])
        assert len(faces) == 7
        assert faces[0] == (0,)
        assert faces[-1] == (0, 1, 2)

    def test_boundary_of_tetrahedron(self):
        """Boundary of the 3-simplex -> f-vector (4, 6, 4), chi 2"""
        k = boundary_simplex(2)
        assert k.f_vector == [4, 6, 4]
        assert k.euler == 2
        check_closed_manifold(k)

    def test_subdivision_counts(self):
        """sd of the tetrahedron boundary -> 14 vertices, 24 triangles; sd twice -> 144 triangles"""
        sd = barycentric_subdivision(boundary_simplex(2))
        assert len(sd.vertices) == 14
        assert len(sd.facets) == 24
        assert sd.euler == 2
        assert len(barycentric_subdivision(sd).facets) == 144

    def test_torus(self):
        """9-vertex torus -> chi 0, every link a hexagon"""
        t = torus_complex()
        assert t.f_vector == [9, 27, 18]
        assert t.euler == 0
        check_closed_manifold(t)
        assert link(t, 0).f_vector == [6, 6]

    def test_open_disk_rejected(self):
        """Single triangle has free ridges -> NotClosedManifold"""
        with pytest.raises(NotClosedManifold):
            check_closed_manifold(complex_from_facets([(0, 1, 2)]))

    def test_points_rejected(self):
        with pytest.raises(NotClosedManifold):
            check_closed_manifold(complex_from_facets([(0,), (1,)]))


class TestGreedyCollapse:

    def test_triangle_collapses(self):
        """Filled triangle -> collapsible"""
        assert greedy_collapse(closure([(0, 1, 2)]))

    def test_circle_does_not(self):
        """Hollow triangle -> not collapsible"""
        assert not greedy_collapse(closure([(0, 1), (1, 2), (0, 2)]))


# ---------------------------------------------------------------------------
# Star decompositions
# ---------------------------------------------------------------------------

class TestStarDecomposition:

    def test_tetrahedron_boundary_is_ball_like(self):
        """Stars in the second subdivision of ∂Δ³ -> good balls, 24 triple points"""
        gbd = star_decomposition(boundary_simplex(2))
        assert gbd.piece_count == 3
        assert len(gbd.full_stratum.components) == 24
        report = validate_ball_likeness(gbd)
        assert report.valid, [c.model_dump() for c in report.failures()]
        assert report.euler_consistent

    def test_circle(self):
        """∂Δ² -> two pieces meeting in 6 points"""
        gbd = star_decomposition(boundary_simplex(1))
        assert gbd.piece_count == 2
        assert len(gbd.full_stratum.components) == 6
        assert validate_ball_likeness(gbd).valid

    def test_merged_labels_break_ball_likeness(self):
        """Vertices and edges in one piece -> the pieces meet in circles"""
        gbd = star_decomposition(boundary_simplex(2), labels=[0, 0, 1])
        assert gbd.piece_count == 2
        report = validate_ball_likeness(gbd)
        assert not report.valid
        assert any(c.euler == 0 for c in report.failures())

    def test_torus_is_ball_like(self):
        """Torus stars -> every stratum a ball, inclusion-exclusion gives 0"""
        gbd = star_decomposition(torus_complex())
        assert gbd.base_euler == 0
        assert inclusion_exclusion_euler(gbd) == 0
        assert validate_ball_likeness(gbd).valid

    def test_base_graph_is_simple(self):
        """Star decomposition of a surface -> one edge end of every colour at each triple point"""
        graph = extract_base_graph(star_decomposition(boundary_simplex(2)))
        assert graph.simple
        assert graph.vertex_count == 24
        assert graph.edge_count == 36
        require_simple(graph)


# ---------------------------------------------------------------------------
# Closed-form decompositions
# ---------------------------------------------------------------------------

class TestClosedForms:

    @pytest.mark.parametrize("gbd,expected", [
        (sphere_decomposition(2), 2),
        (rpn_decomposition(2), 1),
        (s2xs1_decomposition(), 0),
    ])
    def test_inclusion_exclusion(self, gbd, expected):
        """Alternating sum of component Euler characteristics -> chi of the base"""
        assert inclusion_exclusion_euler(gbd) == expected
        assert gbd.base_euler == expected

    @pytest.mark.parametrize("gbd", [sphere_decomposition(3), rpn_decomposition(3), s2xs1_decomposition()])
    def test_ball_like(self, gbd):
        assert validate_ball_likeness(gbd).valid

    def test_sphere_graph(self):
        """S^2 -> theta-like graph, two vertices, three colours"""
        graph = extract_base_graph(sphere_decomposition(2))
        assert (graph.vertex_count, graph.edge_count) == (2, 3)
        assert graph.simple
        for g in range(4):
            assert predicted_genus(graph, g) == 2 * g + 2

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_rpn_genus(self, n):
        """RP^n -> 2^n g + 2^(n-1) (n-1) + 1"""
        graph = extract_base_graph(rpn_decomposition(n))
        assert graph.simple
        for g in range(3):
            assert predicted_genus(graph, g) == 2 ** n * g + 2 ** (n - 1) * (n - 1) + 1

    def test_s2xs1_graph(self):
        """S^2×S^1 -> 8 vertices, 16 edges, bipartite by the parity of a+b"""
        graph = extract_base_graph(s2xs1_decomposition())
        assert (graph.vertex_count, graph.edge_count) == (8, 16)
        assert graph.simple
        assert graph_is_connected(graph)
        assert predicted_genus(graph, 1) == 17
        assert predicted_genus(graph, 0) == 9

        def parity(v):
            return (v // 4 + (v // 2) % 2) % 2

        assert all(parity(e.ends[0]) != parity(e.ends[1]) for e in graph.edges)
        g = nx.MultiGraph([e.ends for e in graph.edges])
        assert nx.is_bipartite(g)

    def test_stratum_table(self):
        """One row per component with expected dimension"""
        frame = stratum_table(sphere_decomposition(2))
        assert len(frame) == 3 + 3 + 2
        assert (frame["dimension"] == frame["expected_dimension"]).all()

    def test_bad_dimensions(self):
        with pytest.raises(ValueError):
            sphere_decomposition(0)
        with pytest.raises(ValueError):
            rpn_decomposition(1)


class TestBaseGraphChecks:

    def test_lonely_vertex_not_simple(self):
        """Vertex with no edges -> NotSimple"""
        with pytest.raises(NotSimple):
            require_simple(BaseGraph(vertex_count=1, colors=2))

    def test_double_edge_end(self):
        """Two edges of one colour at a vertex -> reported"""
        graph = BaseGraph(vertex_count=2, colors=1,
                          edges=[BaseEdge(color=0, ends=(0, 1)), BaseEdge(color=0, ends=(0, 1))])
        with pytest.raises(NotSimple):
            require_simple(graph)
        assert graph_is_connected(graph)
