"""
Bundle generators: graphs of fibers, sphere bundles, the twisted family and
bundles over the circle.
"""
import pytest

from backend.core.curves import intersection_count
from backend.core.diagram_ops import gen1_sphere_diagram, refine, validate_diagram
from backend.core.errors import (
    Disconnected,
    MonodromyNotAutomorphism,
    NoCurveFreeFace,
    SchemeMismatch,
    Unsupported,
)
from backend.core.isomorphism import diagrams_isomorphic
from backend.data.bundle_gen import (
    assemble_graph_of_fibers,
    check_monodromy,
    circle_bundle_diagram,
    sphere_base_bundle_diagram,
    twisted_w_m,
)
from backend.data.fiber_fixtures import cp2_trisection, s2xs2_trisection
from backend.data.goodball import extract_base_graph, rpn_decomposition, s2xs1_decomposition, sphere_decomposition
from backend.data.models import BaseEdge, BaseGraph, Monodromy
from backend.data.schemes import parse_sigma, scheme_for_sigma, scheme_stack, scheme_zigzag


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def cp2():
    return cp2_trisection()


@pytest.fixture(scope="module")
def cp2_bundle(cp2):
    return circle_bundle_diagram(cp2, Monodromy.identity(3), scheme_zigzag(4))


# y -> 1 - y on the 1x2 grid refined at the middle of its first meridian edge:
# the meridian is reversed, the two longitudes swap, the slot corner stays put
REFLECTION = (4, 7, 6, 5, 0, 3, 2, 1, 9, 8, 10, 11, 13, 12)


@pytest.fixture(scope="module")
def reflected_fiber():
    return refine(gen1_sphere_diagram(3, 1), edge=1)


def _labels(d, family):
    return [c.label for c in d.family(family)]


# ---------------------------------------------------------------------------
# Fibers
# ---------------------------------------------------------------------------

class TestFibers:

    def test_cp2_is_valid(self, cp2):
        """Three slopes on the torus -> valid genus-1 trisection"""
        report = validate_diagram(cp2, expected_n=3)
        assert report.valid, report.failed_rules()
        assert cp2.genus == 1

    def test_s2xs2_is_valid(self):
        """Genus-2 trisection -> valid, two curves per family"""
        d = s2xs2_trisection()
        assert d.genus == 2
        assert [len(f) for f in d.families] == [2, 2, 2]
        assert validate_diagram(d).valid


# ---------------------------------------------------------------------------
# Graphs of fibers
# ---------------------------------------------------------------------------

class TestAssembleGraphOfFibers:

    @pytest.mark.parametrize("gbd,g", [
        (sphere_decomposition(2), 0),
        (sphere_decomposition(2), 1),
        (rpn_decomposition(2), 1),
        (s2xs1_decomposition(), 1),
    ])
    def test_genus(self, gbd, g):
        """v*g + e - v + 1"""
        graph = extract_base_graph(gbd)
        cmap = assemble_graph_of_fibers(graph, g)
        assert cmap.genus == graph.vertex_count * g + graph.edge_count - graph.vertex_count + 1

    def test_s2xs1_genus_17(self):
        cmap = assemble_graph_of_fibers(extract_base_graph(s2xs1_decomposition()), 1)
        assert cmap.genus == 17

    def test_disconnected_graph(self):
        """Two theta graphs -> Disconnected"""
        edges = [BaseEdge(color=c, ends=(a, a + 1)) for a in (0, 2) for c in range(3)]
        with pytest.raises(Disconnected):
            assemble_graph_of_fibers(BaseGraph(vertex_count=4, colors=3, edges=edges), 0)


# ---------------------------------------------------------------------------
# Sphere bundles
# ---------------------------------------------------------------------------

class TestSphereBundle:

    @pytest.mark.parametrize("n", range(3, 8))
    @pytest.mark.parametrize("g", range(0, 4))
    def test_valid_with_expected_genus(self, n, g):
        """Genus 2g + n - 1, families of that size, valid"""
        d = sphere_base_bundle_diagram(n, g)
        assert d.genus == 2 * g + n - 1
        assert all(len(f) == d.genus for f in d.families)
        report = validate_diagram(d, expected_n=n)
        assert report.valid, report.failed_rules()

    def test_labels(self):
        """Family i carries arcs to the other tubes and the meridian of tube i-1"""
        d = sphere_base_bundle_diagram(4, 0)
        assert _labels(d, 1) == ["arc:D2", "arc:D3", "meridian:D0"]
        assert _labels(d, 3)[-1] == "meridian:D2"
        assert d.name == "sphere-bundle-4-0"
        assert d.panels is not None

    def test_fiber_arcs_labelled(self):
        """Positive fiber genus -> loop arcs labelled arc:L<i>"""
        d = sphere_base_bundle_diagram(3, 1)
        assert "arc:L0" in _labels(d, 1)
        assert "arc:L1" in _labels(d, 1)

    @pytest.mark.parametrize("n,g", [(2, 0), (3, -1)])
    def test_unsupported(self, n, g):
        with pytest.raises(Unsupported):
            sphere_base_bundle_diagram(n, g)


class TestTwistedFamily:

    def test_zero_twist_is_the_sphere_bundle(self):
        """m = 0 -> the S^4 sphere bundle, renamed"""
        d = twisted_w_m(0)
        base = sphere_base_bundle_diagram(5, 0)
        assert d.name == "w-twist-0"
        assert d.map == base.map
        assert d.families == base.families

    @pytest.mark.parametrize("m", [1, 2])
    def test_twist_intersection_counts(self, m):
        """Twisted curve meets x in count(c, x) + 2m count(c, tau) count(tau, x) points"""
        base = sphere_base_bundle_diagram(5, 0)
        twisted = twisted_w_m(m)
        index = base.find_label(1, "arc:D2")
        tau_index = base.find_label(3, "meridian:D2")
        c, tau = base.family(1)[index], base.family(3)[tau_index]
        c_new = twisted.family(1)[index]
        through = intersection_count(base.map, c, tau)
        assert through == 1
        for f in range(2, 6):
            for j, x in enumerate(base.family(f)):
                x_new = twisted.family(f)[j]
                before = intersection_count(base.map, c, x)
                after = intersection_count(twisted.map, c_new, x_new)
                if f == 3 and j == tau_index:
                    assert after == before
                else:
                    assert after == before + 2 * m * through * intersection_count(base.map, tau, x)

    def test_zero_twist_isomorphic(self):
        assert diagrams_isomorphic(twisted_w_m(0), sphere_base_bundle_diagram(5, 0))

    @pytest.mark.parametrize("m", range(0, 6))
    def test_winds_2m_times(self, m):
        """A curve crossing the track once picks up 2m crossings with the twisted curve"""
        base = sphere_base_bundle_diagram(5, 0)
        twisted = twisted_w_m(m)
        index = base.find_label(1, "arc:D2")
        tau = base.family(3)[base.find_label(3, "meridian:D2")]
        j = base.find_label(2, "arc:D2")
        assert intersection_count(base.map, tau, base.family(2)[j]) == 1
        before = intersection_count(base.map, base.family(1)[index], base.family(2)[j])
        after = intersection_count(twisted.map, twisted.family(1)[index], twisted.family(2)[j])
        assert after - before == 2 * m
        report = validate_diagram(twisted, expected_n=5)
        assert report.valid, report.failed_rules()
        assert twisted.genus == 4

    def test_two_twists_add_eight_crossings(self):
        """m = 2 -> eight new crossings with families 2 and 4, which both pass the twisted tube"""
        base = sphere_base_bundle_diagram(5, 0)
        twisted = twisted_w_m(2)
        index = base.find_label(1, "arc:D2")
        extra = 0
        for f in (2, 4):
            for j, x in enumerate(base.family(f)):
                extra += (intersection_count(twisted.map, twisted.family(1)[index], twisted.family(f)[j])
                          - intersection_count(base.map, base.family(1)[index], x))
        assert extra == 8

    def test_negative(self):
        with pytest.raises(Unsupported):
            twisted_w_m(-1)


# ---------------------------------------------------------------------------
# Bundles over the circle
# ---------------------------------------------------------------------------

class TestCircleBundle:

    def test_cp2_zigzag_genus(self, cp2_bundle):
        """Six genus-1 panels in a cycle -> genus 7, seven curves per family"""
        assert cp2_bundle.n == 4
        assert cp2_bundle.genus == 7
        assert [len(f) for f in cp2_bundle.families] == [7, 7, 7, 7]

    def test_cp2_zigzag_valid(self, cp2_bundle):
        report = validate_diagram(cp2_bundle, expected_n=4)
        assert report.valid, report.failed_rules()

    def test_family_three_layout(self, cp2_bundle):
        """Copies on panels 1 and 6, span arcs on columns 1 and 3, meridian on the last column it crosses"""
        assert _labels(cp2_bundle, 3) == [
            "copy:S1:0", "copy:S6:0",
            "span:C1:0", "span:C1:1", "span:C3:0", "span:C3:1",
            "meridian:C5",
        ]

    def test_panels_recorded(self, cp2_bundle):
        """Every panel shows up in the dart panel map"""
        panels = set(cp2_bundle.panels)
        assert set(range(1, 7)) <= panels
        assert panels <= set(range(-1, 7))

    def test_three_cycle(self, cp2):
        """sigma = (123) needs phi carrying family k onto sigma(k); identity phi is rejected"""
        sigma = parse_sigma("(123)")
        with pytest.raises(MonodromyNotAutomorphism):
            circle_bundle_diagram(cp2, Monodromy(sigma=sigma), scheme_stack([[1, 2, 3]]))

    def test_s2xs2_genus(self):
        """Genus-2 fiber on six panels -> genus 13"""
        d = circle_bundle_diagram(s2xs2_trisection(), Monodromy.identity(3), scheme_zigzag(4))
        assert d.genus == 13
        assert all(len(f) == 13 for f in d.families)

    def test_odd_columns_reversing_wrap(self, reflected_fiber):
        """sigma = (23) on three rows -> N = 5; the wrap glues through a reflection -> genus 6, valid"""
        sigma = parse_sigma("(23)", rows=3)
        scheme = scheme_for_sigma(sigma)
        assert scheme.N == 5
        d = circle_bundle_diagram(reflected_fiber, Monodromy(sigma=sigma, phi=REFLECTION), scheme)
        assert d.genus == 6
        assert [len(f) for f in d.families] == [6, 6, 6, 6]
        report = validate_diagram(d, expected_n=4)
        assert report.valid, report.failed_rules()

    def test_odd_columns_need_reversing_phi(self, reflected_fiber):
        """Identity phi with N = 5 -> MonodromyNotAutomorphism"""
        with pytest.raises(MonodromyNotAutomorphism):
            circle_bundle_diagram(reflected_fiber, Monodromy(sigma=(1, 3, 2)), scheme_for_sigma((1, 3, 2)))

    def test_scheme_rows_must_match(self, cp2):
        """Four-row zigzag on a trisection -> SchemeMismatch"""
        with pytest.raises(SchemeMismatch):
            circle_bundle_diagram(cp2, Monodromy.identity(3), scheme_zigzag(5))

    def test_scheme_must_be_valid(self, cp2):
        """Broken table -> SchemeMismatch"""
        broken = scheme_zigzag(4).with_cell(1, 2, 2)
        with pytest.raises(SchemeMismatch):
            circle_bundle_diagram(cp2, Monodromy.identity(3), broken)

    def test_no_curve_free_face(self):
        """Unrefined grid fiber -> NoCurveFreeFace"""
        with pytest.raises(NoCurveFreeFace):
            circle_bundle_diagram(gen1_sphere_diagram(3, 1), Monodromy.identity(3), scheme_zigzag(4))


class TestCheckMonodromy:

    def test_identity_passes(self, cp2):
        check_monodromy(cp2, Monodromy.identity(3))

    def test_phi_not_a_permutation(self, cp2):
        phi = tuple([0] * cp2.map.dart_count)
        with pytest.raises(MonodromyNotAutomorphism):
            check_monodromy(cp2, Monodromy(sigma=(1, 2, 3), phi=phi))

    def test_sigma_wrong_size(self, cp2):
        with pytest.raises(MonodromyNotAutomorphism):
            check_monodromy(cp2, Monodromy(sigma=(1, 2)))

    def test_reflection_reverses(self, reflected_fiber):
        """The grid reflection passes as an orientation-reversing monodromy only"""
        mono = Monodromy(sigma=(1, 3, 2), phi=REFLECTION)
        check_monodromy(reflected_fiber, mono, reversing=True)
        with pytest.raises(MonodromyNotAutomorphism):
            check_monodromy(reflected_fiber, mono)

    def test_reversing_needs_phi(self, reflected_fiber):
        with pytest.raises(MonodromyNotAutomorphism):
            check_monodromy(reflected_fiber, Monodromy(sigma=(1, 3, 2)), reversing=True)
