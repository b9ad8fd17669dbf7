"""
MoveEngine: slide scripts and destabilizations with an audit trail.
"""
import pytest

from backend.api.diagram_controller import fixture_path
from backend.api.slide_format import read_slides
from backend.core.audit_logger import AuditLogger
from backend.core.audit_store import NullAuditStore
from backend.core.curves import are_disjoint, curve_free_faces
from backend.core.diagram_models import CurveRef, SlideScript, SlideStep, empty_diagram
from backend.core.cutting import are_parallel
from backend.core.diagram_ops import connected_sum, find_stabilizations, gen1_sphere_diagram, refine, validate_diagram
from backend.core.errors import NotSameFamily, TargetMissing, WitnessStale
from backend.core.move_engine import MoveEngine
from backend.data.bundle_gen import circle_bundle_diagram
from backend.data.fiber_fixtures import cp2_trisection
from backend.data.models import Monodromy
from backend.data.schemes import scheme_zigzag


def _genus_two():
    d1 = refine(gen1_sphere_diagram(3, 1))
    d2 = refine(gen1_sphere_diagram(3, 2))
    return connected_sum(d1, d2, curve_free_faces(d1.map, d1.all_curves())[0],
                         curve_free_faces(d2.map, d2.all_curves())[0])


@pytest.fixture
def engine():
    return MoveEngine(AuditLogger(store=NullAuditStore()))


def _step(curve, over, family=1):
    return SlideStep(family=family, curve=CurveRef(family=family, index=curve),
                     over=CurveRef(family=family, index=over))


class TestApplyScript:

    def test_script_logged_under_one_correlation(self, engine):
        """Two slides -> two move_applied events sharing a correlation id"""
        script = SlideScript(steps=[_step(0, 1), _step(1, 0, family=2)])
        result = engine.apply_script(_genus_two(), script)
        assert validate_diagram(result).valid
        logs = engine.audit.store.get_all_logs()
        assert [log.event_type for log in logs] == ["move_applied", "move_applied"]
        assert logs[0].correlation_id == logs[1].correlation_id
        assert [kind for kind, _ in engine.history] == ["slide", "slide"]

    def test_label_reference(self, engine):
        """Curves named by role label resolve against the current diagram"""
        d = _genus_two()
        label = d.family(1)[1].label
        assert label == "meridian:0~2"
        step = SlideStep(family=1, curve=CurveRef(family=1, index=0), over=CurveRef(family=1, label=label))
        assert engine.apply_step(d, step).genus == 2

    def test_missing_label(self, engine):
        step = SlideStep(family=1, curve=CurveRef(family=1, label="nope"), over=CurveRef(family=1, index=0))
        with pytest.raises(TargetMissing):
            engine.apply_step(_genus_two(), step)

    def test_missing_index(self, engine):
        with pytest.raises(TargetMissing):
            engine.apply_step(_genus_two(), _step(0, 5))

    def test_mixed_families(self, engine):
        """Reference into another family -> NotSameFamily"""
        step = SlideStep(family=1, curve=CurveRef(family=2, index=0), over=CurveRef(family=1, index=1))
        with pytest.raises(NotSameFamily):
            engine.apply_step(_genus_two(), step)

    def test_without_audit(self):
        assert MoveEngine().apply_script(_genus_two(), SlideScript(steps=[_step(0, 1)])).genus == 2


class TestDestabilize:

    def test_witnesses(self, engine):
        assert len(engine.find_witnesses(gen1_sphere_diagram(3, 1))) == 1

    def test_first_witness_used(self, engine):
        """No witness given -> first detected one, logged"""
        result = engine.destabilize(gen1_sphere_diagram(4, 1))
        assert result.genus == 0
        logs, _ = engine.audit.store.query_logs(event_type="destabilization_performed")
        assert logs[0].details == {"genus_before": 1}
        assert engine.history[-1][0] == "destab"

    def test_nothing_to_destabilize(self, engine):
        with pytest.raises(WitnessStale):
            engine.destabilize(empty_diagram(3))


# ---------------------------------------------------------------------------
# CP^2 x S^1: shipped slides, then two destabilizations
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def cp2_slid():
    bundle = circle_bundle_diagram(cp2_trisection(), Monodromy.identity(3), scheme_zigzag(4))
    script = read_slides(fixture_path("cp2_slides"))
    return MoveEngine(AuditLogger(store=NullAuditStore())).apply_script(bundle, script)


def _curve(d, family, label):
    return d.family(family)[d.find_label(family, label)]


def _ref(d, family, label):
    return CurveRef(family=family, index=d.find_label(family, label))


class TestCircleBundleChain:

    def test_slides_keep_genus_and_validity(self, cp2_slid):
        assert cp2_slid.genus == 7
        assert validate_diagram(cp2_slid, expected_n=4).valid

    @pytest.mark.parametrize("family,label,partner_family,partner_label", [
        (1, "copy:S2:0", 3, "span:C1:0"),
        (4, "copy:S2:0", 2, "span:C0:1"),
    ])
    def test_slid_copies_run_along_a_span(self, cp2_slid, family, label, partner_family, partner_label):
        """Each slid fiber copy ends up parallel to the span curve of the tube it slid through"""
        slid = _curve(cp2_slid, family, label)
        span = _curve(cp2_slid, partner_family, partner_label)
        assert are_disjoint(cp2_slid.map, slid, span)
        assert are_parallel(cp2_slid.map, slid, span)

    def test_witness_detected(self, cp2_slid):
        found = find_stabilizations(cp2_slid)
        groups = {(frozenset(w.group_a), frozenset(w.group_b)) for w in found}
        expected_a = frozenset({_ref(cp2_slid, 1, "copy:S2:0"), _ref(cp2_slid, 3, "span:C1:0")})
        expected_b = frozenset({_ref(cp2_slid, 2, "span:C0:1"), _ref(cp2_slid, 4, "copy:S2:0")})
        assert (expected_a, expected_b) in groups

    def test_two_rounds_reach_genus_five(self, cp2_slid):
        """genus 7 -> 6 -> 5, valid after each round"""
        engine = MoveEngine(AuditLogger(store=NullAuditStore()))
        once = engine.destabilize(cp2_slid)
        assert once.genus == 6
        assert validate_diagram(once, expected_n=4).valid
        twice = engine.destabilize(once)
        assert twice.genus == 5
        assert validate_diagram(twice, expected_n=4).valid
        assert [len(f) for f in twice.families] == [5, 5, 5, 5]
        logs, _ = engine.audit.store.query_logs(event_type="destabilization_performed")
        assert sorted(log.details["genus_before"] for log in logs) == [6, 7]
