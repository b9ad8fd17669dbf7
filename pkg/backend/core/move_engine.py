"""
Move engine

Applies slide scripts and destabilizations to diagrams, one step at a time:
  1. Resolve curve references (index or role label) against the current diagram
  2. Run the move from diagram_ops
  3. Log every step to the AuditLogger under one correlation id
"""
import uuid
from typing import List, Optional, Tuple

from backend.core.audit_logger import AuditLogger
from backend.core.diagram_models import MultisectionDiagram, SlideScript, SlideStep, StabilizationWitness
from backend.core.diagram_ops import destabilize, find_enabling_slides, find_stabilizations, handleslide
from backend.core.errors import NotSameFamily, TargetMissing, WitnessStale


class MoveEngine:
    """Runs handleslides and destabilizations with an audit trail."""

    def __init__(self, audit_logger: Optional[AuditLogger] = None):
        self.audit = audit_logger
        self.history: List[Tuple[str, MultisectionDiagram]] = []

    def apply_step(self, d: MultisectionDiagram, step: SlideStep,
                   correlation_id: Optional[str] = None) -> MultisectionDiagram:
        if step.curve.family != step.family or step.over.family != step.family:
            raise NotSameFamily(f"slide step mixes families: {step.curve.family}, {step.over.family} in {step.family}")
        try:
            curve = step.curve.resolve(d)
            over = step.over.resolve(d)
        except KeyError as exc:
            raise TargetMissing(str(exc.args[0]))
        result = handleslide(d, step.family, curve, over, step.band)
        self.history.append(("slide", result))
        if self.audit:
            self.audit.log_move(result, step, correlation_id)
        return result

    def apply_script(self, d: MultisectionDiagram, script: SlideScript) -> MultisectionDiagram:
        correlation_id = str(uuid.uuid4())
        for step in script.steps:
            d = self.apply_step(d, step, correlation_id)
        return d

    def find_witnesses(self, d: MultisectionDiagram) -> List[StabilizationWitness]:
        return find_stabilizations(d)

    def find_slides(self, d: MultisectionDiagram, limit: int = 1) -> List[Tuple[SlideStep, int]]:
        """Single handleslides after which a witness shows up, with the witness count."""
        return find_enabling_slides(d, limit)

    def destabilize(self, d: MultisectionDiagram, witness: Optional[StabilizationWitness] = None,
                    correlation_id: Optional[str] = None) -> MultisectionDiagram:
        """Destabilize along ``witness``, or along the first detected one."""
        if witness is None:
            found = find_stabilizations(d)
            if not found:
                raise WitnessStale(f"{d.name or 'diagram'} has no destabilization witness")
            witness = found[0]
        result = destabilize(d, witness)
        self.history.append(("destab", result))
        if self.audit:
            self.audit.log_destabilization(d, result, correlation_id)
        return result
