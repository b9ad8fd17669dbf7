import uuid
from collections import Counter
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from backend.core.audit_models import AuditLogEntry, AuditSummary
from backend.core.audit_store import AuditStore
from backend.core.diagram_models import MultisectionDiagram, SchemeReport, SlideStep, ValidationReport


class AuditLogger:
    """Central audit logging service."""

    def __init__(self, store: AuditStore):
        self.store = store

    def _entry(self, event_type: str, source: str, correlation_id: Optional[str], **fields: Any) -> AuditLogEntry:
        return AuditLogEntry(
            log_id=str(uuid.uuid4()),
            timestamp=datetime.now(timezone.utc),
            event_type=event_type,
            source=source,
            correlation_id=correlation_id,
            **fields,
        )

    def log_event(self, entry: AuditLogEntry) -> str:
        """Logs a raw event and returns the log_id."""
        if not entry.log_id:
            entry.log_id = str(uuid.uuid4())
        self.store.save_log(entry)
        return entry.log_id

    def log_command(self, stage: str, command: str, correlation_id: str,
                    details: Optional[Dict[str, Any]] = None) -> None:
        """stage is one of started | completed | failed."""
        decision = {"completed": "pass", "failed": "fail"}.get(stage)
        self.log_event(self._entry(f"command_{stage}", "cli", correlation_id, decision=decision,
                                   details={"command": command, **(details or {})}))

    def log_diagram_generated(self, d: MultisectionDiagram, correlation_id: Optional[str] = None) -> None:
        self.log_event(self._entry("diagram_generated", "bundle_gen", correlation_id, diagram_id=d.name,
                                   genus=d.genus, n=d.n, details={"provenance": d.provenance}))

    def log_validation(self, report: ValidationReport, correlation_id: Optional[str] = None) -> None:
        """One diagram_validated event plus one rule_violation per failed rule."""
        for v in report.violations:
            self.log_event(self._entry("rule_violation", "validation_engine", correlation_id,
                                       diagram_id=report.name, rule_id=v.rule_id, rule_name=v.rule_name,
                                       severity=v.severity, decision="fail",
                                       details={"message": v.message, "family": v.family}))
        self.log_event(self._entry("diagram_validated", "validation_engine", correlation_id,
                                   diagram_id=report.name, genus=report.genus, n=report.n,
                                   decision="pass" if report.valid else "fail",
                                   details={"rules_evaluated": report.rules_evaluated}))

    def log_scheme_validated(self, report: SchemeReport, correlation_id: Optional[str] = None) -> None:
        self.log_event(self._entry("scheme_validated", "validation_engine", correlation_id,
                                   diagram_id=report.name, n=report.n,
                                   decision="pass" if report.valid else "fail",
                                   details={"N": report.N, "failed": report.failed_rules()}))

    def log_move(self, d: MultisectionDiagram, step: SlideStep, correlation_id: Optional[str] = None) -> None:
        self.log_event(self._entry("move_applied", "move_engine", correlation_id, diagram_id=d.name,
                                   genus=d.genus, n=d.n, details=step.model_dump(mode="json")))

    def log_destabilization(self, before: MultisectionDiagram, after: MultisectionDiagram,
                            correlation_id: Optional[str] = None) -> None:
        self.log_event(self._entry("destabilization_performed", "move_engine", correlation_id,
                                   diagram_id=after.name, genus=after.genus, n=after.n,
                                   details={"genus_before": before.genus}))

    def get_logs_for_diagram(self, diagram_id: str) -> List[AuditLogEntry]:
        return self.store.get_by_diagram(diagram_id)

    def get_summary(self) -> AuditSummary:
        """Counts over the whole trail plus the time span it covers."""
        logs = self.store.get_all_logs()
        stamps = [log.timestamp for log in logs]
        span = {"earliest": min(stamps).isoformat(), "latest": max(stamps).isoformat()} if stamps else {}
        return AuditSummary(
            total_events=len(logs),
            events_by_type=dict(Counter(log.event_type for log in logs)),
            events_by_severity=dict(Counter(log.severity for log in logs if log.severity)),
            events_by_decision=dict(Counter(log.decision for log in logs if log.decision)),
            date_range=span,
        )
