from datetime import datetime
from typing import Literal, Optional, Dict, Any
from pydantic import BaseModel, ConfigDict, Field


class AuditSummary(BaseModel):
    """Aggregate statistical summary of audit logs."""
    total_events: int
    events_by_type: Dict[str, int]
    events_by_severity: Dict[str, int]
    events_by_decision: Dict[str, int]
    date_range: Dict[str, str]


class AuditLogEntry(BaseModel):
    """One audit event: a command, a generated diagram, a validation or a move."""
    model_config = ConfigDict(extra="ignore")

    log_id: str
    timestamp: datetime
    event_type: Literal[
        "command_started",
        "command_completed",
        "command_failed",
        "diagram_generated",
        "diagram_validated",
        "rule_violation",
        "move_applied",
        "destabilization_performed",
        "scheme_validated",
    ]
    diagram_id: Optional[str] = None
    rule_id: Optional[str] = None
    rule_name: Optional[str] = None
    severity: Optional[str] = None
    genus: Optional[int] = None
    n: Optional[int] = None
    decision: Optional[Literal["pass", "fail"]] = None
    details: Dict[str, Any] = Field(default_factory=dict)
    source: str
    correlation_id: Optional[str] = None
