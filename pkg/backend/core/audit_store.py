import json
import os
from collections import defaultdict
from datetime import date, datetime
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from backend.core.audit_models import AuditLogEntry

LOG_PREFIX = "audit_logs_"


class AuditStore:
    """
    Append-only JSONL files, one per UTC day, mirrored in memory with lookups
    by diagram name and by correlation id (one CLI run).
    """

    def __init__(self, log_dir: str = "logs"):
        self.log_dir = log_dir
        os.makedirs(self.log_dir, exist_ok=True)
        self._reset()
        for entry in self._read_files():
            self._index_log(entry)

    def _reset(self) -> None:
        self._all_logs: List[AuditLogEntry] = []
        self._by_diagram: Dict[str, List[AuditLogEntry]] = defaultdict(list)
        self._by_corr: Dict[str, List[AuditLogEntry]] = defaultdict(list)

    def _day_file(self, day: date) -> str:
        return os.path.join(self.log_dir, f"{LOG_PREFIX}{day.isoformat()}.json")

    def _read_files(self) -> Iterator[AuditLogEntry]:
        names = sorted(n for n in os.listdir(self.log_dir) if n.startswith(LOG_PREFIX) and n.endswith(".json"))
        for name in names:
            with open(os.path.join(self.log_dir, name), "r", encoding="utf-8") as f:
                for raw in f:
                    if raw.strip():
                        yield AuditLogEntry.model_validate(json.loads(raw))

    def _index_log(self, entry: AuditLogEntry) -> None:
        self._all_logs.append(entry)
        if entry.diagram_id:
            self._by_diagram[entry.diagram_id].append(entry)
        if entry.correlation_id:
            self._by_corr[entry.correlation_id].append(entry)

    def save_log(self, entry: AuditLogEntry) -> None:
        self._index_log(entry)
        with open(self._day_file(entry.timestamp.date()), "a", encoding="utf-8") as f:
            f.write(entry.model_dump_json() + "\n")

    def get_by_diagram(self, diagram_id: str) -> List[AuditLogEntry]:
        return list(self._by_diagram.get(diagram_id, []))

    def get_by_correlation(self, correlation_id: str) -> List[AuditLogEntry]:
        return list(self._by_corr.get(correlation_id, []))

    def get_all_logs(self) -> List[AuditLogEntry]:
        return self._all_logs

    def query_logs(self,
                   event_type: Optional[str] = None,
                   decision: Optional[str] = None,
                   diagram_id: Optional[str] = None,
                   date_from: Optional[datetime] = None,
                   date_to: Optional[datetime] = None,
                   source: Optional[str] = None,
                   genus: Optional[int] = None,
                   n: Optional[int] = None,
                   page: int = 1,
                   page_size: int = 50) -> Tuple[List[AuditLogEntry], int]:
        """Newest first; returns one page and the total number of matches."""
        checks: List[Callable[[AuditLogEntry], bool]] = []
        for field, wanted in (("event_type", event_type), ("decision", decision), ("diagram_id", diagram_id),
                              ("source", source), ("genus", genus), ("n", n)):
            if wanted is not None:
                checks.append(lambda e, f=field, w=wanted: getattr(e, f) == w)
        if date_from is not None:
            checks.append(lambda e: e.timestamp >= date_from)
        if date_to is not None:
            checks.append(lambda e: e.timestamp <= date_to)

        pool = self.get_by_diagram(diagram_id) if diagram_id is not None else self._all_logs
        hits = sorted((e for e in pool if all(check(e) for check in checks)),
                      key=lambda e: e.timestamp, reverse=True)
        start = (page - 1) * page_size
        return hits[start:start + page_size], len(hits)


class NullAuditStore(AuditStore):
    """In-memory only; used when the audit trail is switched off."""

    def __init__(self):
        self.log_dir = ""
        self._reset()

    def save_log(self, entry: AuditLogEntry) -> None:
        self._index_log(entry)
