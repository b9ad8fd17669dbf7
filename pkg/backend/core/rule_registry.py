"""
Rule Registry & Concrete Rule Implementations

Provides the pluggable rule architecture:
  • ValidationRule: abstract base class every rule inherits
  • RuleRegistry  : central store for rule lookup
  • 8 diagram rules (DGM-*) covering the map, the curves and the cut systems
  • 8 scheme rules (SCH-*) covering the circular scheme tables
  • build_default_registry(): factory that returns a fully-loaded registry
"""
from abc import ABC, abstractmethod
from itertools import combinations
from typing import List, Optional, Type

import networkx as nx
from pydantic import BaseModel

from backend.core.curves import are_disjoint, crossing_vertices, simplicity_problem
from backend.core.cutting import are_parallel, cut_system_verdict
from backend.core.diagram_models import DiagramContext, RuleViolation, SchemeContext
from backend.core.errors import MultisectionError


# ---------------------------------------------------------------------------
# Abstract base
# ---------------------------------------------------------------------------

class ValidationRule(ABC):
    rule_id: str
    rule_name: str
    category: str           # "map" | "curves" | "cut" | "scheme"
    severity: str           # "critical" | "high" | "medium" | "low"
    context_type: Type[BaseModel]

    def applies_to(self, ctx: BaseModel) -> bool:
        return isinstance(ctx, self.context_type)

    def violation(self, message: str, expected=None, actual=None, family: Optional[int] = None) -> RuleViolation:
        return RuleViolation(
            rule_id=self.rule_id,
            rule_name=self.rule_name,
            severity=self.severity,
            message=message,
            expected_value=None if expected is None else str(expected),
            actual_value=None if actual is None else str(actual),
            family=family,
        )

    @abstractmethod
    def evaluate(self, ctx) -> Optional[RuleViolation]:
        """Return a RuleViolation if the rule fails, or None if it passes."""
        ...


class DiagramRule(ValidationRule):
    context_type = DiagramContext


class SchemeRule(ValidationRule):
    context_type = SchemeContext
    category = "scheme"


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

class RuleRegistry:
    def __init__(self):
        self._rules: dict[str, ValidationRule] = {}

    def register(self, rule: ValidationRule):
        self._rules[rule.rule_id] = rule

    def get_all(self) -> List[ValidationRule]:
        return list(self._rules.values())

    def get_by_category(self, category: str) -> List[ValidationRule]:
        return [r for r in self._rules.values() if r.category == category]

    def get(self, rule_id: str) -> Optional[ValidationRule]:
        return self._rules.get(rule_id)


# ═══════════════════════════════════════════════════════════════════════════
# Rule Set 1 - Diagrams
# ═══════════════════════════════════════════════════════════════════════════

class DGM001_ConnectedClosed(DiagramRule):
    rule_id = "DGM-001"
    rule_name = "Connected Closed Surface"
    category = "map"
    severity = "critical"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        cmap = ctx.diagram.map
        if cmap.components != 1:
            return self.violation(f"central surface has {cmap.components} components", 1, cmap.components)
        if cmap.euler % 2 != 0:
            return self.violation(f"odd Euler characteristic {cmap.euler}", "even", cmap.euler)
        return None


class DGM002_FamilyCount(DiagramRule):
    rule_id = "DGM-002"
    rule_name = "Family Count"
    category = "map"
    severity = "critical"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        n = ctx.diagram.n
        if n < 2:
            return self.violation(f"a multisection needs at least 2 pieces, got {n}", ">=2", n)
        if ctx.expected_n is not None and n != ctx.expected_n:
            return self.violation(f"expected {ctx.expected_n} families, got {n}", ctx.expected_n, n)
        return None


class DGM003_FamilySize(DiagramRule):
    rule_id = "DGM-003"
    rule_name = "Family Size Equals Genus"
    category = "curves"
    severity = "critical"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        d = ctx.diagram
        for i, family in enumerate(d.families, start=1):
            if len(family) != d.genus:
                return self.violation(f"family {i} has {len(family)} curves on a genus-{d.genus} surface",
                                      d.genus, len(family), family=i)
        return None


class DGM004_SimpleCurves(DiagramRule):
    rule_id = "DGM-004"
    rule_name = "Simple Closed Curves"
    category = "curves"
    severity = "critical"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        d = ctx.diagram
        for i, family in enumerate(d.families, start=1):
            for j, c in enumerate(family):
                problem = simplicity_problem(d.map, c)
                if problem:
                    return self.violation(f"family {i} curve {j}: {problem}", "simple", "not simple", family=i)
        return None


class DGM005_FamilyDisjoint(DiagramRule):
    rule_id = "DGM-005"
    rule_name = "Family Curves Disjoint"
    category = "curves"
    severity = "high"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        d = ctx.diagram
        for i, family in enumerate(d.families, start=1):
            for a, b in combinations(range(len(family)), 2):
                if not are_disjoint(d.map, family[a], family[b]):
                    return self.violation(f"family {i} curves {a} and {b} meet", "disjoint", "meeting", family=i)
        return None


class DGM006_CrossTransverse(DiagramRule):
    rule_id = "DGM-006"
    rule_name = "Families Cross Transversally"
    category = "curves"
    severity = "high"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        d = ctx.diagram
        for i, j in combinations(range(1, d.n + 1), 2):
            for c1 in d.family(i):
                for c2 in d.family(j):
                    try:
                        crossing_vertices(d.map, c1, c2)
                    except MultisectionError as exc:
                        return self.violation(f"families {i} and {j}: {exc.message}", "transverse", "tangent", family=i)
        return None


class DGM007_CutSystem(DiagramRule):
    rule_id = "DGM-007"
    rule_name = "Cut System"
    category = "cut"
    severity = "critical"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        d = ctx.diagram
        for i, family in enumerate(d.families, start=1):
            verdict = cut_system_verdict(d.map, family)
            if not verdict.ok:
                return self.violation(f"family {i} is not a cut system: {verdict.reason}",
                                      "one 2g-holed sphere", verdict.reason, family=i)
        return None


class DGM008_NoParallelPair(DiagramRule):
    """Only families failing the cut test are inspected: a cut system never holds a parallel pair."""
    rule_id = "DGM-008"
    rule_name = "No Parallel Pair"
    category = "cut"
    severity = "medium"

    def evaluate(self, ctx: DiagramContext) -> Optional[RuleViolation]:
        d = ctx.diagram
        for i, family in enumerate(d.families, start=1):
            if cut_system_verdict(d.map, family).ok:
                continue
            for a, b in combinations(range(len(family)), 2):
                c1, c2 = family[a], family[b]
                if simplicity_problem(d.map, c1) or simplicity_problem(d.map, c2):
                    continue
                if are_disjoint(d.map, c1, c2) and are_parallel(d.map, c1, c2):
                    return self.violation(f"family {i} curves {a} and {b} are parallel",
                                          "no parallel pair", f"{a}~{b}", family=i)
        return None


# ═══════════════════════════════════════════════════════════════════════════
# Rule Set 2 - Schemes
# ═══════════════════════════════════════════════════════════════════════════

class SCH001_ColumnDistinct(SchemeRule):
    rule_id = "SCH-001"
    rule_name = "Column Labels Distinct"
    severity = "critical"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        s = ctx.scheme
        for c in range(s.N + 1):
            labels = s.drawn_labels(c)
            if any(not 1 <= x <= s.n for x in labels) or len(set(labels)) != len(labels):
                return self.violation(f"drawn column {c} labels {labels} are not distinct pieces", "distinct", labels)
        return None


class SCH002_WrapConsistency(SchemeRule):
    rule_id = "SCH-002"
    rule_name = "Wrap Consistency"
    severity = "critical"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        s = ctx.scheme
        if sorted(s.sigma) != list(range(1, s.rows + 1)):
            return self.violation(f"sigma {list(s.sigma)} is not a permutation of the rows", "permutation", list(s.sigma))
        for k in range(1, s.rows + 1):
            right = s.cells[k - 1][s.N]
            left = s.cells[s.sigma[k - 1] - 1][0]
            if right != left:
                return self.violation(f"row {k} leaves the wrap as W{right} but row {s.sigma[k - 1]} enters as W{left}",
                                      right, left)
        return None


class SCH003_EveryLabelMissing(SchemeRule):
    rule_id = "SCH-003"
    rule_name = "Every Piece Has A Tube"
    severity = "high"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        s = ctx.scheme
        missing = set(s.missing_sequence())
        for j in range(1, s.n + 1):
            if j not in missing:
                return self.violation(f"piece W{j} is never missing from a column", "missing somewhere", "never")
        return None


class SCH004_NoConstantRow(SchemeRule):
    rule_id = "SCH-004"
    rule_name = "No Constant Row"
    severity = "medium"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        for k, row in enumerate(ctx.scheme.cells, start=1):
            if len(set(row)) == 1:
                return self.violation(f"row {k} is W{row[0]} all the way around", ">1 label", 1)
        return None


class SCH005_RegionsConnected(SchemeRule):
    rule_id = "SCH-005"
    rule_name = "Piece Regions Connected"
    severity = "high"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        s = ctx.scheme
        N = s.N
        for j in range(1, s.n + 1):
            g = nx.Graph()
            for col in range(N):
                for k in range(1, s.rows + 1):
                    if s.label(k, col) == j:
                        g.add_node(("cell", k, col))
                if s.missing(col) == j:
                    g.add_node(("tube", col))
            for col in range(N):
                nxt = (col + 1) % N
                for k in range(1, s.rows + 1):
                    # crossing the wrap, row k continues as row sigma(k)
                    k_next = s.sigma[k - 1] if nxt == 0 else k
                    if s.label(k, col) == j and s.label(k_next, nxt) == j:
                        g.add_edge(("cell", k, col), ("cell", k_next, nxt))
                if s.missing(col) == j:
                    for side in ((col - 1) % N, nxt):
                        for k in range(1, s.rows + 1):
                            if s.label(k, side) == j:
                                g.add_edge(("tube", col), ("cell", k, side))
            if g.number_of_nodes() and not nx.is_connected(g):
                parts = nx.number_connected_components(g)
                return self.violation(f"piece W{j} splits into {parts} regions", 1, parts)
        return None


class SCH006_AdjacentMissingDistinct(SchemeRule):
    rule_id = "SCH-006"
    rule_name = "Adjacent Missing Labels Distinct"
    severity = "high"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        seq = ctx.scheme.missing_sequence()
        for col in range(len(seq)):
            if seq[col] is not None and seq[col] == seq[(col + 1) % len(seq)]:
                return self.violation(f"columns {col} and {(col + 1) % len(seq)} both miss W{seq[col]}",
                                      "distinct", seq[col])
        return None


class SCH007_PanelRowConstancy(SchemeRule):
    rule_id = "SCH-007"
    rule_name = "Transverse Panel Row Constancy"
    severity = "high"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        s = ctx.scheme
        for p in range(1, s.N + 1):
            left_missing, right_missing = s.drawn_missing(p - 1), s.drawn_missing(p)
            for j in range(1, s.n + 1):
                if j in (left_missing, right_missing):
                    continue
                left, right = s.row_with_label(p - 1, j), s.row_with_label(p, j)
                if left != right:
                    return self.violation(f"panel {p}: W{j} sits on row {left} before and row {right} after",
                                          left, right)
        return None


class SCH008_ColumnCount(SchemeRule):
    rule_id = "SCH-008"
    rule_name = "Column Count"
    severity = "medium"

    def evaluate(self, ctx: SchemeContext) -> Optional[RuleViolation]:
        s = ctx.scheme
        expected = len(s.cycles()) + s.rows
        if s.N != expected:
            return self.violation(f"scheme has {s.N} columns, sigma needs {expected}", expected, s.N)
        return None


# ═══════════════════════════════════════════════════════════════════════════
# Factory
# ═══════════════════════════════════════════════════════════════════════════

def build_default_registry() -> RuleRegistry:
    """Return a RuleRegistry pre-loaded with all 16 rules."""
    registry = RuleRegistry()
    for rule_cls in [
        DGM001_ConnectedClosed,
        DGM002_FamilyCount,
        DGM003_FamilySize,
        DGM004_SimpleCurves,
        DGM005_FamilyDisjoint,
        DGM006_CrossTransverse,
        DGM007_CutSystem,
        DGM008_NoParallelPair,
        SCH001_ColumnDistinct,
        SCH002_WrapConsistency,
        SCH003_EveryLabelMissing,
        SCH004_NoConstantRow,
        SCH005_RegionsConnected,
        SCH006_AdjacentMissingDistinct,
        SCH007_PanelRowConstancy,
        SCH008_ColumnCount,
    ]:
        registry.register(rule_cls())
    return registry
