"""
Multisection diagrams and the models the validation engine and move calculus
exchange.

Defines the Pydantic schemas used across the rule engine, the diagram
operations, the move engine and the CLI.
"""
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from backend.core.combinatorial_map import CombinatorialMap, sphere_map
from backend.core.curves import Curve


# ---------------------------------------------------------------------------
# Diagram
# ---------------------------------------------------------------------------

class MultisectionDiagram(BaseModel):
    """A central surface with one candidate cut system per piece (families 1..n)."""
    model_config = ConfigDict(frozen=True)

    map: CombinatorialMap
    families: Tuple[Tuple[Curve, ...], ...]
    name: str = ""
    provenance: str = ""
    panels: Optional[Tuple[int, ...]] = None      # dart -> panel index, -1 on tubes

    @property
    def n(self) -> int:
        return len(self.families)

    @property
    def genus(self) -> int:
        return self.map.genus

    def family(self, i: int) -> Tuple[Curve, ...]:
        """Family by 1-based index."""
        return self.families[i - 1]

    def all_curves(self) -> List[Curve]:
        return [c for family in self.families for c in family]

    def find_label(self, family: int, label: str) -> int:
        matches = [index for index, c in enumerate(self.family(family)) if c.label == label]
        if not matches:
            raise KeyError(f"family {family} has no curve labelled {label!r}")
        if len(matches) > 1:
            raise KeyError(f"label {label!r} names curves {matches} of family {family}")
        return matches[0]

    def replace_curve(self, family: int, index: int, curve: Curve) -> "MultisectionDiagram":
        fams = [list(f) for f in self.families]
        fams[family - 1][index] = curve.with_family(family)
        return self.model_copy(update={"families": tuple(tuple(f) for f in fams)})


def empty_diagram(n: int, name: str = "") -> MultisectionDiagram:
    """Genus-0 diagram: the sphere with n empty families."""
    return MultisectionDiagram(map=sphere_map(), families=tuple(() for _ in range(n)),
                               name=name or f"sphere-{n}", provenance="empty")


def tag_families(families: List[List[Curve]]) -> Tuple[Tuple[Curve, ...], ...]:
    return tuple(tuple(c.with_family(i + 1) for c in fam) for i, fam in enumerate(families))


# ---------------------------------------------------------------------------
# Moves
# ---------------------------------------------------------------------------

class CurveRef(BaseModel):
    """One curve: family index plus either its position or its role label."""
    model_config = ConfigDict(frozen=True)

    family: int
    index: Optional[int] = None
    label: Optional[str] = None

    def resolve(self, d: MultisectionDiagram) -> int:
        if self.label is not None:
            return d.find_label(self.family, self.label)
        if self.index is None or not 0 <= self.index < len(d.family(self.family)):
            raise KeyError(f"family {self.family} has no curve {self.index}")
        return self.index


class StabilizationWitness(BaseModel):
    model_config = ConfigDict(frozen=True)

    group_a: Tuple[CurveRef, ...]
    group_b: Tuple[CurveRef, ...]
    separating: Tuple[int, ...] = ()    # dart walk of the enclosing separating curve

    @property
    def k(self) -> int:
        return len(self.group_a)


class SlideStep(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: int
    curve: CurveRef
    over: CurveRef
    band: Optional[Tuple[int, ...]] = None   # dart path; None = shortest admissible band


class SlideScript(BaseModel):
    steps: List[SlideStep] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

class RuleViolation(BaseModel):
    """A single failed rule evaluation."""
    rule_id: str                            # e.g. "DGM-007"
    rule_name: str
    severity: str                           # "critical" | "high" | "medium" | "low"
    message: str
    expected_value: Optional[str] = None
    actual_value: Optional[str] = None
    family: Optional[int] = None


class DiagramContext(BaseModel):
    """Carrier bundling everything the diagram rules look at."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    diagram: MultisectionDiagram
    expected_n: Optional[int] = None


class FamilyVerdict(BaseModel):
    family: int
    size: int
    cut_system: bool
    reason: str = ""
    h1_rank: int = 0


class ValidationReport(BaseModel):
    """Outcome of validate_diagram."""
    name: str = ""
    valid: bool
    genus: int
    n: int
    families: List[FamilyVerdict] = Field(default_factory=list)
    transverse: bool = True
    rules_evaluated: int = 0
    violations: List[RuleViolation] = Field(default_factory=list)
    validated_at: datetime

    def failed_rules(self) -> List[str]:
        return sorted({v.rule_id for v in self.violations})


class InvariantSummary(BaseModel):
    name: str = ""
    genus: int
    n: int
    family_sizes: List[int]
    family_ranks: List[int]
    map: Dict[str, int]
    intersection_matrix: List[List[int]] = Field(default_factory=list)
    extra: Dict[str, Any] = Field(default_factory=dict)


# ---------------------------------------------------------------------------
# Schemes
# ---------------------------------------------------------------------------

def permutation_cycles(sigma: Sequence[int]) -> List[Tuple[int, ...]]:
    """Cycles of a 1-based permutation given as its image list, each led by its least element."""
    seen = set()
    cycles = []
    for start in range(1, len(sigma) + 1):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        k = sigma[start - 1]
        while k != start:
            cycle.append(k)
            seen.add(k)
            k = sigma[k - 1]
        cycles.append(tuple(cycle))
    return cycles


class Scheme(BaseModel):
    """Circular table of pieces over (fiber piece x interval) cells.

    ``cells[k-1]`` is row X_k drawn over N+1 columns: drawn column 0 is the
    left half of the wrap column, drawn columns 1..N-1 are C_0..C_{N-2} and
    drawn column N is the right half of the wrap column C_{N-1}. Panel p
    (1..N) sits between drawn columns p-1 and p.
    """
    model_config = ConfigDict(frozen=True)

    n: int
    sigma: Tuple[int, ...]                     # sigma[k-1] = image of row k
    cells: Tuple[Tuple[int, ...], ...]
    name: str = ""

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def N(self) -> int:
        return len(self.cells[0]) - 1 if self.cells else 0

    def drawn_labels(self, c: int) -> List[int]:
        return [row[c] for row in self.cells]

    def label(self, k: int, column: int) -> int:
        """Label of row k in column C_column (right half at the wrap)."""
        return self.cells[k - 1][column + 1]

    def drawn_missing(self, c: int) -> Optional[int]:
        absent = set(range(1, self.n + 1)) - set(self.drawn_labels(c))
        return absent.pop() if len(absent) == 1 else None

    def missing(self, column: int) -> Optional[int]:
        return self.drawn_missing(column + 1)

    def missing_sequence(self) -> List[Optional[int]]:
        return [self.missing(col) for col in range(self.N)]

    def row_with_label(self, c: int, label: int) -> Optional[int]:
        for k, row in enumerate(self.cells, start=1):
            if row[c] == label:
                return k
        return None

    def cycles(self) -> List[Tuple[int, ...]]:
        return permutation_cycles(self.sigma)

    def with_cell(self, k: int, c: int, label: int) -> "Scheme":
        cells = [list(row) for row in self.cells]
        cells[k - 1][c] = label
        return self.model_copy(update={"cells": tuple(tuple(r) for r in cells)})


class SchemeContext(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    scheme: Scheme


class SchemeReport(BaseModel):
    name: str = ""
    valid: bool
    n: int
    N: int
    missing: List[Optional[int]] = Field(default_factory=list)
    rules_evaluated: int = 0
    violations: List[RuleViolation] = Field(default_factory=list)

    def failed_rules(self) -> List[str]:
        return sorted({v.rule_id for v in self.violations})
