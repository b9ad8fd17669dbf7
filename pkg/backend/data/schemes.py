"""
Scheme tables for multisections of bundles over the circle.

A scheme has one row per fiber piece and N columns around the circle; each
column omits one piece, which receives that column's tube. Generators build
the tables block by block from the cycles of the monodromy permutation.
"""
import re
from typing import List, Optional, Sequence, Tuple

from backend.core.diagram_models import Scheme, SchemeContext, SchemeReport, permutation_cycles
from backend.core.errors import InvalidPartition
from backend.core.rule_evaluator import RuleEvaluator
from backend.core.rule_registry import build_default_registry


def parse_sigma(text: str, rows: Optional[int] = None) -> Tuple[int, ...]:
    """Cycle notation such as ``(123)``, ``(1 2)(3 4 5)`` or ``id``; returns 1-based images."""
    text = text.strip()
    cycles: List[List[int]] = []
    if text not in ("", "id", "()"):
        groups = re.findall(r"\(([^()]*)\)", text)
        if not groups or re.sub(r"\([^()]*\)", "", text).strip():
            raise InvalidPartition(f"cannot read permutation {text!r}")
        for group in groups:
            tokens = re.split(r"[\s,]+", group.strip()) if re.search(r"[\s,]", group.strip()) else list(group)
            cycles.append([int(t) for t in tokens if t])
    flat = [x for cycle in cycles for x in cycle]
    size = max([rows or 0] + flat)
    if len(flat) != len(set(flat)) or any(x < 1 for x in flat):
        raise InvalidPartition(f"cycles {text!r} repeat or use non-positive entries")
    sigma = list(range(1, size + 1))
    for cycle in cycles:
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            sigma[a - 1] = b
    return tuple(sigma)


def format_sigma(sigma: Sequence[int]) -> str:
    cycles = [c for c in permutation_cycles(sigma) if len(c) > 1]
    if not cycles:
        return "id"
    sep = " " if len(sigma) > 9 else ""
    return "".join("(" + sep.join(str(x) for x in c) + ")" for c in cycles)


def scheme_N(sigma: Sequence[int], n: int) -> int:
    """Number of columns: cycles of sigma (fixed points included) plus the n-1 rows."""
    if sorted(sigma) != list(range(1, n)):
        raise InvalidPartition(f"sigma must permute 1..{n - 1}, got {list(sigma)}")
    return len(permutation_cycles(sigma)) + (n - 1)


def _check_partition(cycles: Sequence[Sequence[int]]) -> int:
    flat = sorted(x for c in cycles for x in c)
    if not flat or flat != list(range(1, len(flat) + 1)):
        raise InvalidPartition(f"cycles {list(map(list, cycles))} do not partition 1..{len(flat)}")
    return len(flat)


def scheme_stack(cycles: Sequence[Sequence[int]], name: str = "") -> Scheme:
    """
    One block of m+1 columns per m-cycle, blocks ordered by decreasing least
    element. Inside the block of (a_1 .. a_m), row a_1 passes through the
    tube piece W_n and rows a_2..a_m step down one column at a time.
    """
    rows = _check_partition(cycles)
    n = rows + 1
    normalized = []
    for c in cycles:
        c = list(c)
        i = c.index(min(c))
        normalized.append(c[i:] + c[:i])
    normalized.sort(key=lambda c: -c[0])

    width = sum(len(c) + 1 for c in normalized) + 1
    cells = [[0] * width for _ in range(rows)]
    sigma = [0] * rows
    t0 = 0
    for cycle in normalized:
        m = len(cycle)
        for j, a in enumerate(cycle, start=1):
            sigma[a - 1] = cycle[j % m]
            row = cells[a - 1]
            for col in range(width):
                if j == 1:
                    if col <= t0:
                        row[col] = cycle[m - 1]
                    elif col <= t0 + m:
                        row[col] = n
                    else:
                        row[col] = a
                else:
                    row[col] = cycle[j - 2] if col <= t0 + m + 1 - j else a
        t0 += m + 1
    return Scheme(n=n, sigma=tuple(sigma), cells=tuple(tuple(r) for r in cells),
                  name=name or f"stack{format_sigma(sigma)}")


def scheme_single_cycle(m: int) -> Scheme:
    """The scheme of a monodromy cycling m fiber pieces."""
    if m < 1:
        raise InvalidPartition("a cycle needs at least one element")
    return scheme_stack([list(range(1, m + 1))], name=f"cycle-{m}")


def scheme_zigzag(n: int) -> Scheme:
    """
    Identity-monodromy layout with missing labels 2..n..1 around the circle:
    row k carries W_k on drawn columns k..N-k and W_{k+1} elsewhere.
    """
    if n < 3:
        raise InvalidPartition("zigzag schemes need n >= 3")
    rows = n - 1
    width = 2 * rows + 1
    N = width - 1
    cells = []
    for k in range(1, rows + 1):
        cells.append(tuple(k if k <= c <= N - k else k + 1 for c in range(width)))
    return Scheme(n=n, sigma=tuple(range(1, rows + 1)), cells=tuple(cells), name=f"zigzag-{n}")


def scheme_for_sigma(sigma: Sequence[int], layout: str = "stack") -> Scheme:
    """Scheme for a monodromy permutation; ``layout="zigzag"`` is available for the identity."""
    rows = len(sigma)
    if sorted(sigma) != list(range(1, rows + 1)):
        raise InvalidPartition(f"{list(sigma)} is not a permutation")
    if layout == "zigzag":
        if any(s != i for i, s in enumerate(sigma, start=1)):
            raise InvalidPartition("the zigzag layout only exists for the identity")
        return scheme_zigzag(rows + 1)
    if layout != "stack":
        raise InvalidPartition(f"unknown scheme layout {layout!r}")
    return scheme_stack(permutation_cycles(sigma))


def scheme_validate(s: Scheme) -> SchemeReport:
    evaluator = RuleEvaluator(build_default_registry())
    violations = evaluator.evaluate_all(SchemeContext(scheme=s))
    return SchemeReport(name=s.name, valid=not violations, n=s.n, N=s.N,
                        missing=s.missing_sequence(), rules_evaluated=evaluator.rules_evaluated,
                        violations=violations)


def transverse_panels(s: Scheme, j: int) -> List[int]:
    """Panels (1..N) whose two flanking drawn columns both keep piece j."""
    return [p for p in range(1, s.N + 1) if s.drawn_missing(p - 1) != j and s.drawn_missing(p) != j]


def span_columns(s: Scheme, j: int) -> List[int]:
    return [col for col in range(s.N) if s.missing(col) == j]
