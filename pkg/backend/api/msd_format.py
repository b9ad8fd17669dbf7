"""
``msd 1`` text format for multisection diagrams.

    msd 1
    name cp2
    provenance cp2_trisection()
    darts 54
    alpha 0 9
    rot 0 1 2 3 4 5
    panels 1 1 2 ...
    family 1
    curve 0 6 12
    label meridian:C0
    end

Serialization is canonical: darts are renumbered breadth-first from the
canonical start dart, alpha lines by least dart, rotation cycles led by
their least dart, families ascending and curves by least dart. ``label``
attaches to the curve line just above it.
"""
import re
from typing import Dict, List, Optional, Tuple

from backend.core.combinatorial_map import build_map
from backend.core.curves import Curve, check_closed_walk
from backend.core.diagram_models import MultisectionDiagram
from backend.core.errors import InvalidCurve, MalformedLine, MultisectionError, ValidationFailed, VersionUnknown
from backend.core.isomorphism import canonical_relabelling

VERSION = "1"

# "#" opens a comment at line start or after whitespace
COMMENT = re.compile(r"(?:^|\s)#.*$")


def _rotated(darts: Tuple[int, ...]) -> Tuple[int, ...]:
    i = darts.index(min(darts))
    return darts[i:] + darts[:i]


def serialize(d: MultisectionDiagram) -> str:
    cmap = d.map
    labels = canonical_relabelling(cmap, d.families)
    size = cmap.dart_count
    alpha = [0] * size
    rot = [0] * size
    for old, new in labels.items():
        alpha[new] = labels[cmap.alpha[old]]
        rot[new] = labels[cmap.rot[old]]

    lines = [f"msd {VERSION}"]
    if d.name:
        lines.append(f"name {d.name}")
    if d.provenance:
        lines.append(f"provenance {d.provenance}")
    lines.append(f"darts {size}")
    lines.extend(f"alpha {a} {alpha[a]}" for a in range(size) if a < alpha[a])
    seen = set()
    for start in range(size):
        if start in seen:
            continue
        cycle = [start]
        e = rot[start]
        while e != start:
            cycle.append(e)
            e = rot[e]
        seen.update(cycle)
        lines.append("rot " + " ".join(map(str, cycle)))
    if d.panels is not None:
        panels = [0] * size
        for old, new in labels.items():
            panels[new] = d.panels[old]
        lines.append("panels " + " ".join(map(str, panels)))
    for i, family in enumerate(d.families, start=1):
        lines.append(f"family {i}")
        curves = sorted(((_rotated(tuple(labels[x] for x in c.darts)), c.label) for c in family),
                        key=lambda item: min(item[0]))
        for darts, label in curves:
            lines.append("curve " + " ".join(map(str, darts)))
            if label:
                lines.append(f"label {label}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _ints(tokens: List[str], line: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise MalformedLine(f"expected integers, got {' '.join(tokens)!r}", line=line)


def parse(text: str) -> MultisectionDiagram:
    rows = [(i, COMMENT.sub("", raw).strip()) for i, raw in enumerate(text.splitlines(), start=1)]
    rows = [(i, s) for i, s in rows if s]
    if not rows:
        raise MalformedLine("empty document", line=1)
    first_line, first = rows[0]
    head = first.split()
    if head[0] != "msd" or len(head) != 2:
        raise MalformedLine("document must start with 'msd <version>'", line=first_line)
    if head[1] != VERSION:
        raise VersionUnknown(f"unsupported msd version {head[1]!r}", line=first_line)

    meta: Dict[str, str] = {}
    size: Optional[int] = None
    alpha: List[int] = []
    rot: List[int] = []
    panels: Optional[Tuple[int, ...]] = None
    families: List[List[Curve]] = []
    curve_lines: List[Tuple[int, int, int]] = []      # (family, index, line)
    cmap = None
    ended = False
    last_line = first_line
    previous = ""

    for line, content in rows[1:]:
        last_line = line
        if ended:
            raise MalformedLine("content after 'end'", line=line)
        keyword, _, rest = content.partition(" ")
        tokens = rest.split()
        if keyword in ("name", "provenance"):
            meta[keyword] = rest.strip()
        elif keyword == "darts":
            values = _ints(tokens, line)
            if size is not None or len(values) != 1 or values[0] < 2:
                raise MalformedLine("'darts' needs one count >= 2, given once", line=line)
            size = values[0]
            alpha, rot = [-1] * size, [-1] * size
        elif keyword in ("alpha", "rot", "panels"):
            if size is None or families:
                raise MalformedLine(f"'{keyword}' must follow 'darts' and precede families", line=line)
            values = _ints(tokens, line)
            if any(not 0 <= v < size for v in values) and keyword != "panels":
                raise MalformedLine(f"dart out of range 0..{size - 1}", line=line)
            if keyword == "alpha":
                if len(values) != 2:
                    raise MalformedLine("'alpha' takes exactly two darts", line=line)
                a, b = values
                if alpha[a] != -1 or alpha[b] != -1:
                    raise ValidationFailed(f"dart {a} or {b} already paired", line=line)
                alpha[a], alpha[b] = b, a
            elif keyword == "rot":
                for k, x in enumerate(values):
                    if rot[x] != -1:
                        raise ValidationFailed(f"dart {x} appears in two rotation cycles", line=line)
                    rot[x] = values[(k + 1) % len(values)]
            else:
                if len(values) != size:
                    raise MalformedLine(f"'panels' needs {size} entries", line=line)
                panels = tuple(values)
        elif keyword == "family":
            values = _ints(tokens, line)
            if len(values) != 1 or values[0] != len(families) + 1:
                raise MalformedLine(f"expected 'family {len(families) + 1}'", line=line)
            if cmap is None:
                cmap = _build(size, alpha, rot, line)
            families.append([])
        elif keyword == "curve":
            if not families:
                raise MalformedLine("'curve' outside a family block", line=line)
            darts = tuple(_ints(tokens, line))
            if not darts or any(not 0 <= x < size for x in darts):
                raise MalformedLine("curve darts missing or out of range", line=line)
            families[-1].append(Curve(darts=darts, family=len(families)))
            curve_lines.append((len(families), len(families[-1]) - 1, line))
        elif keyword == "label":
            if previous != "curve":
                raise MalformedLine("'label' must follow a curve", line=line)
            fam, idx, _ = curve_lines[-1]
            c = families[fam - 1][idx]
            families[fam - 1][idx] = Curve(darts=c.darts, family=c.family, label=rest.strip())
        elif keyword == "end":
            ended = True
        else:
            raise MalformedLine(f"unknown keyword {keyword!r}", line=line)
        previous = keyword

    if not ended:
        raise MalformedLine("document is truncated: missing 'end'", line=last_line + 1)
    if cmap is None:
        cmap = _build(size, alpha, rot, last_line)
    for fam, idx, line in curve_lines:
        try:
            check_closed_walk(cmap, families[fam - 1][idx])
        except InvalidCurve as exc:
            raise ValidationFailed(exc.message, line=line)
    return MultisectionDiagram(map=cmap, families=tuple(tuple(f) for f in families),
                               name=meta.get("name", ""), provenance=meta.get("provenance", ""),
                               panels=panels)


def _build(size: Optional[int], alpha: List[int], rot: List[int], line: int):
    if size is None:
        raise MalformedLine("missing 'darts' line", line=line)
    if -1 in alpha or -1 in rot:
        raise ValidationFailed("alpha pairs and rotation cycles must cover every dart", line=line)
    try:
        return build_map(alpha, rot)
    except MultisectionError as exc:
        raise ValidationFailed(exc.message, line=line)


def read_diagram(path: str) -> MultisectionDiagram:
    with open(path, "r", encoding="utf-8") as f:
        return parse(f.read())


def write_diagram(d: MultisectionDiagram, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize(d))
