"""
Simplicial complex text format: a header, optional name, facet lines, end.

    complex 1
    name boundary-tetrahedron
    facet 0 1 2
    end

Serialization writes the maximal simplices in sorted order.
"""
from typing import List

from backend.core.errors import MalformedLine, VersionUnknown
from backend.data.models import SimplicialComplex
from backend.data.simplicial import complex_from_facets, maximal_simplices


def serialize_complex(k: SimplicialComplex) -> str:
    lines = ["complex 1"]
    if k.name:
        lines.append(f"name {k.name}")
    lines.extend("facet " + " ".join(map(str, s)) for s in maximal_simplices(k))
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> SimplicialComplex:
    rows = [(i, raw.split("#", 1)[0].strip()) for i, raw in enumerate(text.splitlines(), start=1)]
    rows = [(i, s) for i, s in rows if s]
    if not rows or rows[0][1].split()[0] != "complex":
        raise MalformedLine("document must start with 'complex <version>'", line=rows[0][0] if rows else 1)
    if rows[0][1].split()[1:] != ["1"]:
        raise VersionUnknown(f"unsupported complex version in {rows[0][1]!r}", line=rows[0][0])
    name = ""
    facets: List[List[int]] = []
    for line, content in rows[1:]:
        keyword, _, rest = content.partition(" ")
        if keyword == "name":
            name = rest.strip()
        elif keyword == "facet":
            try:
                vertices = [int(t) for t in rest.split()]
            except ValueError:
                raise MalformedLine(f"facet vertices must be integers: {rest!r}", line=line)
            if not vertices or len(set(vertices)) != len(vertices):
                raise MalformedLine("facet needs distinct vertices", line=line)
            facets.append(vertices)
        elif keyword == "end":
            return complex_from_facets(facets, name=name)
        else:
            raise MalformedLine(f"unknown keyword {keyword!r}", line=line)
    raise MalformedLine("document is truncated: missing 'end'", line=rows[-1][0] + 1)


def read_complex(path: str) -> SimplicialComplex:
    with open(path, "r", encoding="utf-8") as f:
        return parse_complex(f.read())
