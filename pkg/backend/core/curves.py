"""
Closed curves carried by the edges of a combinatorial map.

A curve is a cyclic dart walk. Curves of one family never touch; curves of
different families may share a vertex only as a transverse crossing, i.e.
the four strands alternate in the rotation around that vertex.
"""
from collections import Counter
from typing import Dict, List, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict

from backend.core.combinatorial_map import CombinatorialMap
from backend.core.errors import InvalidCurve, NotTransverse


class Curve(BaseModel):
    model_config = ConfigDict(frozen=True)

    darts: Tuple[int, ...]
    family: Optional[int] = None
    label: Optional[str] = None

    def __len__(self) -> int:
        return len(self.darts)

    def relabel(self, remap: Dict[int, int]) -> "Curve":
        return Curve(darts=tuple(remap[d] for d in self.darts), family=self.family, label=self.label)

    def with_family(self, family: Optional[int]) -> "Curve":
        return Curve(darts=self.darts, family=family, label=self.label)


def edge_set(cmap: CombinatorialMap, curve: Curve) -> Set[int]:
    return {cmap.edge_key(d) for d in curve.darts}


def vertex_set(cmap: CombinatorialMap, curve: Curve) -> Set[int]:
    return {cmap.tail(d) for d in curve.darts}


def check_closed_walk(cmap: CombinatorialMap, curve: Curve) -> None:
    if not curve.darts:
        raise InvalidCurve("curve has no darts")
    for i, d in enumerate(curve.darts):
        if d < 0 or d >= cmap.dart_count:
            raise InvalidCurve(f"dart {d} is not in the map")
        nxt = curve.darts[(i + 1) % len(curve.darts)]
        if cmap.head(d) != cmap.tail(nxt):
            raise InvalidCurve(f"darts {d} and {nxt} are not consecutive")


def simplicity_problem(cmap: CombinatorialMap, curve: Curve) -> Optional[str]:
    """None when the curve is a simple closed walk, otherwise a reason.

    Curves are kept in normal form: a walk passes through each vertex at most
    once. A self-touching vertex is rejected even where it could be read as a
    transverse crossing with another curve; such a vertex has to be split
    into one vertex per strand first.
    """
    try:
        check_closed_walk(cmap, curve)
    except InvalidCurve as exc:
        return exc.message
    if len(edge_set(cmap, curve)) != len(curve.darts):
        return "curve traverses an edge twice"
    if len(vertex_set(cmap, curve)) != len(curve.darts):
        v = next(v for v, count in Counter(cmap.tail(d) for d in curve.darts).items() if count > 1)
        return (f"curve visits vertex {v} twice; diagrams keep curves in normal form "
                f"(one visit per vertex), so a shared crossing vertex must be split per strand")
    return None


def is_simple(cmap: CombinatorialMap, curve: Curve) -> bool:
    return simplicity_problem(cmap, curve) is None


def _strands_at(cmap: CombinatorialMap, curve: Curve) -> Dict[int, Tuple[int, int]]:
    """vertex -> (outgoing dart, reversed incoming dart) of the curve there."""
    strands = {}
    size = len(curve.darts)
    for i, d in enumerate(curve.darts):
        prev = curve.darts[i - 1] if size > 1 else d
        strands[cmap.tail(d)] = (d, cmap.alpha[prev])
    return strands


def are_disjoint(cmap: CombinatorialMap, c1: Curve, c2: Curve) -> bool:
    return not (vertex_set(cmap, c1) & vertex_set(cmap, c2))


def crossing_vertices(cmap: CombinatorialMap, c1: Curve, c2: Curve) -> List[int]:
    """Shared vertices of two curves, after checking they cross transversally."""
    if edge_set(cmap, c1) & edge_set(cmap, c2):
        raise NotTransverse("curves share an edge")
    s1, s2 = _strands_at(cmap, c1), _strands_at(cmap, c2)
    shared = sorted(set(s1) & set(s2))
    for v in shared:
        mine, theirs = set(s1[v]), set(s2[v])
        start = s1[v][0]
        order = []
        d = start
        while True:
            if d in mine:
                order.append(1)
            elif d in theirs:
                order.append(2)
            d = cmap.rot[d]
            if d == start:
                break
        if order != [1, 2, 1, 2]:
            raise NotTransverse(f"curves touch without crossing at vertex {v}")
    return shared


def intersection_count(cmap: CombinatorialMap, c1: Curve, c2: Curve) -> int:
    """Crossings of the two given representatives; no minimisation."""
    return len(crossing_vertices(cmap, c1, c2))


def face_boundary_curve(cmap: CombinatorialMap, d: int, family: Optional[int] = None) -> Curve:
    walk = [d]
    e = cmap.phi[d]
    while e != d:
        walk.append(e)
        e = cmap.phi[e]
    return Curve(darts=tuple(walk), family=family)


def curve_edges_of(cmap: CombinatorialMap, curves: Sequence[Curve]) -> Set[int]:
    keys: Set[int] = set()
    for c in curves:
        keys |= edge_set(cmap, c)
    return keys


def curve_free_faces(cmap: CombinatorialMap, curves: Sequence[Curve]) -> List[int]:
    """Indices of faces whose boundary contains no curve edge."""
    used = curve_edges_of(cmap, curves)
    free = []
    for i, face in enumerate(cmap.faces):
        if not any(cmap.edge_key(d) in used for d in face):
            free.append(i)
    return free
