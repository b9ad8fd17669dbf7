"""
Isomorphism of maps and diagrams by canonical relabelling.

From a starting dart, a breadth-first walk that always looks at ``alpha``
then ``rot`` assigns new labels; for a connected map the relabelled
permutations determine the map up to isomorphism. The canonical form is the
least relabelling over an invariant class of starting darts. Curves are
compared as edge sets, so curve direction and starting dart do not matter.
"""
from collections import deque
from typing import Dict, List, Optional, Sequence, Tuple

from backend.core.combinatorial_map import CombinatorialMap
from backend.core.curves import Curve

FamilyKey = Tuple[Tuple[Tuple[int, ...], ...], ...]


def relabel_from(cmap: CombinatorialMap, start: int) -> Dict[int, int]:
    labels = {start: 0}
    queue = deque([start])
    while queue:
        d = queue.popleft()
        for e in (cmap.alpha[d], cmap.rot[d]):
            if e not in labels:
                labels[e] = len(labels)
                queue.append(e)
    return labels


def _dart_signature(cmap: CombinatorialMap, d: int, on_curve: set) -> Tuple[int, int, int]:
    return (
        len(cmap.vertices[cmap.vertex_of[d]]),
        len(cmap.faces[cmap.face_of[d]]),
        0 if cmap.edge_key(d) in on_curve else 1,
    )


def _family_key(cmap: CombinatorialMap, families: Sequence[Sequence[Curve]], labels: Dict[int, int],
                unordered: bool) -> FamilyKey:
    keyed = []
    for family in families:
        curves = []
        for c in family:
            edges = sorted(tuple(sorted((labels[d], labels[cmap.alpha[d]]))) for d in c.darts)
            curves.append(tuple(x for pair in edges for x in pair))
        keyed.append(tuple(sorted(curves)))
    if unordered:
        keyed.sort()
    return tuple(keyed)


def _best(cmap: CombinatorialMap, families: Sequence[Sequence[Curve]],
          unordered_families: bool) -> Tuple[Tuple, Dict[int, int]]:
    if cmap.components != 1:
        raise ValueError("canonical forms are defined for connected maps")
    on_curve = {cmap.edge_key(d) for family in families for c in family for d in c.darts}
    signatures = {d: _dart_signature(cmap, d, on_curve) for d in cmap.darts}
    best_sig = min(signatures.values())
    best: Optional[Tuple] = None
    best_labels: Dict[int, int] = {}
    for start in cmap.darts:
        if signatures[start] != best_sig:
            continue
        labels = relabel_from(cmap, start)
        size = len(labels)
        alpha = [0] * size
        rot = [0] * size
        for d, nd in labels.items():
            alpha[nd] = labels[cmap.alpha[d]]
            rot[nd] = labels[cmap.rot[d]]
        form = (tuple(alpha), tuple(rot), _family_key(cmap, families, labels, unordered_families))
        if best is None or form < best:
            best, best_labels = form, labels
    return best, best_labels


def canonical_form(cmap: CombinatorialMap, families: Sequence[Sequence[Curve]] = (),
                   unordered_families: bool = False) -> Tuple:
    """Least relabelled description over the invariant start class."""
    return _best(cmap, families, unordered_families)[0]


def canonical_relabelling(cmap: CombinatorialMap, families: Sequence[Sequence[Curve]] = ()) -> Dict[int, int]:
    """Breadth-first renumbering from the canonical start dart; independent of the input numbering."""
    return _best(cmap, families, False)[1]


def maps_isomorphic(m1: CombinatorialMap, m2: CombinatorialMap) -> bool:
    if m1.summary() != m2.summary():
        return False
    return canonical_form(m1) == canonical_form(m2)


def find_isomorphism(source: CombinatorialMap, target: CombinatorialMap,
                     seed: Optional[Tuple[int, int]] = None) -> Optional[Dict[int, int]]:
    """A dart bijection commuting with alpha and rot, optionally forced to send seed[0] to seed[1]."""
    if source.summary() != target.summary():
        return None
    starts = [seed[1]] if seed else list(target.darts)
    origin = seed[0] if seed else 0
    src = relabel_from(source, origin)
    inv_src = {v: k for k, v in src.items()}
    for start in starts:
        tgt = relabel_from(target, start)
        if len(tgt) != len(src):
            continue
        inv_tgt = {v: k for k, v in tgt.items()}
        mapping = {inv_src[i]: inv_tgt[i] for i in range(len(src))}
        if all(mapping[source.alpha[d]] == target.alpha[mapping[d]] and
               mapping[source.rot[d]] == target.rot[mapping[d]] for d in source.darts):
            return mapping
    return None


def diagrams_isomorphic(d1, d2, unordered_families: bool = False) -> bool:
    """Maps isomorphic with families carried onto families (in order unless flagged)."""
    if d1.n != d2.n or d1.map.summary() != d2.map.summary():
        return False
    sizes1 = [len(f) for f in d1.families]
    sizes2 = [len(f) for f in d2.families]
    if (sorted(sizes1) if unordered_families else sizes1) != (sorted(sizes2) if unordered_families else sizes2):
        return False
    return (canonical_form(d1.map, d1.families, unordered_families)
            == canonical_form(d2.map, d2.families, unordered_families))
