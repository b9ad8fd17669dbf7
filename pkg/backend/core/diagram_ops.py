"""
Calculus of multisection diagrams.

Genus-1 sphere diagrams, connected sums and stabilization, handleslides
along bands, detection and execution of destabilizations, Dehn twists of a
single curve, plus the tabular summaries the CLI prints.

Every operation takes an immutable ``MultisectionDiagram`` and returns a new
one; edits run through a ``MapEditor`` with every curve tracked so the
curves survive subdivisions.
"""
from collections import deque
from datetime import datetime
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import pandas as pd

from backend.core.combinatorial_map import CombinatorialMap, build_map, grid_torus, mirror_map
from backend.core.curves import (
    Curve,
    are_disjoint,
    crossing_vertices,
    curve_free_faces,
    edge_set,
    intersection_count,
    simplicity_problem,
    vertex_set,
)
from backend.core.cutting import are_parallel, cut_system_verdict
from backend.core.diagram_models import (
    CurveRef,
    DiagramContext,
    FamilyVerdict,
    MultisectionDiagram,
    SlideStep,
    StabilizationWitness,
    ValidationReport,
    empty_diagram,
)
from backend.core.errors import (
    BandBlocked,
    CurvesIntersect,
    FaceNotCurveFree,
    InvalidCurve,
    KOutOfRange,
    MismatchedN,
    MultisectionError,
    NotCleanlySeparated,
    NotSameFamily,
    NotTransverse,
    TargetMissing,
    WitnessStale,
)
from backend.core.homology import family_rank
from backend.core.map_editor import MapEditor, realize_boundary, route_chord
from backend.core.rule_evaluator import RuleEvaluator
from backend.core.rule_registry import build_default_registry


# ---------------------------------------------------------------------------
# Editor plumbing
# ---------------------------------------------------------------------------

def _key(family: int, index: int) -> str:
    return f"curve:{family}:{index}"


def _open_editor(d: MultisectionDiagram) -> MapEditor:
    editor = MapEditor(d.map)
    if d.panels is not None:
        editor.panel = list(d.panels)
    for i, family in enumerate(d.families, start=1):
        for j, c in enumerate(family):
            editor.track(_key(i, j), c.darts)
    return editor


Layout = List[List[Tuple[str, Optional[str]]]]


def _layout_of(d: MultisectionDiagram) -> Layout:
    return [[(_key(i, j), c.label) for j, c in enumerate(family)]
            for i, family in enumerate(d.families, start=1)]


def _close_editor(editor: MapEditor, layout: Layout, name: str, provenance: str,
                  keep_panels: bool = False) -> MultisectionDiagram:
    cmap, remap = editor.freeze()
    families = tuple(
        tuple(Curve(darts=tuple(editor.frozen_path(key, remap)), family=i, label=label) for key, label in fam)
        for i, fam in enumerate(layout, start=1)
    )
    panels = tuple(editor.frozen_panels(remap)) if keep_panels else None
    return MultisectionDiagram(map=cmap, families=families, name=name, provenance=provenance, panels=panels)


def _face_darts(cmap: CombinatorialMap, face: int) -> Tuple[int, ...]:
    if not 0 <= face < cmap.face_count:
        raise TargetMissing(f"face {face} does not exist")
    return cmap.faces[face]


# ---------------------------------------------------------------------------
# Genus-1 sphere diagrams
# ---------------------------------------------------------------------------

def gen1_sphere_diagram(n: int, k: int) -> MultisectionDiagram:
    """k parallel meridians (families 1..k) dual to n-k parallel longitudes on a k×(n-k) grid torus."""
    if not 0 < k < n:
        raise KOutOfRange(f"need 0 < k < n, got n={n} k={k}")
    p, q = k, n - k
    cmap = grid_torus(p, q)
    families: List[Tuple[Curve, ...]] = []
    for i in range(p):
        darts = tuple(4 * (i + p * j) + 1 for j in range(q))
        families.append((Curve(darts=darts, family=i + 1, label=f"meridian:{i}"),))
    for j in range(q):
        darts = tuple(4 * (i + p * j) for i in range(p))
        families.append((Curve(darts=darts, family=p + j + 1, label=f"longitude:{j}"),))
    return MultisectionDiagram(map=cmap, families=tuple(families), name=f"gen1-sphere-{n}-{k}",
                               provenance=f"gen1_sphere_diagram(n={n}, k={k})")


def stabilization_witness(d: MultisectionDiagram, k: int) -> StabilizationWitness:
    """The witness formed by the last curve of every family, families 1..k on the A side."""
    refs = [CurveRef(family=i, index=len(d.family(i)) - 1) for i in range(1, d.n + 1)]
    return StabilizationWitness(group_a=tuple(refs[:k]), group_b=tuple(refs[k:]))


# ---------------------------------------------------------------------------
# Refinement, connected sum, stabilization
# ---------------------------------------------------------------------------

def refine(d: MultisectionDiagram, face: Optional[int] = None, edge: Optional[int] = None) -> MultisectionDiagram:
    """Plant a curve-free monogon in a face, or on a freshly subdivided edge."""
    editor = _open_editor(d)
    if edge is not None:
        if not 0 <= edge < d.map.dart_count:
            raise TargetMissing(f"dart {edge} does not exist")
        _, q = editor.subdivide(edge)
        editor.add_slot(q)
    else:
        darts = _face_darts(d.map, 0 if face is None else face)
        editor.add_slot(min(darts))
    return _close_editor(editor, _layout_of(d), d.name, d.provenance, keep_panels=d.panels is not None)


def _fresh_label(label: Optional[str], taken: Set[str]) -> Optional[str]:
    """``label``, or ``label~2``, ``label~3``... when the family already uses it."""
    if label is None or label not in taken:
        return label
    n = 2
    while f"{label}~{n}" in taken:
        n += 1
    return f"{label}~{n}"


def _join(d1: MultisectionDiagram, d2: MultisectionDiagram, f1: int, corner2: int,
          name: str, provenance: str) -> MultisectionDiagram:
    """
    Bridge the corner before the first dart of face f1 in d1 to the corner before ``corner2`` in d2.

    The bridge is a single curve-free edge; destabilize drops it again with the
    summand. Summed curves whose label is already used in their family get a
    ``#<n>`` suffix.
    """
    editor = _open_editor(d1)
    corner1 = min(_face_darts(d1.map, f1))
    offset = editor.append_map(d2.map)
    for i, family in enumerate(d2.families, start=1):
        for j, c in enumerate(family):
            editor.track(f"sum:{i}:{j}", [x + offset for x in c.darts])
    editor.add_edge(corner1, corner2 + offset, require_split=False)
    layout = _layout_of(d1)
    for i, family in enumerate(d2.families, start=1):
        taken = {label for _, label in layout[i - 1] if label is not None}
        for j, c in enumerate(family):
            label = _fresh_label(c.label, taken)
            if label is not None:
                taken.add(label)
            layout[i - 1].append((f"sum:{i}:{j}", label))
    return _close_editor(editor, layout, name, provenance)


def _first_free_face(d: MultisectionDiagram) -> Optional[int]:
    free = curve_free_faces(d.map, d.all_curves())
    return free[0] if free else None


def connected_sum(d1: MultisectionDiagram, d2: MultisectionDiagram, f1: int, f2: int) -> MultisectionDiagram:
    if d1.n != d2.n:
        raise MismatchedN(f"cannot sum a {d1.n}-section with a {d2.n}-section")
    name = f"{d1.name}#{d2.name}"
    if d2.genus == 0 and not d2.all_curves():
        return d1
    if d1.genus == 0 and not d1.all_curves():
        return d2
    for d, f in ((d1, f1), (d2, f2)):
        if f not in curve_free_faces(d.map, d.all_curves()):
            raise FaceNotCurveFree(f"face {f} of {d.name or 'diagram'} carries curve edges")
    corner2 = min(_face_darts(d2.map, f2))
    return _join(d1, d2, f1, corner2, name, f"connected_sum({d1.name}, {d2.name})")


def stabilize(d: MultisectionDiagram, k: int, face: Optional[int] = None) -> MultisectionDiagram:
    """
    Connected sum with gen1_sphere_diagram(n, k) at the grid's corner before dart 0.

    Without a face the first curve-free face is used, or the face of dart 0
    when there is none; the bridge sits inside that face either way.
    """
    n = d.n
    sphere = gen1_sphere_diagram(n, k)
    if d.genus == 0 and not d.all_curves():
        return sphere
    if face is None:
        face = _first_free_face(d)
        if face is None:
            face = d.map.face_of[0]
    elif face not in curve_free_faces(d.map, d.all_curves()):
        raise FaceNotCurveFree(f"face {face} carries curve edges")
    return _join(d, sphere, face, 0, d.name, f"stabilize({d.name}, k={k})")


# ---------------------------------------------------------------------------
# Handleslides
# ---------------------------------------------------------------------------

def _family_blockers(d: MultisectionDiagram, family: int) -> Tuple[Set[int], Set[int]]:
    edges: Set[int] = set()
    verts: Set[int] = set()
    for c in d.family(family):
        edges |= edge_set(d.map, c)
        verts |= vertex_set(d.map, c)
    return edges, verts


def find_band(d: MultisectionDiagram, family: int, curve: int, over: int) -> Tuple[int, ...]:
    """Shortest dart path from ``curve`` to ``over`` avoiding every other part of the family."""
    cmap = d.map
    c, o = d.family(family)[curve], d.family(family)[over]
    blocked_edges, blocked_verts = _family_blockers(d, family)
    sources = [cmap.tail(x) for x in c.darts]
    targets = vertex_set(cmap, o)
    parent: Dict[int, Optional[int]] = {v: None for v in sources}
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        for x in sorted(cmap.vertices[v]):
            if cmap.edge_key(x) in blocked_edges:
                continue
            w = cmap.head(x)
            if w in targets:
                path = [x]
                u = v
                while parent[u] is not None:
                    path.append(parent[u])
                    u = cmap.tail(parent[u])
                return tuple(reversed(path))
            if w in blocked_verts or w in parent:
                continue
            parent[w] = x
            queue.append(w)
    raise BandBlocked(f"no band joins curves {curve} and {over} of family {family}")


def _check_band(d: MultisectionDiagram, family: int, curve: int, over: int, band: Sequence[int]) -> None:
    cmap = d.map
    if not band:
        raise BandBlocked("band is empty")
    for x in band:
        if not 0 <= x < cmap.dart_count:
            raise BandBlocked(f"band dart {x} is not in the map")
    blocked_edges, blocked_verts = _family_blockers(d, family)
    if cmap.tail(band[0]) not in vertex_set(cmap, d.family(family)[curve]):
        raise BandBlocked("band does not start on the sliding curve")
    if cmap.head(band[-1]) not in vertex_set(cmap, d.family(family)[over]):
        raise BandBlocked("band does not end on the curve slid over")
    interior = [cmap.head(x) for x in band[:-1]]
    if len(set(interior)) != len(interior):
        raise BandBlocked("band visits a vertex twice")
    for a, b in zip(band, band[1:]):
        if cmap.head(a) != cmap.tail(b):
            raise BandBlocked(f"band darts {a} and {b} are not consecutive")
    if any(cmap.edge_key(x) in blocked_edges for x in band):
        raise BandBlocked("band runs along a curve of the family")
    if any(v in blocked_verts for v in interior):
        raise BandBlocked("band touches a curve of the family")


def handleslide(d: MultisectionDiagram, family: int, curve: int, over: int,
                band: Optional[Sequence[int]] = None) -> MultisectionDiagram:
    """Replace ``curve`` by its band sum with ``over``, the boundary of a neighbourhood of curve ∪ band ∪ over."""
    if not 1 <= family <= d.n:
        raise NotSameFamily(f"family {family} does not exist")
    size = len(d.family(family))
    if curve == over or not (0 <= curve < size and 0 <= over < size):
        raise NotSameFamily(f"curves {curve} and {over} are not two members of family {family}")
    c, o = d.family(family)[curve], d.family(family)[over]
    if not are_disjoint(d.map, c, o):
        raise CurvesIntersect(f"curves {curve} and {over} of family {family} meet")
    if band is None:
        band = find_band(d, family, curve, over)
    else:
        _check_band(d, family, curve, over, band)

    editor = _open_editor(d)
    subgraph: Set[int] = set()
    for x in list(c.darts) + list(band) + list(o.darts):
        subgraph.add(x)
        subgraph.add(d.map.alpha[x])
    slid = realize_boundary(editor, subgraph, start=band[0])
    editor.track(_key(family, curve), slid)
    return _close_editor(editor, _layout_of(d), d.name, d.provenance, keep_panels=d.panels is not None)


# ---------------------------------------------------------------------------
# Destabilization
# ---------------------------------------------------------------------------

class _Separation:
    """Complement of a witness: the region kept and the boundary walk bordering it."""

    def __init__(self, kept_faces: Set[int], walk: List[int]):
        self.kept_faces = kept_faces
        self.walk = walk


def _separate(d: MultisectionDiagram, witness_curves: Sequence[Curve]) -> _Separation:
    cmap = d.map
    xset: Set[int] = set()
    for c in witness_curves:
        for x in c.darts:
            xset.add(x)
            xset.add(cmap.alpha[x])
    x_vertices = {cmap.tail(x) for x in xset}

    regions = nx.Graph()
    regions.add_nodes_from(range(cmap.face_count))
    for x in cmap.darts:
        if x not in xset:
            regions.add_edge(cmap.face_of[x], cmap.face_of[cmap.alpha[x]])
    region_of: Dict[int, int] = {}
    for r, comp in enumerate(sorted(nx.connected_components(regions), key=min)):
        for f in comp:
            region_of[f] = r
    count = len(set(region_of.values()))
    faces = [0] * count
    edges = [0] * count
    verts = [0] * count
    for f, r in region_of.items():
        faces[r] += 1
    for a, _ in cmap.edges:
        if a not in xset:
            edges[region_of[cmap.face_of[a]]] += 1
    for v, darts in enumerate(cmap.vertices):
        if v not in x_vertices:
            verts[region_of[cmap.face_of[darts[0]]]] += 1
    euler = [faces[r] - edges[r] + verts[r] for r in range(count)]
    open_regions = [r for r in range(count) if euler[r] != 1]
    if len(open_regions) != 1:
        raise NotCleanlySeparated(f"expected one region beyond the witness, found {len(open_regions)}")
    kept = open_regions[0]

    def rot_x(x: int) -> int:
        e = cmap.rot[x]
        while e not in xset:
            e = cmap.rot[e]
        return e

    seen: Set[int] = set()
    bordering: List[List[int]] = []
    for start in sorted(xset):
        if start in seen:
            continue
        orbit = [start]
        seen.add(start)
        nxt = rot_x(cmap.alpha[start])
        while nxt != start:
            orbit.append(nxt)
            seen.add(nxt)
            nxt = rot_x(cmap.alpha[nxt])
        if region_of[cmap.face_of[orbit[0]]] == kept:
            bordering.append(orbit)
    if len(bordering) != 1:
        raise NotCleanlySeparated(f"the kept region meets the witness along {len(bordering)} boundary walks")

    kept_faces = {f for f, r in region_of.items() if r == kept}
    return _Separation(kept_faces, bordering[0])


def _witness_curves(d: MultisectionDiagram, witness: StabilizationWitness) -> Tuple[List[Curve], List[Curve]]:
    try:
        group_a = [d.family(ref.family)[ref.resolve(d)] for ref in witness.group_a]
        group_b = [d.family(ref.family)[ref.resolve(d)] for ref in witness.group_b]
    except (KeyError, IndexError) as exc:
        raise WitnessStale(f"witness refers to a missing curve: {exc}")
    fams = [ref.family for ref in witness.group_a + witness.group_b]
    if sorted(fams) != list(range(1, d.n + 1)) or not 0 < len(group_a) < d.n:
        raise WitnessStale("witness must take one curve from every family, split 0 < k < n")
    return group_a, group_b


def _check_witness_shape(d: MultisectionDiagram, group_a: List[Curve], group_b: List[Curve]) -> bool:
    cmap = d.map
    try:
        for group in (group_a, group_b):
            for c1, c2 in combinations(group, 2):
                if not are_disjoint(cmap, c1, c2) or not are_parallel(cmap, c1, c2):
                    return False
        for a in group_a:
            for b in group_b:
                if intersection_count(cmap, a, b) != 1:
                    return False
    except MultisectionError:
        return False
    return True


Passage = List[Tuple[str, int, int]]


def _passages(cmap: CombinatorialMap, c: Curve, kept: Set[int], x_vertices: Set[int]) -> Passage:
    """
    Curve ``c`` as kept darts and chords across the cap.

    ``("dart", x, -1)`` keeps dart x. ``("chord", a, b)`` replaces the stretch
    from the cap dart a, where the curve reaches the witness neighbourhood,
    to the cap dart b where it leaves again.
    """
    darts = c.darts
    n = len(darts)
    if not any(x in kept for x in darts):
        raise NotCleanlySeparated(f"curve {c.label or c.darts[0]} lies inside the witness neighbourhood")
    starts = [s for s in range(n)
              if darts[s] in kept and (darts[s - 1] not in kept or cmap.head(darts[s - 1]) in x_vertices)]
    if not starts:
        return [("dart", x, -1) for x in darts]
    s = starts[0]
    items: Passage = []
    i = 0
    while i < n:
        x = darts[(s + i) % n]
        items.append(("dart", x, -1))
        i += 1
        if cmap.head(x) in x_vertices:
            while darts[(s + i) % n] not in kept:
                i += 1
            items.append(("chord", cmap.alpha[x], darts[(s + i) % n]))
    return items


def destabilize(d: MultisectionDiagram, witness: StabilizationWitness) -> MultisectionDiagram:
    """Split off the genus-1 sphere summand carried by the witness.

    The kept side is capped by a single vertex gathering the darts that leave
    the witness neighbourhood, in the order of its boundary walk. When only a
    bridge edge leaves it, as after :func:`stabilize`, the bridge is removed
    instead and the kept side comes back unchanged.

    Other curves passing through the neighbourhood are cleared: the cap vertex
    becomes a polygon and each passage is redrawn as a chord across it,
    disjoint from chords of its own family and crossing others as few times
    as the polygon allows. Within a family this is a sequence of slides over
    the witness curve of that family.
    """
    group_a, group_b = _witness_curves(d, witness)
    if not _check_witness_shape(d, group_a, group_b):
        raise WitnessStale("witness curves are no longer parallel and dual")
    if d.genus == 1:
        return empty_diagram(d.n, name=d.name)
    sep = _separate(d, group_a + group_b)
    cmap = d.map
    witness_keys = {cmap.edge_key(x) for c in group_a + group_b for x in c.darts}
    x_vertices = {cmap.tail(x) for c in group_a + group_b for x in c.darts}
    cap: List[int] = []
    walk = sep.walk
    for j, y in enumerate(walk):
        follow = walk[(j + 1) % len(walk)]
        e = cmap.rot[cmap.alpha[y]]
        while e != follow:
            cap.append(e)
            e = cmap.rot[e]
    # a lone cap dart is a bridge edge; drop it rather than leave a pendant
    bridge: Set[int] = set()
    if len(cap) == 1 and cmap.tail(cmap.alpha[cap[0]]) not in x_vertices:
        bridge = {cap[0], cmap.alpha[cap[0]]}
        cap = []
    kept = [x for x in cmap.darts
            if cmap.edge_key(x) not in witness_keys and cmap.face_of[x] in sep.kept_faces
            and x not in bridge]
    renumber = {x: i for i, x in enumerate(kept)}
    alpha = [renumber[cmap.alpha[x]] for x in kept]
    rot = [0] * len(kept)
    for x in kept:
        if cmap.tail(x) not in x_vertices:
            nxt = cmap.rot[x]
            while nxt in bridge:
                nxt = cmap.rot[nxt]
            rot[renumber[x]] = renumber[nxt]
    for i, x in enumerate(cap):
        rot[renumber[x]] = renumber[cap[(i + 1) % len(cap)]]

    dropped = {id(c) for c in group_a + group_b}
    remaining = [[c for c in family if id(c) not in dropped] for family in d.families]
    kept_set = set(kept)
    layout = [[_passages(cmap, c, kept_set, x_vertices) for c in family] for family in remaining]
    editor = MapEditor(build_map(alpha, rot))
    if any(kind == "chord" for family in layout for items in family for kind, _, _ in items):
        editor.truncate_vertex(renumber[cap[0]])
    chord_family: Dict[str, int] = {}
    for f, family in enumerate(layout, start=1):
        for i, items in enumerate(family):
            for j, (kind, a, b) in enumerate(items):
                if kind != "chord":
                    continue
                crossable = {x for key, g in chord_family.items() if g != f
                             for y in editor.path(key) for x in (y, editor.alpha[y])}
                try:
                    darts = route_chord(editor, editor.rot_inv[renumber[a]], editor.rot_inv[renumber[b]], crossable)
                except InvalidCurve as exc:
                    raise NotCleanlySeparated(f"cannot clear a family-{f} curve across the cap: {exc.message}")
                editor.track(f"cap:{f}:{i}:{j}", darts)
                chord_family[f"cap:{f}:{i}:{j}"] = f
    new_map, remap = editor.freeze()

    families = []
    for f, (family, passages) in enumerate(zip(remaining, layout), start=1):
        curves = []
        for i, (c, items) in enumerate(zip(family, passages)):
            darts: List[int] = []
            for j, (kind, a, _) in enumerate(items):
                if kind == "dart":
                    darts.append(remap[renumber[a]])
                else:
                    darts.extend(editor.frozen_path(f"cap:{f}:{i}:{j}", remap))
            curves.append(Curve(darts=tuple(darts), family=c.family, label=c.label))
        families.append(tuple(curves))
    return MultisectionDiagram(map=new_map, families=tuple(families), name=d.name,
                               provenance=f"destabilize({d.name}, k={witness.k})")


def _candidate_witnesses(d: MultisectionDiagram) -> Iterable[Tuple[List[CurveRef], List[CurveRef]]]:
    cmap = d.map
    for ai, a in enumerate(d.family(1)):
        options: List[List[Tuple[str, int]]] = []
        for f in range(2, d.n + 1):
            choices = []
            for ci, c in enumerate(d.family(f)):
                try:
                    if are_disjoint(cmap, a, c):
                        if are_parallel(cmap, a, c):
                            choices.append(("A", ci))
                    elif intersection_count(cmap, a, c) == 1:
                        choices.append(("B", ci))
                except MultisectionError:
                    continue
            options.append(choices)
        for combo in product(*options):
            if all(side == "A" for side, _ in combo):
                continue
            group_a = [CurveRef(family=1, index=ai)]
            group_b = []
            for f, (side, ci) in enumerate(combo, start=2):
                (group_a if side == "A" else group_b).append(CurveRef(family=f, index=ci))
            yield group_a, group_b


def find_stabilizations(d: MultisectionDiagram) -> List[StabilizationWitness]:
    """
    All separated (A, B) groups with family 1 on the A side.

    Other curves may pass through the witness neighbourhood; destabilize
    clears them. A curve lying wholly inside the neighbourhood rules the
    witness out.
    """
    witnesses: List[StabilizationWitness] = []
    if d.genus == 0:
        return witnesses
    cmap = d.map
    for refs_a, refs_b in _candidate_witnesses(d):
        group_a = [d.family(r.family)[r.index] for r in refs_a]
        group_b = [d.family(r.family)[r.index] for r in refs_b]
        if not _check_witness_shape(d, group_a, group_b):
            continue
        walk: Tuple[int, ...] = ()
        if d.genus > 1:
            try:
                sep = _separate(d, group_a + group_b)
            except NotCleanlySeparated:
                continue
            chosen = {id(c) for c in group_a + group_b}
            if any(all(cmap.face_of[x] not in sep.kept_faces for x in c.darts)
                   for c in d.all_curves() if id(c) not in chosen):
                continue
            walk = tuple(sep.walk)
        witnesses.append(StabilizationWitness(group_a=tuple(refs_a), group_b=tuple(refs_b), separating=walk))
    return witnesses


# ---------------------------------------------------------------------------
# Dehn twists
# ---------------------------------------------------------------------------

def dehn_twist_curve(d: MultisectionDiagram, family: int, index: int, track: Curve,
                     power: int) -> MultisectionDiagram:
    """Replace one curve by its image under the power-th Dehn twist along ``track``.

    |power| parallel pushoffs of the track are realized on its right side and
    every crossing with the curve is smoothed the same way round, then the
    smoothed union is traced as the new curve.
    """
    problem = simplicity_problem(d.map, track)
    if problem:
        raise InvalidCurve(f"twist track: {problem}")
    target = d.family(family)[index]
    if power == 0 or not crossing_vertices(d.map, target, track):
        return d

    editor = _open_editor(d)
    editor.track("twist:track", track.darts)
    previous = list(track.darts)
    copies = []
    for t in range(abs(power)):
        sub = set(previous) | {editor.alpha[x] for x in previous}
        realize_boundary(editor, sub, start=previous[0], key=f"twist:{t}")
        copies.append(f"twist:{t}")
        previous = editor.path(f"twist:{t}")

    staged, remap = editor.freeze()
    curve = editor.frozen_path(_key(family, index), remap)
    loops = [editor.frozen_path(key, remap) for key in copies]
    layout = _layout_of(d)

    smoother = MapEditor(staged)
    if d.panels is not None:
        smoother.panel = editor.frozen_panels(remap)
    for i, fam in enumerate(layout, start=1):
        for j, (key, _) in enumerate(fam):
            smoother.track(key, editor.frozen_path(key, remap))

    curve_c = Curve(darts=tuple(curve))
    for loop in loops:
        loop_c = Curve(darts=tuple(loop))
        loop_darts = set(loop) | {staged.alpha[x] for x in loop}
        for v in crossing_vertices(staged, curve_c, loop_c):
            out = next(x for x in staged.vertices[v] if x in loop_darts)
            group = [out, staged.rot[out]] if power > 0 else [staged.rot_inverse[out], out]
            smoother.split_vertex(group)

    strands: Set[int] = set()
    for walk in [curve] + loops:
        for x in walk:
            strands.add(x)
            strands.add(staged.alpha[x])
    partner: Dict[int, int] = {}
    for x in strands:
        others = [e for e in smoother.vertex_darts(x) if e in strands and e != x]
        if len(others) != 1:
            raise InvalidCurve("twist smoothing left a vertex with more than two strands")
        partner[x] = others[0]
    traced = [curve[0]]
    cur = partner[smoother.alpha[curve[0]]]
    while cur != curve[0]:
        traced.append(cur)
        if len(traced) > len(strands):
            raise InvalidCurve("twist smoothing did not close up")
        cur = partner[smoother.alpha[cur]]
    if len(traced) * 2 != len(strands):
        raise InvalidCurve("twist smoothing produced more than one component")
    smoother.track(_key(family, index), traced)
    return _close_editor(smoother, layout, d.name, f"{d.provenance} + twist^{power}",
                         keep_panels=d.panels is not None)


# ---------------------------------------------------------------------------
# Summaries and validation
# ---------------------------------------------------------------------------

def intersection_matrix(d: MultisectionDiagram) -> pd.DataFrame:
    """Pairwise crossing counts of all curves, indexed by (family, index)."""
    curves = [(i, j, c) for i, fam in enumerate(d.families, start=1) for j, c in enumerate(fam)]
    index = pd.MultiIndex.from_tuples([(i, j) for i, j, _ in curves], names=["family", "index"])
    table = pd.DataFrame(0, index=index, columns=index, dtype=int)
    for (i1, j1, c1), (i2, j2, c2) in combinations(curves, 2):
        if i1 == i2:
            count = len(vertex_set(d.map, c1) & vertex_set(d.map, c2))
        else:
            count = intersection_count(d.map, c1, c2)
        table.loc[(i1, j1), (i2, j2)] = count
        table.loc[(i2, j2), (i1, j1)] = count
    return table


def diagram_summary(d: MultisectionDiagram) -> pd.DataFrame:
    rows = [
        {"family": i, "index": j, "label": c.label or "", "length": len(c),
         "simple": simplicity_problem(d.map, c) is None}
        for i, fam in enumerate(d.families, start=1) for j, c in enumerate(fam)
    ]
    return pd.DataFrame(rows, columns=["family", "index", "label", "length", "simple"])


def mirror_diagram(d: MultisectionDiagram) -> MultisectionDiagram:
    return d.model_copy(update={"map": mirror_map(d.map), "name": f"mirror({d.name})"})


def validate_diagram(d: MultisectionDiagram, expected_n: Optional[int] = None) -> ValidationReport:
    evaluator = RuleEvaluator(build_default_registry())
    violations = evaluator.evaluate_all(DiagramContext(diagram=d, expected_n=expected_n))
    verdicts = []
    for i, family in enumerate(d.families, start=1):
        verdict = cut_system_verdict(d.map, family)
        try:
            rank = family_rank(d.map, family) if verdict.ok else 0
        except MultisectionError:
            rank = 0
        verdicts.append(FamilyVerdict(family=i, size=len(family), cut_system=verdict.ok,
                                      reason=verdict.reason, h1_rank=rank))
    return ValidationReport(
        name=d.name,
        valid=not violations,
        genus=d.genus,
        n=d.n,
        families=verdicts,
        transverse=not any(v.rule_id in ("DGM-005", "DGM-006") for v in violations),
        rules_evaluated=evaluator.rules_evaluated,
        violations=violations,
        validated_at=datetime.now(),
    )


def find_enabling_slides(d: MultisectionDiagram, limit: int = 1) -> List[Tuple[SlideStep, int]]:
    """Single handleslides after which the detector finds a witness; stops after ``limit`` hits."""
    hits: List[Tuple[SlideStep, int]] = []
    for i in range(1, d.n + 1):
        size = len(d.family(i))
        for curve, over in ((a, b) for a in range(size) for b in range(size) if a != b):
            try:
                band = find_band(d, i, curve, over)
                slid = handleslide(d, i, curve, over, band)
            except (BandBlocked, CurvesIntersect, NotTransverse, InvalidCurve):
                continue
            found = find_stabilizations(slid)
            if found:
                step = SlideStep(family=i, curve=CurveRef(family=i, index=curve),
                                 over=CurveRef(family=i, index=over), band=tuple(band))
                hits.append((step, len(found)))
                if len(hits) >= limit:
                    return hits
    return hits
