"""
Diagram generators for fiber bundles.

Surface bundles over a base with a good ball decomposition are assembled
from punctured copies of the fiber (panels) joined by tubes, one per edge of
the base graph. Over spheres every family gets arcs doubled over the two
panels plus one tube meridian. Bundles over the circle follow a scheme
table: N panels in a cycle, N tubes, and per family the fiber copies, the
doubled span arcs and one meridian.

All generators are deterministic: every choice (slot corner, dual tree,
cotree) is broken by the lowest index; a circle-bundle meridian goes on
the last column that family crosses.
"""
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from backend.core.combinatorial_map import CombinatorialMap, face_walk, mirror_map, surface_of_genus
from backend.core.curves import Curve, crossing_vertices, curve_free_faces, edge_set
from backend.core.diagram_models import MultisectionDiagram, Scheme
from backend.core.diagram_ops import dehn_twist_curve
from backend.core.errors import (
    Disconnected,
    InvalidCurve,
    MonodromyNotAutomorphism,
    MultisectionError,
    NoCurveFreeFace,
    SchemeMismatch,
    Unsupported,
)
from backend.core.isomorphism import find_isomorphism
from backend.core.map_editor import MapEditor, realize_boundary, route_chord
from backend.data.arcs import route_dual_arcs
from backend.data.goodball import graph_is_connected, require_simple
from backend.data.models import BaseGraph, Monodromy, PunctureAssignment
from backend.data.schemes import scheme_validate, span_columns, transverse_panels

Layout = List[List[Tuple[str, str]]]


# ---------------------------------------------------------------------------
# Panels and tubes
# ---------------------------------------------------------------------------

def _punctured_panel(g: int, count: int) -> Tuple[MapEditor, List[int]]:
    """Genus-g panel with ``count`` slot punctures, all in the corner before dart 0."""
    editor = MapEditor(surface_of_genus(g))
    return editor, [editor.add_slot(0) for _ in range(count)]


class _Tube:
    """Rungs across the annulus joining one puncture on panel A to its partner on panel B."""

    def __init__(self, editor: MapEditor, panel: CombinatorialMap, slot: int, a_offset: int, b_offset: int,
                 mirrored: bool = True, twist: Optional[Dict[int, int]] = None):
        self.walk = face_walk(panel, slot)
        self.a_offset = a_offset
        self.index = {panel.vertex_of[w]: t for t, w in enumerate(self.walk)}
        m = len(self.walk)
        self.rungs: List[int] = []
        for t, w in enumerate(self.walk):
            partner = panel.alpha[self.walk[t - 1]] if mirrored else self.walk[(m - t) % m]
            if twist is not None:
                partner = twist[partner]
            self.rungs.append(editor.add_edge(a_offset + w, b_offset + partner, require_split=t > 0))
        self.rings: List[str] = []

    def rung_at(self, vertex: int) -> int:
        return self.rungs[self.index[vertex]]

    def add_ring(self, editor: MapEditor, key: str) -> None:
        """Meridian around the tube; later rings are pushoffs of the previous one."""
        if self.rings:
            previous = editor.path(self.rings[-1])
            subgraph = set(previous) | {editor.alpha[x] for x in previous}
            start = previous[0]
        else:
            loop = [self.a_offset + w for w in self.walk]
            subgraph = set(loop) | {editor.alpha[x] for x in loop}
            start = loop[0]
        realize_boundary(editor, subgraph, start, key=key)
        self.rings.append(key)


def _double_arc(panel: CombinatorialMap, arc: Sequence[int], a_offset: int, b_offset: int,
                start_tube: _Tube, end_tube: _Tube, editor: MapEditor,
                twist: Optional[Dict[int, int]] = None, image: Optional[Sequence[int]] = None) -> List[int]:
    """
    Arc on panel A, across the end tube, back along the copy on panel B and across the start tube.

    The copy on B is the arc itself (through ``twist`` when given) unless an
    explicit ``image`` arc is passed.
    """
    start = panel.vertex_of[arc[0]]
    end = panel.vertex_of[panel.alpha[arc[-1]]]
    if image is not None:
        back = [panel.alpha[x] for x in reversed(image)]
    else:
        back = [panel.alpha[x] for x in reversed(arc)]
        if twist is not None:
            back = [twist[x] for x in back]
    return ([a_offset + x for x in arc] + [end_tube.rung_at(end)] + [b_offset + x for x in back]
            + [editor.alpha[start_tube.rung_at(start)]])


def _close(editor: MapEditor, layout: Layout, name: str, provenance: str) -> MultisectionDiagram:
    cmap, remap = editor.freeze()
    families = tuple(
        tuple(Curve(darts=tuple(editor.frozen_path(key, remap)), family=i, label=label) for key, label in fam)
        for i, fam in enumerate(layout, start=1)
    )
    return MultisectionDiagram(map=cmap, families=families, name=name, provenance=provenance,
                               panels=tuple(editor.frozen_panels(remap)))


# ---------------------------------------------------------------------------
# Bundles over bases with a good ball decomposition
# ---------------------------------------------------------------------------

def assemble_graph_of_fibers(graph: BaseGraph, g: int) -> CombinatorialMap:
    """
    Central surface of a surface bundle: one genus-g panel per base vertex with
    one puncture per colour, one tube per base edge. Genus v*g + e - v + 1.
    """
    require_simple(graph)
    if not graph_is_connected(graph):
        raise Disconnected("base graph is disconnected")
    editor, slots = _punctured_panel(g, graph.colors)
    panel, remap = editor.freeze()
    slots = [remap[s] for s in slots]

    nxg = nx.MultiGraph()
    nxg.add_nodes_from(range(graph.vertex_count))
    nxg.add_edges_from(e.ends for e in graph.edges)
    mirrored = nx.is_bipartite(nxg)
    side = nx.bipartite.color(nxg) if mirrored else {v: 0 for v in nxg}

    surface = MapEditor()
    offsets = [surface.append_map(panel, mirrored=bool(side[v]), panel=v + 1) for v in range(graph.vertex_count)]
    for e in graph.edges:
        a, b = sorted(e.ends, key=lambda v: (side[v], v))
        _Tube(surface, panel, slots[e.color], offsets[a], offsets[b], mirrored=mirrored)
    cmap, _ = surface.freeze()
    return cmap


def sphere_base_bundle_diagram(n: int, g: int) -> MultisectionDiagram:
    """
    Bundle with genus-g fiber over S^(n-1) (two panels, n tubes). Family i
    skips colour i-1: its arcs cut the panel punctured at the other colours
    into a disk, each arc doubled over both panels, plus the meridian of
    tube i-1. Genus 2g + n - 1.
    """
    if n < 3:
        raise Unsupported("sphere bundles need n >= 3")
    if g < 0:
        raise Unsupported("fiber genus must be non-negative")
    editor, slots = _punctured_panel(g, n)
    routed: Dict[int, List[Tuple[str, str]]] = {}
    for i in range(1, n + 1):
        colours = [c for c in range(n) if c != i - 1]
        arcs = route_dual_arcs(editor, slots[colours[0]], [slots[c] for c in colours[1:]], avoid=[slots[i - 1]])
        routed[i] = []
        for name, darts in arcs:
            label = f"arc:D{colours[1 + int(name[1:])]}" if name.startswith("P") else f"arc:{name}"
            editor.track(f"{i}:{label}", darts)
            routed[i].append((f"{i}:{label}", label))
    panel, remap = editor.freeze()
    slots = [remap[s] for s in slots]

    surface = MapEditor()
    a_offset = surface.append_map(panel, panel=1)
    b_offset = surface.append_map(panel, mirrored=True, panel=2)
    tubes = [_Tube(surface, panel, s, a_offset, b_offset) for s in slots]
    colour_of = {v: c for c, tube in enumerate(tubes) for v in tube.index}

    layout: Layout = []
    for i in range(1, n + 1):
        fam = []
        for key, label in routed[i]:
            arc = editor.frozen_path(key, remap)
            start = colour_of[panel.vertex_of[arc[0]]]
            end = colour_of[panel.vertex_of[panel.alpha[arc[-1]]]]
            surface.track(key, _double_arc(panel, arc, a_offset, b_offset, tubes[start], tubes[end], surface))
            fam.append((key, label))
        layout.append(fam)
    for i in range(1, n + 1):
        key = f"{i}:meridian"
        tubes[i - 1].add_ring(surface, key)
        layout[i - 1].append((key, f"meridian:D{i - 1}"))
    return _close(surface, layout, name=f"sphere-bundle-{n}-{g}", provenance=f"sphere_base_bundle_diagram(n={n}, g={g})")


def twisted_w_m(m: int) -> MultisectionDiagram:
    """
    Twisted family over S^4: the family-1 curve through tube 2 is twisted
    2m times along the family-3 meridian of that tube.
    """
    if m < 0:
        raise Unsupported("twist count must be non-negative")
    base = sphere_base_bundle_diagram(5, 0)
    if m == 0:
        return base.model_copy(update={"name": "w-twist-0", "provenance": "twisted_w_m(m=0)"})
    index = base.find_label(1, "arc:D2")
    track = base.family(3)[base.find_label(3, "meridian:D2")]
    twisted = dehn_twist_curve(base, 1, index, track, 2 * m)
    return twisted.model_copy(update={"name": f"w-twist-{m}", "provenance": f"twisted_w_m(m={m})"})


# ---------------------------------------------------------------------------
# Bundles over the circle
# ---------------------------------------------------------------------------

def _family_edge_sets(cmap: CombinatorialMap, family: Sequence[Curve]) -> set:
    return {frozenset(edge_set(cmap, c)) for c in family}


def check_monodromy(fiber: MultisectionDiagram, mono: Monodromy, reversing: bool = False) -> None:
    """
    Raise MonodromyNotAutomorphism unless phi is a map automorphism carrying family k onto sigma(k).

    With ``reversing`` phi must turn rot into its inverse (an orientation-reversing
    automorphism) instead of commuting with it.
    """
    cmap = fiber.map
    if sorted(mono.sigma) != list(range(1, fiber.n + 1)):
        raise MonodromyNotAutomorphism(f"sigma must permute the {fiber.n} fiber families")
    if mono.phi is None:
        if reversing:
            raise MonodromyNotAutomorphism("an odd number of columns needs an orientation-reversing phi")
        phi = list(cmap.darts)
    else:
        phi = list(mono.phi)
        if sorted(phi) != list(cmap.darts):
            raise MonodromyNotAutomorphism("phi is not a permutation of the fiber darts")
        rot_after = cmap.rot_inverse if reversing else cmap.rot
        for d in cmap.darts:
            if phi[cmap.alpha[d]] != cmap.alpha[phi[d]] or phi[cmap.rot[d]] != rot_after[phi[d]]:
                kind = "reverse" if reversing else "commute with"
                raise MonodromyNotAutomorphism(f"phi does not commute with alpha and {kind} rot at dart {d}")
    for k, family in enumerate(fiber.families, start=1):
        image = [Curve(darts=tuple(phi[x] for x in c.darts)) for c in family]
        if _family_edge_sets(cmap, image) != _family_edge_sets(cmap, fiber.family(mono.sigma[k - 1])):
            raise MonodromyNotAutomorphism(f"phi does not carry family {k} onto family {mono.sigma[k - 1]}")


def _extend_monodromy(master: CombinatorialMap, fiber_darts: int, mono: Monodromy,
                      punctures: Sequence[int], systems: Sequence[Sequence[Sequence[int]]]) -> Dict[int, int]:
    """Extension of phi to the punctured, arc-carrying panel; identity when phi is trivial."""
    if mono.is_identity:
        return {d: d for d in master.darts}
    ext = find_isomorphism(master, master, seed=(0, mono.apply(0)))
    if ext is None or any(ext[d] != mono.apply(d) for d in range(fiber_darts)):
        raise MonodromyNotAutomorphism("phi does not extend to the punctured panel")
    for s in punctures:
        if master.face_of[ext[s]] != master.face_of[s]:
            raise MonodromyNotAutomorphism("phi moves a puncture")
    for arcs in systems:
        mine = [Curve(darts=tuple(a)) for a in arcs]
        image = [Curve(darts=tuple(ext[x] for x in a)) for a in arcs]
        if _family_edge_sets(master, mine) != _family_edge_sets(master, image):
            raise MonodromyNotAutomorphism("phi does not preserve the panel arc systems")
    return ext


# ---------------------------------------------------------------------------
# Orientation-reversing wrap
# ---------------------------------------------------------------------------

def _fixed_corner(cmap: CombinatorialMap, mono: Monodromy, faces: Sequence[int]) -> int:
    """First dart of a curve-free face whose preceding corner phi maps onto itself."""
    for f in faces:
        for x in sorted(cmap.faces[f]):
            if mono.apply(x) == cmap.rot_inverse[x]:
                return x
    raise MonodromyNotAutomorphism("phi fixes no corner of a curve-free face, so the punctures cannot be swapped")


def _reflect_panel(editor: MapEditor, fiber_darts: int, mono: Monodromy, left: int, right: int) -> Dict[int, int]:
    """Orientation-reversing extension of phi to the twice-punctured fiber; it swaps the punctures."""
    base, _ = editor.freeze()
    ext = find_isomorphism(base, mirror_map(base), seed=(0, mono.apply(0)))
    if ext is None or any(ext[d] != mono.apply(d) for d in range(fiber_darts)):
        raise MonodromyNotAutomorphism("phi does not extend to the punctured panel")
    # the image of the face on the right of d is the face on the right of alpha(ext(d))
    if (base.face_of[base.alpha[ext[right]]] != base.face_of[left]
            or base.face_of[base.alpha[ext[left]]] != base.face_of[right]):
        raise MonodromyNotAutomorphism("phi does not swap the two punctures")
    return ext


def _mirror_arcs(editor: MapEditor, ext: Dict[int, int], base_alpha: Sequence[int],
                 keys: Sequence[str]) -> List[List[int]]:
    """
    Draw the images under ``ext`` of the tracked arcs ``keys``.

    Every base dart d is tracked as ``seg:<d>``. The point with index j on
    base edge e maps to a new point with index j along ext(e), placed ahead of
    the points already on that edge. An image chord stays inside the image
    face and crosses only the arcs being mirrored.
    """
    canonical = [d for d in range(len(base_alpha)) if d < base_alpha[d]]
    ahead: Dict[int, Tuple[int, int]] = {}
    for e in canonical:
        for j, s in enumerate(editor.path(f"seg:{e}")[1:]):
            ahead[s] = (e, j)

    def locate(u: int) -> Tuple[int, int, int]:
        for x in editor.vertex_darts(u):
            if x in ahead:
                e, j = ahead[x]
                behind = editor.alpha[editor.path(f"seg:{e}")[j]]
                y = editor.rot[u]
                while y not in (x, behind):
                    y = editor.rot[y]
                return e, j, e if y == x else base_alpha[e]
        raise MonodromyNotAutomorphism(f"arc dart {u} does not start on a panel edge")

    chords = [[(locate(u), locate(editor.alpha[u])) for u in editor.path(key)] for key in keys]
    counts = {e: len(editor.path(f"seg:{e}")) - 1 for e in canonical}
    points: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for e in canonical:
        x = editor.path(f"seg:{ext[e]}")[0]
        for j in range(counts[e]):
            p, q = editor.subdivide(x)
            points[(e, j)] = (p, q)
            x = q

    def corner(e: int, j: int, side: int) -> int:
        p, q = points[(e, j)]
        return p if side == e else q

    images: List[List[int]] = []
    for arc in chords:
        darts: List[int] = []
        for a, b in arc:
            crossable = {x for key in keys for y in editor.path(key) for x in (y, editor.alpha[y])}
            try:
                darts.extend(route_chord(editor, corner(*a), corner(*b), crossable))
            except InvalidCurve as exc:
                raise MonodromyNotAutomorphism(f"no route for an image arc: {exc.message}")
        images.append(darts)
    return images


def _loop_matching(editor: MapEditor, ext: Dict[int, int], loop: Sequence[int]) -> Dict[int, int]:
    """Segments of a puncture loop matched with the segments of its image loop."""
    matching: Dict[int, int] = {}
    for d in loop:
        mine, theirs = editor.path(f"seg:{d}"), editor.path(f"seg:{ext[d]}")
        if len(mine) != len(theirs):
            raise MonodromyNotAutomorphism("puncture loops carry different numbers of arc ends")
        matching.update(zip(mine, theirs))
    return matching


# ---------------------------------------------------------------------------
# Bundles over the circle
# ---------------------------------------------------------------------------

def _crossing_once(fiber: MultisectionDiagram) -> bool:
    """Genus-1 fiber whose first and last curves cross at a single vertex."""
    if fiber.genus != 1 or len(fiber.family(1)) != 1 or len(fiber.family(fiber.n)) != 1:
        return False
    try:
        return len(crossing_vertices(fiber.map, fiber.family(1)[0], fiber.family(fiber.n)[0])) == 1
    except MultisectionError:
        return False


def _pushoff(editor: MapEditor, key: str, new_key: str) -> None:
    darts = editor.path(key)
    realize_boundary(editor, set(darts) | {editor.alpha[x] for x in darts}, darts[0], key=new_key)


def _meeting_dart(editor: MapEditor, key: str, other: str) -> int:
    """Dart of path ``key`` leaving the one vertex it shares with path ``other``."""
    theirs = set(editor.path(other))
    shared = [x for x in editor.path(key) if any(y in theirs for y in editor.vertex_darts(x))]
    if len(shared) != 1:
        raise SchemeMismatch(f"pushoffs {key} and {other} meet {len(shared)} times")
    return shared[0]


def _crossing_slots(editor: MapEditor, first: str, last: str) -> Tuple[int, int, Dict[str, List[str]]]:
    """
    Punctures at crossings of fiber-curve pushoffs, arcs along the pushoffs.

    Each of the two fiber curves gets an inner and an outer pushoff on its
    right. The left puncture replaces the crossing of the first curve's inner
    pushoff with the last curve's outer one, the right puncture the crossing
    of the other two. Opening the pushoffs at their puncture gives arcs
    parallel to the fiber curves, so a fiber copy slid through a tube is
    parallel to the doubled arc of that tube.
    """
    _pushoff(editor, first, "push:first:inner")
    _pushoff(editor, "push:first:inner", "push:first:outer")
    _pushoff(editor, last, "push:last:inner")
    _pushoff(editor, "push:last:inner", "push:last:outer")
    plan = {"L": ("push:first:inner", "push:last:outer"), "R": ("push:first:outer", "push:last:inner")}
    meeting = {side: (_meeting_dart(editor, a, b), _meeting_dart(editor, b, a)) for side, (a, b) in plan.items()}
    slots: Dict[str, int] = {}
    systems: Dict[str, List[str]] = {}
    for side, keys in plan.items():
        slots[side] = editor.truncate_vertex(meeting[side][0])
        systems[side] = []
        for i, (key, out) in enumerate(zip(keys, meeting[side])):
            darts = editor.path(key)
            k = darts.index(out)
            editor.track(f"arc:{side}:{i}", darts[k:] + darts[:k])
            systems[side].append(f"arc:{side}:{i}")
    return slots["L"], slots["R"], systems


def _route_system(editor: MapEditor, side: str, slot: int, avoid: int) -> List[str]:
    keys = []
    for name, darts in route_dual_arcs(editor, slot, avoid=[avoid]):
        key = f"arc:{side}:{name}"
        editor.track(key, darts)
        keys.append(key)
    return keys


def circle_bundle_diagram(fiber: MultisectionDiagram, mono: Monodromy, scheme: Scheme) -> MultisectionDiagram:
    """
    Multisection diagram of the mapping torus of ``mono`` laid out by ``scheme``.

    Panel p (1..N) is a copy of the fiber with two punctures, mirrored on even
    p; column l's tube joins panels l+1 and l+2, the last one wrapping to
    panel 1 through phi. Family j collects, in order, fiber copies on the
    panels flanked by two j-transverse columns, the doubled arcs of every
    column missing j, and one meridian on the last j-transverse column.

    For a trivial monodromy on a genus-1 fiber whose first and last curves
    cross once, the punctures sit where pushoffs of those two curves cross
    and the arcs follow the pushoffs (see :func:`_crossing_slots`).
    Otherwise both punctures share a curve-free corner and the arcs come
    from a dual spanning tree.

    With N odd the wrap joins two unmirrored panels, so phi must reverse the
    fiber orientation and swap the punctures; the arcs around the left
    puncture are then drawn as the images of the arcs around the right one.
    """
    if scheme.rows != fiber.n or tuple(scheme.sigma) != tuple(mono.sigma):
        raise SchemeMismatch(f"scheme {scheme.name!r} does not match the fiber families and sigma")
    report = scheme_validate(scheme)
    if not report.valid:
        raise SchemeMismatch(f"scheme {scheme.name!r} fails {', '.join(report.failed_rules())}")
    N = scheme.N
    reversing = N % 2 == 1
    check_monodromy(fiber, mono, reversing=reversing)
    free = curve_free_faces(fiber.map, fiber.all_curves())
    if not free:
        raise NoCurveFreeFace("fiber map has no curve-free face to puncture")

    g = fiber.genus
    editor = MapEditor(fiber.map)
    for k, family in enumerate(fiber.families, start=1):
        for i, c in enumerate(family):
            editor.track(f"fiber:{k}:{i}", c.darts)
    systems: Dict[str, List[str]] = {}
    if reversing:
        corner = _fixed_corner(fiber.map, mono, free)
        left = editor.add_slot(corner)
        right = editor.add_slot(corner)
        reflection = _reflect_panel(editor, fiber.map.dart_count, mono, left, right)
        base_alpha = list(editor.alpha)
        for d in range(editor.size):
            editor.track(f"seg:{d}", [d])
        systems["R"] = _route_system(editor, "R", right, avoid=left)
        systems["L"] = []
        for i, darts in enumerate(_mirror_arcs(editor, reflection, base_alpha, systems["R"])):
            editor.track(f"arc:L:L{i}", darts)
            systems["L"].append(f"arc:L:L{i}")
        matching = _loop_matching(editor, reflection, (right, base_alpha[right]))
    elif mono.is_identity and _crossing_once(fiber):
        left, right, systems = _crossing_slots(editor, "fiber:1:0", f"fiber:{fiber.n}:0")
    else:
        corner = min(fiber.map.faces[free[0]])
        left = editor.add_slot(corner)
        right = editor.add_slot(corner)
        systems["L"] = _route_system(editor, "L", left, avoid=right)
        systems["R"] = _route_system(editor, "R", right, avoid=left)
    master, remap = editor.freeze()
    punctures = PunctureAssignment(faces={"L": remap[left], "R": remap[right]}, map=master)
    arcs = {side: [editor.frozen_path(key, remap) for key in keys] for side, keys in systems.items()}
    if reversing:
        wrap_twist = {remap[a]: remap[b] for a, b in matching.items()}
    elif mono.is_identity:
        wrap_twist = None
    else:
        ext = _extend_monodromy(master, fiber.map.dart_count, mono, list(punctures.faces.values()),
                                list(arcs.values()))
        wrap_twist = {v: k for k, v in ext.items()}

    surface = MapEditor()
    offsets = {p: surface.append_map(master, mirrored=p % 2 == 0, panel=p) for p in range(1, N + 1)}
    tubes: List[_Tube] = []
    sides: List[str] = []
    for column in range(N):
        p1, p2 = column + 1, column + 2 if column + 2 <= N else 1
        side = "R" if p1 % 2 else "L"
        a, b = (p1, p2) if p1 % 2 else (p2, p1)
        tubes.append(_Tube(surface, master, punctures.faces[side], offsets[a], offsets[b],
                           twist=wrap_twist if column == N - 1 else None))
        sides.append(side)

    layout: Layout = []
    for j in range(1, scheme.n + 1):
        fam: List[Tuple[str, str]] = []
        for p in transverse_panels(scheme, j):
            k = scheme.row_with_label(p - 1, j)
            for i in range(len(fiber.family(k))):
                key = f"{j}:copy:S{p}:{i}"
                surface.track(key, [offsets[p] + x for x in editor.frozen_path(f"fiber:{k}:{i}", remap)])
                fam.append((key, f"copy:S{p}:{i}"))
        for column in span_columns(scheme, j):
            p1, p2 = column + 1, column + 2 if column + 2 <= N else 1
            a, b = (p1, p2) if p1 % 2 else (p2, p1)
            tube = tubes[column]
            wrap = column == N - 1
            for i, arc in enumerate(arcs[sides[column]]):
                key = f"{j}:span:C{column}:{i}"
                if wrap and reversing:
                    darts = _double_arc(master, arc, offsets[a], offsets[b], tube, tube, surface, image=arcs["L"][i])
                else:
                    darts = _double_arc(master, arc, offsets[a], offsets[b], tube, tube, surface,
                                        twist=wrap_twist if wrap else None)
                surface.track(key, darts)
                fam.append((key, f"span:C{column}:{i}"))
        layout.append(fam)
    for j in range(1, scheme.n + 1):
        column = max(c for c in range(N) if scheme.missing(c) != j)
        key = f"{j}:meridian"
        tubes[column].add_ring(surface, key)
        layout[j - 1].append((key, f"meridian:C{column}"))

    for j, fam in enumerate(layout, start=1):
        spans = len(span_columns(scheme, j))
        copies = len(transverse_panels(scheme, j))
        if len(fam) != g * copies + 2 * g * spans + 1 or copies + 2 * spans != N:
            raise SchemeMismatch(f"family {j} has {len(fam)} curves, expected {N * g + 1}")
    return _close(surface, layout, name=f"circle-bundle-{fiber.name or 'fiber'}-N{N}",
                  provenance=f"circle_bundle_diagram(fiber={fiber.name!r}, scheme={scheme.name!r})")
