"""
Arc systems on punctured panels.

Arcs are routed through the faces along a breadth-first dual tree rooted at
a puncture: the edges outside that tree and outside a primal spanning
cotree are crossed once each, and every other target puncture is reached
through its own tree edge. Inside each face the strands are joined by
chords in nested order, so the arcs come out pairwise disjoint.
"""
from collections import deque
from typing import Dict, List, Sequence, Tuple

import networkx as nx

from backend.core.combinatorial_map import CombinatorialMap, face_walk
from backend.core.map_editor import MapEditor
from backend.data.models import ArcSystem

Target = Tuple


def _face_index(editor: MapEditor) -> Tuple[Dict[int, int], List[List[int]]]:
    face_of: Dict[int, int] = {}
    faces: List[List[int]] = []
    for d in range(editor.size):
        if editor.live[d] and d not in face_of:
            walk = editor.face_walk(d)
            for x in walk:
                face_of[x] = len(faces)
            faces.append(walk)
    return face_of, faces


def _vertex_index(editor: MapEditor) -> Dict[int, int]:
    vertex_of: Dict[int, int] = {}
    count = 0
    for d in range(editor.size):
        if editor.live[d] and d not in vertex_of:
            for x in editor.vertex_darts(d):
                vertex_of[x] = count
            count += 1
    return vertex_of


def route_dual_arcs(editor: MapEditor, root: int, targets: Sequence[int] = (),
                     avoid: Sequence[int] = ()) -> List[Tuple[str, List[int]]]:
    """
    Route an arc system from the puncture face of slot dart ``root``.

    Returns ``(name, darts)`` pairs: ``L<i>`` arcs leave and return to the
    root puncture, ``P<k>`` arcs end on the puncture of ``targets[k]``. With
    genus g and b = 1 + len(targets) punctures there are 2g + b - 1 arcs.
    Puncture faces of ``avoid`` are never entered, so their boundaries stay
    single faces for the tubes attached there later.
    """
    alpha0 = list(editor.alpha)
    face_of, faces = _face_index(editor)
    vertex_of = _vertex_index(editor)
    root_face = face_of[root]
    target_faces = {face_of[s]: s for s in targets}
    avoid_faces = {face_of[s] for s in avoid} - set(target_faces) - {root_face}
    punctures = {root_face} | set(target_faces) | avoid_faces

    # dual BFS tree; target and avoided punctures stay leaves
    parent_dart: Dict[int, int] = {root_face: -1}
    children: Dict[int, List[int]] = {}
    order = [root_face]
    tree = set()
    queue = deque([root_face])
    while queue:
        f = queue.popleft()
        children[f] = []
        if f in target_faces or f in avoid_faces:
            continue
        for d in sorted(faces[f]):
            g = face_of[alpha0[d]]
            if g in parent_dart:
                continue
            parent_dart[g] = alpha0[d]
            children[f].append(d)
            tree.add(min(d, alpha0[d]))
            order.append(g)
            queue.append(g)

    # primal cotree; puncture boundaries go in first so no leftover edge opens into a puncture
    graph = nx.Graph()
    graph.add_nodes_from(set(vertex_of.values()))
    for d in sorted(face_of):
        e0 = min(d, alpha0[d])
        if d != e0 or e0 in tree:
            continue
        u, v = vertex_of[d], vertex_of[alpha0[d]]
        if u == v:
            continue
        weight = 0 if face_of[d] in punctures or face_of[alpha0[d]] in punctures else 1
        if not graph.has_edge(u, v) or weight < graph.edges[u, v]["weight"]:
            graph.add_edge(u, v, dart=e0, weight=weight)
    cotree = {data["dart"] for _, _, data in nx.minimum_spanning_edges(graph, algorithm="kruskal", data=True)}
    leftover = [d for d in sorted(face_of) if d < alpha0[d] and d not in tree and d not in cotree]
    leftover_set = set(leftover)

    # targets of every face in boundary order, with their exit slots (edge, index, side)
    block: Dict[int, List[Target]] = {}
    exits: Dict[int, List[Tuple[int, int, int]]] = {}
    for f in reversed(order):
        if f in target_faces or f in avoid_faces:
            block[f] = [("P", target_faces[f])] if f in target_faces else []
            exits[f] = []
            continue
        is_root = parent_dart[f] < 0
        walk = editor.face_walk(root if is_root else parent_dart[f])
        items: List[Target] = []
        slots: List[Tuple[int, int, int]] = []
        child_set = set(children[f])
        for d in (walk if is_root else walk[1:]):
            e0 = min(d, alpha0[d])
            if d in child_set:
                sub = block[face_of[alpha0[d]]]
                k = len(sub)
                items.extend(sub)
                slots.extend((e0, j if d == e0 else k - 1 - j, d) for j in range(k))
            elif e0 in leftover_set:
                items.append(("L", e0, d))
                slots.append((e0, 0, d))
        block[f] = items
        exits[f] = slots

    points: Dict[int, List[Tuple[int, int]]] = {}

    def make_points(e0: int, k: int) -> None:
        pts = []
        x = e0
        for _ in range(k):
            p, q = editor.subdivide(x)
            pts.append((p, q))
            x = q
        points[e0] = pts

    for f in order:
        for c in children[f]:
            k = len(block[face_of[alpha0[c]]])
            if k:
                make_points(min(c, alpha0[c]), k)
    for e0 in leftover:
        make_points(e0, 1)

    def corner(e0: int, index: int, side: int) -> int:
        p, q = points[e0][index]
        return q if side == e0 else p

    chords: Dict[Target, List[int]] = {}
    for f in order:
        if f in punctures:
            continue
        d0 = parent_dart[f]
        e0 = min(d0, alpha0[d0])
        k = len(block[f])
        for s, (target, slot) in enumerate(zip(block[f], exits[f])):
            entry = corner(e0, k - 1 - s if d0 == e0 else s, d0)
            chords.setdefault(target, []).append(editor.add_edge(entry, corner(*slot)))

    arcs: List[Tuple[str, List[int]]] = []
    for i, e0 in enumerate(leftover):
        there = chords[("L", e0, e0)]
        back = chords[("L", e0, alpha0[e0])]
        arcs.append((f"L{i}", there + [editor.alpha[x] for x in reversed(back)]))
    for k, s in enumerate(targets):
        arcs.append((f"P{k}", chords[("P", s)]))
    return arcs


def arc_system_punctured(cmap: CombinatorialMap, puncture: int,
                         targets: Sequence[int] = ()) -> Tuple[CombinatorialMap, ArcSystem]:
    """Route arcs on a copy of ``cmap``; returns the refined map and the arcs in its numbering."""
    editor = MapEditor(cmap)
    routed = route_dual_arcs(editor, puncture, targets)
    for name, darts in routed:
        editor.track(name, darts)
    refined, remap = editor.freeze()
    arcs = [tuple(editor.frozen_path(name, remap)) for name, _ in routed]
    ends = {i: remap[targets[int(name[1:])]] for i, (name, _) in enumerate(routed) if name.startswith("P")}
    return refined, ArcSystem(arcs=arcs, puncture=remap[puncture], targets=ends)


def arc_cut_regions(cmap: CombinatorialMap, arcs: Sequence[Sequence[int]], punctures: Sequence[int]) -> List[int]:
    """
    Euler characteristics of the regions left when the punctures are removed
    and the surface is cut along the arcs. A system cutting to a disk gives [1].
    """
    hole_faces = {cmap.face_of[s] for s in punctures}
    blocked = {cmap.edge_key(x) for arc in arcs for x in arc}
    for s in punctures:
        blocked |= {cmap.edge_key(x) for x in face_walk(cmap, s)}
    boundary_vertices = {cmap.tail(x) for x in cmap.darts if cmap.edge_key(x) in blocked}

    regions = nx.Graph()
    regions.add_nodes_from(f for f in range(cmap.face_count) if f not in hole_faces)
    for a, b in cmap.edges:
        if cmap.edge_key(a) not in blocked:
            regions.add_edge(cmap.face_of[a], cmap.face_of[b])
    result = []
    for comp in sorted(nx.connected_components(regions), key=min):
        edges = sum(1 for a, _ in cmap.edges
                    if cmap.edge_key(a) not in blocked and cmap.face_of[a] in comp)
        verts = sum(1 for v, darts in enumerate(cmap.vertices)
                    if v not in boundary_vertices and cmap.face_of[darts[0]] in comp)
        result.append(len(comp) - edges + verts)
    return result
