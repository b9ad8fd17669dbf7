"""
Mutable construction layer over rotation systems.

Generators never poke at permutation arrays directly; they go through a
``MapEditor`` which keeps ``alpha``/``rot``/``rot_inv`` in sync and rewrites
every tracked dart path when an edge is subdivided. Tracked paths are how
curves, arcs and slot boundaries survive later edits.

Corner convention: "the corner before x" is the sector between ``rot_inv[x]``
and ``x`` at the tail of ``x``; it lies in the face of ``x``.
"""
from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from backend.core.combinatorial_map import CombinatorialMap, build_map
from backend.core.errors import InvalidCurve, MultisectionError, TargetMissing


class MapEditor:

    def __init__(self, cmap: Optional[CombinatorialMap] = None):
        self.alpha: List[int] = list(cmap.alpha) if cmap else []
        self.rot: List[int] = list(cmap.rot) if cmap else []
        self.rot_inv: List[int] = list(cmap.rot_inverse) if cmap else []
        self.live: List[bool] = [True] * len(self.alpha)
        self.paths: Dict[str, List[int]] = {}
        # dart -> panel index, -1 for tubes; optional bookkeeping for renderers
        self.panel: List[int] = [0] * len(self.alpha)

    # -- bookkeeping -----------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.alpha)

    def _new_darts(self, count: int, panel: int = -1) -> List[int]:
        start = len(self.alpha)
        for d in range(start, start + count):
            self.alpha.append(d)
            self.rot.append(d)
            self.rot_inv.append(d)
            self.live.append(True)
            self.panel.append(panel)
        return list(range(start, start + count))

    def _link(self, a: int, b: int) -> None:
        self.rot[a] = b
        self.rot_inv[b] = a

    def _require(self, d: int) -> None:
        if d < 0 or d >= len(self.alpha) or not self.live[d]:
            raise TargetMissing(f"dart {d} does not exist")

    def phi(self, d: int) -> int:
        return self.rot[self.alpha[d]]

    def face_walk(self, d: int) -> List[int]:
        walk = [d]
        e = self.phi(d)
        while e != d:
            walk.append(e)
            e = self.phi(e)
        return walk

    def vertex_darts(self, d: int) -> List[int]:
        cycle = [d]
        e = self.rot[d]
        while e != d:
            cycle.append(e)
            e = self.rot[e]
        return cycle

    def same_face(self, a: int, b: int) -> bool:
        return b in self.face_walk(a)

    def same_vertex(self, a: int, b: int) -> bool:
        return b in self.vertex_darts(a)

    # -- paths ---------------------------------------------------------------

    def track(self, key: str, darts: Sequence[int]) -> None:
        self.paths[key] = list(darts)

    def path(self, key: str) -> List[int]:
        return list(self.paths[key])

    def reversed_path(self, key: str) -> List[int]:
        return [self.alpha[d] for d in reversed(self.paths[key])]

    # -- primitive edits -------------------------------------------------------

    def insert_before(self, x: int, u: int) -> None:
        prev = self.rot_inv[x]
        self._link(prev, u)
        self._link(u, x)

    def add_edge(self, x: int, y: int, require_split: bool = True) -> int:
        """New edge from the corner before ``x`` to the corner before ``y``.

        Returns the new dart ``u`` at the tail of ``x``; ``alpha[u]`` sits at the
        tail of ``y``. When both corners share a face the face is split.
        """
        self._require(x)
        self._require(y)
        if require_split and x != y and not self.same_face(x, y):
            raise InvalidCurve(f"corners before {x} and {y} are in different faces")
        u, ubar = self._new_darts(2, panel=self.panel[x])
        self.alpha[u], self.alpha[ubar] = ubar, u
        self.insert_before(x, u)
        self.insert_before(y, ubar)
        return u

    def subdivide(self, x: int) -> Tuple[int, int]:
        """Split the edge of ``x`` with a new degree-2 vertex.

        ``x`` keeps its tail and now ends at the new vertex; returns ``(p, q)``
        where ``p = alpha[x]`` and ``q`` continues to the old head. The corner
        before ``q`` is on the right of ``x``; the corner before ``p`` on its left.
        Tracked paths replace ``x`` by ``x, q`` and the old ``alpha[x]`` by ``alpha[x], p``.
        """
        self._require(x)
        xbar = self.alpha[x]
        p, q = self._new_darts(2, panel=self.panel[x])
        self._link(p, q)
        self._link(q, p)
        self.alpha[x], self.alpha[p] = p, x
        self.alpha[q], self.alpha[xbar] = xbar, q
        for key, darts in self.paths.items():
            if x not in darts and xbar not in darts:
                continue
            rewritten: List[int] = []
            for d in darts:
                rewritten.append(d)
                if d == x:
                    rewritten.append(q)
                elif d == xbar:
                    rewritten.append(p)
            self.paths[key] = rewritten
        return p, q

    def add_pendant(self, x: int) -> Tuple[int, int]:
        """Pendant edge in the corner before ``x``; returns ``(p, q)`` with ``q`` alone at the new vertex."""
        self._require(x)
        p, q = self._new_darts(2, panel=self.panel[x])
        self.alpha[p], self.alpha[q] = q, p
        self.insert_before(x, p)
        return p, q

    def add_slot(self, x: int) -> int:
        """Pendant monogon in the corner before ``x``.

        Returns the dart whose face is the monogon; it keeps that role under
        later subdivisions, so slot faces are tracked by this dart.
        """
        _, q = self.add_pendant(x)
        u = self.add_edge(q, q)
        return self.alpha[u]

    def delete_edge(self, d: int) -> None:
        self._require(d)
        for key, darts in self.paths.items():
            if d in darts or self.alpha[d] in darts:
                raise MultisectionError(f"cannot delete edge of dart {d}: it lies on tracked path {key}")
        for e in (d, self.alpha[d]):
            prev, nxt = self.rot_inv[e], self.rot[e]
            if prev != e:
                self._link(prev, nxt)
            self.live[e] = False
            self.rot[e] = e
            self.rot_inv[e] = e

    def split_vertex(self, group: Sequence[int]) -> int:
        """Pull a rotation-contiguous run of darts off its vertex onto a new one.

        ``group`` lists the darts in counterclockwise order. A new edge joins the
        two halves; returns its dart at the new vertex.
        """
        for d in group:
            self._require(d)
        first, last = group[0], group[-1]
        rest_first, rest_last = self.rot[last], self.rot_inv[first]
        if rest_first == first:
            raise InvalidCurve("cannot split off a whole vertex")
        for a, b in zip(group, group[1:]):
            if self.rot[a] != b:
                raise InvalidCurve("split group is not contiguous in the rotation")
        e_new, e_old = self._new_darts(2, panel=self.panel[first])
        self.alpha[e_new], self.alpha[e_old] = e_old, e_new
        self._link(last, e_new)
        self._link(e_new, first)
        self._link(rest_last, e_old)
        self._link(e_old, rest_first)
        return e_new

    def truncate_vertex(self, d: int) -> int:
        """Replace the vertex of ``d`` by a polygon face with one corner vertex per dart.

        Every old dart keeps its edge and moves to its own corner vertex, so
        tracked paths through the vertex open up there. Returns a dart whose
        face is the polygon; at the corner vertex of an old dart y the polygon
        side is the corner before ``rot_inv[y]``.
        """
        self._require(d)
        old = self.vertex_darts(d)
        k = len(old)
        fresh = self._new_darts(2 * k, panel=self.panel[d])
        ahead, behind = fresh[0::2], fresh[1::2]
        for i, y in enumerate(old):
            self.alpha[ahead[i]] = behind[(i + 1) % k]
            self.alpha[behind[(i + 1) % k]] = ahead[i]
            self._link(y, ahead[i])
            self._link(ahead[i], behind[i])
            self._link(behind[i], y)
        return behind[0]

    def append_map(self, cmap: CombinatorialMap, mirrored: bool = False, panel: int = -1) -> int:
        """Disjoint union with ``cmap``; returns the dart offset of the copy."""
        offset = len(self.alpha)
        new = self._new_darts(cmap.dart_count, panel=panel)
        rot = cmap.rot_inverse if mirrored else cmap.rot
        for d in range(cmap.dart_count):
            self.alpha[new[d]] = cmap.alpha[d] + offset
            self.rot[new[d]] = rot[d] + offset
        for d in range(cmap.dart_count):
            self.rot_inv[self.rot[new[d]]] = new[d]
        return offset

    # -- cutting ---------------------------------------------------------------

    def cut_curve(self, walk: Sequence[int]) -> Tuple[int, int]:
        """Cut along a simple closed walk and cap both sides with a face.

        The original darts of the walk form the left copy, fresh darts the
        right copy. Returns ``(left_hole_dart, right_hole_dart)``: darts whose
        faces are the two caps.
        """
        length = len(walk)
        right = self._new_darts(2 * length)
        out_r = {walk[t]: right[2 * t] for t in range(length)}
        in_r = {self.alpha[walk[t]]: right[2 * t + 1] for t in range(length)}
        for t in range(length):
            d = walk[t]
            dr, ar = out_r[d], in_r[self.alpha[d]]
            self.alpha[dr], self.alpha[ar] = ar, dr
        for t in range(length):
            d = walk[t]
            a = self.alpha[walk[t - 1]]
            left_first = self.rot[d]
            right_first = self.rot[a]
            right_last = self.rot_inv[d]
            dr, ar = out_r[d], in_r[a]
            # left vertex keeps d, sector darts, a
            self._link(a, d)
            # right vertex: ar, sector darts, dr
            if right_first == d:
                self._link(ar, dr)
            else:
                self._link(ar, right_first)
                self._link(right_last, dr)
            self._link(dr, ar)
        return walk[0], in_r[self.alpha[walk[-1]]]

    # -- output --------------------------------------------------------------

    def freeze(self, require_connected: bool = True) -> Tuple[CombinatorialMap, Dict[int, int]]:
        """Compact live darts (order preserved) and return the map plus the renumbering."""
        remap: Dict[int, int] = {}
        for d in range(len(self.alpha)):
            if self.live[d]:
                remap[d] = len(remap)
        alpha = [0] * len(remap)
        rot = [0] * len(remap)
        for d, nd in remap.items():
            alpha[nd] = remap[self.alpha[d]]
            rot[nd] = remap[self.rot[d]]
        return build_map(alpha, rot, require_connected=require_connected), remap

    def frozen_path(self, key: str, remap: Dict[int, int]) -> List[int]:
        return [remap[d] for d in self.paths[key]]

    def frozen_panels(self, remap: Dict[int, int]) -> List[int]:
        panels = [0] * len(remap)
        for d, nd in remap.items():
            panels[nd] = self.panel[d]
        return panels


def route_chord(editor: MapEditor, start: int, end: int, crossable: Set[int]) -> List[int]:
    """Chord from the corner before ``start`` to the one before ``end``.

    The route is a shortest face path that crosses only edges whose darts are
    in ``crossable``; each crossed edge is subdivided and the chord passes
    through the new vertex. Returns the chord darts in order.
    """
    def face_key(d: int) -> int:
        return min(editor.face_walk(d))

    goal = face_key(end)
    came: Dict[int, Optional[Tuple[int, int]]] = {face_key(start): None}
    queue = deque([start])
    while queue and goal not in came:
        d = queue.popleft()
        here = face_key(d)
        for y in editor.face_walk(d):
            if y not in crossable:
                continue
            there = face_key(editor.alpha[y])
            if there not in came:
                came[there] = (here, y)
                queue.append(editor.alpha[y])
    if goal not in came:
        raise InvalidCurve(f"no chord from dart {start} to dart {end} through crossable edges")
    crossed: List[int] = []
    key = goal
    while came[key] is not None:
        key, y = came[key]
        crossed.append(y)
    darts: List[int] = []
    cur = start
    for y in reversed(crossed):
        p, q = editor.subdivide(y)
        darts.append(editor.add_edge(cur, q))
        cur = p
    darts.append(editor.add_edge(cur, end))
    return darts


def realize_boundary(editor: MapEditor, subgraph: Iterable[int], start: int, key: Optional[str] = None) -> List[int]:
    """Realize the boundary component of a regular neighbourhood of a subgraph.

    ``subgraph`` is a dart set closed under alpha. The realized curve runs along
    the right-hand side of the walk ``start, phi_X(start), ...`` where
    ``phi_X(d)`` is the next subgraph dart counterclockwise after ``alpha[d]``.
    Every non-subgraph dart met on that side is subdivided once and the
    crossing points are joined by chords. Returns the new curve's darts.
    """
    xset = set(subgraph)
    if start not in xset:
        raise InvalidCurve(f"start dart {start} is not in the subgraph")
    for d in xset:
        if editor.alpha[d] not in xset:
            raise InvalidCurve("subgraph must be closed under alpha")

    def rot_x(d: int) -> int:
        e = editor.rot[d]
        while e not in xset:
            e = editor.rot[e]
        return e

    orbit = [start]
    nxt = rot_x(editor.alpha[start])
    while nxt != start:
        orbit.append(nxt)
        nxt = rot_x(editor.alpha[nxt])

    crossed: List[int] = []
    for j, y in enumerate(orbit):
        follow = orbit[(j + 1) % len(orbit)]
        e = editor.rot[editor.alpha[y]]
        while e != follow:
            crossed.append(e)
            e = editor.rot[e]

    if not crossed:
        # nothing to cross: plant a pendant on the right side to anchor the curve
        p, _ = editor.add_pendant(orbit[1 % len(orbit)])
        crossed.append(p)

    points = [editor.subdivide(z) for z in crossed]
    curve: List[int] = []
    for i, (p_i, _) in enumerate(points):
        _, q_next = points[(i + 1) % len(points)]
        curve.append(editor.add_edge(p_i, q_next))
    if key is not None:
        editor.track(key, curve)
    return curve
