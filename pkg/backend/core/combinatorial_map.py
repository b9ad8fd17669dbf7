"""
Combinatorial maps (rotation systems) on closed oriented surfaces.

A map is a pair of permutations on the darts ``0..D-1``:
  • alpha: fixed-point-free involution pairing the two darts of an edge
  • rot  : counterclockwise successor of a dart around its tail vertex

Derived cells:
  • vertices = rot-orbits
  • edges    = alpha-orbits
  • faces    = orbits of phi = rot∘alpha (phi(d) = rot[alpha[d]])

The face of ``d`` is the face lying to the right of ``d``; the corner between
``a`` and ``rot[a]`` belongs to the face of ``rot[a]``.
"""
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict

from backend.core.errors import AlphaFixedPoint, AlphaNotInvolution, Disconnected, MultisectionError


def _orbits(perm: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    """Cycles of a permutation, each starting at its least element, ordered by that element."""
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        d = start
        while not seen[d]:
            seen[d] = True
            cycle.append(d)
            d = perm[d]
        cycles.append(tuple(cycle))
    return tuple(cycles)


def _index_of(cycles: Tuple[Tuple[int, ...], ...], size: int) -> Tuple[int, ...]:
    index = [0] * size
    for i, cycle in enumerate(cycles):
        for d in cycle:
            index[d] = i
    return tuple(index)


class CombinatorialMap(BaseModel):
    """Immutable rotation system. Build through :func:`build_map` to get validation."""
    model_config = ConfigDict(frozen=True)

    alpha: Tuple[int, ...]
    rot: Tuple[int, ...]

    # -- sizes ---------------------------------------------------------------

    @property
    def dart_count(self) -> int:
        return len(self.alpha)

    @property
    def darts(self) -> range:
        return range(len(self.alpha))

    # -- derived permutations --------------------------------------------------

    @cached_property
    def rot_inverse(self) -> Tuple[int, ...]:
        inv = [0] * len(self.rot)
        for d, r in enumerate(self.rot):
            inv[r] = d
        return tuple(inv)

    @cached_property
    def phi(self) -> Tuple[int, ...]:
        return tuple(self.rot[self.alpha[d]] for d in self.darts)

    # -- cells ---------------------------------------------------------------

    @cached_property
    def vertices(self) -> Tuple[Tuple[int, ...], ...]:
        return _orbits(self.rot)

    @cached_property
    def faces(self) -> Tuple[Tuple[int, ...], ...]:
        return _orbits(self.phi)

    @cached_property
    def edges(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((d, self.alpha[d]) for d in self.darts if d < self.alpha[d])

    @cached_property
    def vertex_of(self) -> Tuple[int, ...]:
        return _index_of(self.vertices, self.dart_count)

    @cached_property
    def face_of(self) -> Tuple[int, ...]:
        return _index_of(self.faces, self.dart_count)

    def tail(self, d: int) -> int:
        return self.vertex_of[d]

    def head(self, d: int) -> int:
        return self.vertex_of[self.alpha[d]]

    def edge_key(self, d: int) -> int:
        return min(d, self.alpha[d])

    # -- invariants ------------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return self.dart_count // 2

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def euler(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    @cached_property
    def component_darts(self) -> Tuple[Tuple[int, ...], ...]:
        graph = nx.Graph()
        graph.add_nodes_from(self.darts)
        graph.add_edges_from((d, self.alpha[d]) for d in self.darts)
        graph.add_edges_from((d, self.rot[d]) for d in self.darts)
        comps = [tuple(sorted(c)) for c in nx.connected_components(graph)]
        return tuple(sorted(comps))

    @property
    def components(self) -> int:
        return len(self.component_darts)

    @property
    def genus(self) -> int:
        """Total genus: sum over connected components of (2 - chi_i) / 2."""
        return (2 * self.components - self.euler) // 2

    def summary(self) -> Dict[str, int]:
        return {
            "darts": self.dart_count,
            "vertices": self.vertex_count,
            "edges": self.edge_count,
            "faces": self.face_count,
            "euler": self.euler,
            "genus": self.genus,
            "components": self.components,
        }


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _check_permutation(name: str, perm: Sequence[int], size: int) -> None:
    if sorted(perm) != list(range(size)):
        raise MultisectionError(f"{name} is not a permutation of 0..{size - 1}")


def build_map(alpha: Sequence[int], rot: Sequence[int], require_connected: bool = True) -> CombinatorialMap:
    """Validate the two permutations and return the map."""
    size = len(alpha)
    if len(rot) != size:
        raise MultisectionError(f"alpha has {size} darts but rot has {len(rot)}")
    _check_permutation("alpha", alpha, size)
    _check_permutation("rot", rot, size)
    for d in range(size):
        if alpha[d] == d:
            raise AlphaFixedPoint(f"alpha fixes dart {d}")
        if alpha[alpha[d]] != d:
            raise AlphaNotInvolution(f"alpha(alpha({d})) = {alpha[alpha[d]]} != {d}")
    cmap = CombinatorialMap(alpha=tuple(alpha), rot=tuple(rot))
    if require_connected and cmap.components != 1:
        raise Disconnected(f"map has {cmap.components} components")
    return cmap


def map_from_cycles(pairs: Sequence[Tuple[int, int]], rotation: Sequence[Sequence[int]]) -> CombinatorialMap:
    """Build a map from edge pairs and vertex rotation cycles."""
    size = 2 * len(pairs)
    alpha = [-1] * size
    for a, b in pairs:
        alpha[a], alpha[b] = b, a
    rot = [-1] * size
    for cycle in rotation:
        for i, d in enumerate(cycle):
            rot[d] = cycle[(i + 1) % len(cycle)]
    if -1 in alpha or -1 in rot:
        raise MultisectionError("edge pairs and rotation cycles must cover every dart")
    return build_map(alpha, rot)


def sphere_map() -> CombinatorialMap:
    """The sphere as one vertex with a single loop (two monogon faces)."""
    return build_map([1, 0], [1, 0])


def surface_of_genus(g: int) -> CombinatorialMap:
    """One-vertex 4g-gon map for g >= 1, the one-loop sphere for g = 0."""
    if g < 0:
        raise MultisectionError("genus must be non-negative")
    if g == 0:
        return sphere_map()
    size = 4 * g
    alpha = [0] * size
    for i in range(g):
        a, b = 4 * i, 4 * i + 1
        alpha[a], alpha[a + 2] = a + 2, a
        alpha[b], alpha[b + 2] = b + 2, b
    rot = [(d + 1) % size for d in range(size)]
    return build_map(alpha, rot)


def grid_torus(p: int, q: int) -> CombinatorialMap:
    """Square p×q grid on the torus.

    Vertex ``v = i + p*j`` (column i, row j) owns darts ``4v + dir`` with
    dir E=0, N=1, W=2, S=3 in counterclockwise order.
    """
    if p < 1 or q < 1:
        raise MultisectionError("grid dimensions must be positive")
    size = 4 * p * q
    alpha = [0] * size
    rot = [0] * size
    for j in range(q):
        for i in range(p):
            v = i + p * j
            east = ((i + 1) % p) + p * j
            north = i + p * ((j + 1) % q)
            alpha[4 * v] = 4 * east + 2
            alpha[4 * east + 2] = 4 * v
            alpha[4 * v + 1] = 4 * north + 3
            alpha[4 * north + 3] = 4 * v + 1
            for k in range(4):
                rot[4 * v + k] = 4 * v + (k + 1) % 4
    return build_map(alpha, rot)


def mirror_map(cmap: CombinatorialMap) -> CombinatorialMap:
    """Same cells with the opposite orientation."""
    return CombinatorialMap(alpha=cmap.alpha, rot=cmap.rot_inverse)


def face_walk(cmap: CombinatorialMap, d: int) -> List[int]:
    """The face of ``d`` as a dart walk starting at ``d``."""
    walk = [d]
    e = cmap.phi[d]
    while e != d:
        walk.append(e)
        e = cmap.phi[e]
    return walk
