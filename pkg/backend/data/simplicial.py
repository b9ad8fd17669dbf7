"""
Simplicial complexes: closure, barycentric subdivision, links and the
closed-manifold sanity check used before building star decompositions.
"""
from itertools import combinations, permutations
from typing import Dict, Iterable, List, Sequence, Set, Tuple

import networkx as nx

from backend.core.errors import NotClosedManifold, Unsupported
from backend.data.config import GENERATOR_CONFIG
from backend.data.models import SimplicialComplex

Simplex = Tuple[int, ...]


def _order(simplices: Iterable[Simplex]) -> Tuple[Simplex, ...]:
    return tuple(sorted(simplices, key=lambda s: (len(s), s)))


def closure(facets: Iterable[Sequence[int]]) -> Tuple[Simplex, ...]:
    """Every non-empty face of every given simplex, ordered by (dimension, vertices)."""
    faces: Set[Simplex] = set()
    for facet in facets:
        top = tuple(sorted(set(facet)))
        for k in range(1, len(top) + 1):
            faces.update(combinations(top, k))
    limit = GENERATOR_CONFIG["max_complex_simplices"]
    if len(faces) > limit:
        raise Unsupported(f"complex has {len(faces)} simplices, limit is {limit}")
    return _order(faces)


def complex_from_facets(facets: Iterable[Sequence[int]], name: str = "") -> SimplicialComplex:
    return SimplicialComplex(simplices=closure(facets), name=name)


def boundary_simplex(d: int) -> SimplicialComplex:
    """The boundary of the (d+1)-simplex: a triangulated d-sphere on d+2 vertices."""
    return complex_from_facets(combinations(range(d + 2), d + 1), name=f"boundary-simplex-{d}")


def torus_complex() -> SimplicialComplex:
    """3×3 grid torus with one diagonal per square (9 vertices, 18 triangles)."""
    def v(i: int, j: int) -> int:
        return 3 * (i % 3) + (j % 3)

    facets = []
    for i in range(3):
        for j in range(3):
            facets.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            facets.append((v(i, j), v(i, j + 1), v(i + 1, j + 1)))
    return complex_from_facets(facets, name="torus")


def maximal_simplices(k: SimplicialComplex) -> List[Simplex]:
    covered: Set[Simplex] = set()
    for s in k.simplices:
        if len(s) > 1:
            covered.update(combinations(s, len(s) - 1))
    return [s for s in k.simplices if s not in covered]


def barycentric_subdivision(k: SimplicialComplex) -> SimplicialComplex:
    """
    Standard subdivision: vertex i is the barycenter of ``k.simplices[i]`` and
    simplices are chains under inclusion. A d-simplex splits into (d+1)! top cells.
    """
    index: Dict[Simplex, int] = {s: i for i, s in enumerate(k.simplices)}
    flags: Set[Simplex] = set()
    for top in maximal_simplices(k):
        for order in permutations(top):
            chain = [index[tuple(sorted(order[:j]))] for j in range(1, len(order) + 1)]
            flags.add(tuple(sorted(chain)))
    sub = closure(flags)
    name = f"sd({k.name})" if k.name else "sd"
    return SimplicialComplex(simplices=sub, origin=k.simplices, name=name)


def link(k: SimplicialComplex, v: int) -> SimplicialComplex:
    present = set(k.simplices)
    faces = [tuple(x for x in s if x != v) for s in k.simplices if v in s and len(s) > 1]
    faces = [f for f in faces if f in present]
    return SimplicialComplex(simplices=_order(faces), name=f"lk({v})")


def is_connected(k: SimplicialComplex) -> bool:
    graph = nx.Graph()
    graph.add_nodes_from(k.vertices)
    graph.add_edges_from(k.of_dimension(1))
    return graph.number_of_nodes() > 0 and nx.is_connected(graph)


def check_closed_manifold(k: SimplicialComplex) -> None:
    """Raise NotClosedManifold unless K is a pure, connected pseudomanifold whose vertex links are spheres by χ."""
    d = k.dimension
    if d < 1:
        raise NotClosedManifold("complex has no top cells of positive dimension")
    if maximal_simplices(k) != k.facets:
        raise NotClosedManifold("complex is not pure")
    if not is_connected(k):
        raise NotClosedManifold("complex is disconnected")
    incidence: Dict[Simplex, int] = {}
    for facet in k.facets:
        for ridge in combinations(facet, d):
            incidence[ridge] = incidence.get(ridge, 0) + 1
    for ridge, count in sorted(incidence.items()):
        if count != 2:
            raise NotClosedManifold(f"ridge {ridge} lies in {count} top cells")
    sphere_euler = 1 + (-1) ** (d - 1)
    for v in k.vertices:
        lk = link(k, v)
        if lk.euler != sphere_euler:
            raise NotClosedManifold(f"link of vertex {v} has χ={lk.euler}, expected {sphere_euler}")
