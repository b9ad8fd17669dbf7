"""
Good ball decompositions of base manifolds.

A decomposition records, for every non-empty set I of pieces, the
components of M_I. The star construction computes them from a
triangulation; spheres, real projective spaces and S^2×S^1 come from
closed-form models. The base graph (points of the full intersection
joined by the coloured interval strata) feeds the bundle generators.
"""
import heapq
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx
import pandas as pd

from backend.core.errors import NotSimple
from backend.data.models import (
    BallCheck,
    BallLikenessReport,
    BaseEdge,
    BaseGraph,
    GoodBallDecomposition,
    SimplicialComplex,
    Stratum,
    StratumComponent,
)
from backend.data.simplicial import barycentric_subdivision, check_closed_manifold

Simplex = Tuple[int, ...]


def _subsets(count: int) -> List[Tuple[int, ...]]:
    return [I for k in range(1, count + 1) for I in combinations(range(count), k)]


# ---------------------------------------------------------------------------
# Star construction
# ---------------------------------------------------------------------------

def _components(simplices: List[Simplex]) -> List[List[Simplex]]:
    graph = nx.Graph()
    for s in simplices:
        graph.add_node(s[0])
        if len(s) == 2:
            graph.add_edge(*s)
    owner: Dict[int, int] = {}
    comps = sorted(nx.connected_components(graph), key=min)
    for i, comp in enumerate(comps):
        for v in comp:
            owner[v] = i
    grouped: List[List[Simplex]] = [[] for _ in comps]
    for s in simplices:
        grouped[owner[s[0]]].append(s)
    return grouped


def _component_of(simplices: List[Simplex]) -> StratumComponent:
    counts: Dict[int, int] = {}
    for s in simplices:
        counts[len(s) - 1] = counts.get(len(s) - 1, 0) + 1
    euler = sum((-1) ** k * c for k, c in counts.items())
    return StratumComponent(dimension=max(counts), euler=euler, simplices=tuple(simplices))


def star_decomposition(t: SimplicialComplex, labels: Optional[Sequence[int]] = None) -> GoodBallDecomposition:
    """
    M_i is the union of the stars, in the second barycentric subdivision, of
    the barycenters of the i-simplices of T. ``labels`` maps simplex
    dimension to piece label; equal labels merge pieces.
    """
    check_closed_manifold(t)
    d = t.dimension
    labels = list(range(d + 1)) if labels is None else list(labels)
    pieces = sorted(set(labels))
    piece_of = {dim: pieces.index(lab) for dim, lab in enumerate(labels)}

    t1 = barycentric_subdivision(t)
    t2 = barycentric_subdivision(t1)
    color = [piece_of[len(s) - 1] for s in t1.origin]

    # a chain of T¹ simplices lies in the stars of exactly the vertices of its smallest member
    colors_of: Dict[Simplex, frozenset] = {}
    for s in t2.simplices:
        carrier = min((t2.origin[u] for u in s), key=len)
        colors_of[s] = frozenset(color[w] for w in carrier)

    strata: List[Stratum] = []
    full = tuple(range(len(pieces)))
    point_ids: Dict[int, int] = {}
    raw: Dict[Tuple[int, ...], List[List[Simplex]]] = {}
    for indices in _subsets(len(pieces)):
        wanted = set(indices)
        raw[indices] = _components([s for s in t2.simplices if wanted <= colors_of[s]])
    for i, comp in enumerate(raw[full]):
        for s in comp:
            if len(s) == 1:
                point_ids.setdefault(s[0], i)
    for indices in _subsets(len(pieces)):
        comps = []
        for simplices in raw[indices]:
            comp = _component_of(simplices)
            verts = {s[0] for s in simplices if len(s) == 1}
            points = tuple(sorted({point_ids[v] for v in verts if v in point_ids}))
            comps.append(comp.model_copy(update={"points": points}))
        strata.append(Stratum(indices=indices, components=comps))
    return GoodBallDecomposition(base="simplicial", dimension=d, piece_count=len(pieces),
                                 base_euler=t.euler, strata=strata, complex=t2)


# ---------------------------------------------------------------------------
# Closed-form decompositions
# ---------------------------------------------------------------------------

def sphere_decomposition(m: int) -> GoodBallDecomposition:
    """S^m into m+1 balls: every proper intersection one ball, the full one two points."""
    if m < 1:
        raise ValueError("sphere dimension must be at least 1")
    pieces = m + 1
    strata = []
    for indices in _subsets(pieces):
        if len(indices) == pieces:
            comps = [StratumComponent(dimension=0, euler=1, points=(0,)),
                     StratumComponent(dimension=0, euler=1, points=(1,))]
        else:
            comps = [StratumComponent(dimension=m - len(indices) + 1, euler=1, points=(0, 1))]
        strata.append(Stratum(indices=indices, components=comps))
    return GoodBallDecomposition(base=f"SPHERE({m})", dimension=m, piece_count=pieces,
                                 base_euler=1 + (-1) ** m, strata=strata)


def _normalize(signs: Tuple[int, ...]) -> Tuple[int, ...]:
    return signs if signs[0] > 0 else tuple(-s for s in signs)


def rpn_decomposition(n: int) -> GoodBallDecomposition:
    """
    RP^n into n+1 pieces M_i = {|x_i| ≥ |x_j| for all j}. A component of M_I
    is a sign pattern on the coordinates in I up to global sign.
    """
    if n < 2:
        raise ValueError("rpn_decomposition needs n >= 2")
    pieces = n + 1
    points = sorted({_normalize(s) for s in product((1, -1), repeat=pieces)}, reverse=True)
    strata = []
    for indices in _subsets(pieces):
        k = len(indices)
        classes = sorted({_normalize(s) for s in product((1, -1), repeat=k)}, reverse=True)
        comps = []
        for cls in classes:
            closure = tuple(i for i, p in enumerate(points)
                            if _normalize(tuple(p[j] for j in indices)) == cls)
            comps.append(StratumComponent(dimension=n - k + 1, euler=1, points=closure))
        strata.append(Stratum(indices=indices, components=comps))
    return GoodBallDecomposition(base=f"RPN({n})", dimension=n, piece_count=pieces,
                                 base_euler=(1 - (-1) ** (n + 1)) // 2, strata=strata)


def _s2xs1_walls() -> Tuple[Dict[int, List[Tuple[int, int]]], Dict[int, List[int]]]:
    """
    The equator torus of S^2×S^1 carries two walls between pieces 0 and 1 and
    two walls between pieces 2 and 3; every wall of the first pair crosses
    every wall of the second pair twice. Point p(a, b, r) has id 4a + 2b + r.
    Returns the interval strata by omitted piece (as endpoint pairs) and the
    points on each wall.
    """
    def p(a: int, b: int, r: int) -> int:
        return 4 * a + 2 * b + r

    intervals: Dict[int, List[Tuple[int, int]]] = {c: [] for c in range(4)}
    walls: Dict[int, List[int]] = {}
    for a in range(2):
        ring = [p(a, 0, 0), p(a, 1, 0), p(a, 0, 1), p(a, 1, 1)]
        walls[a] = ring
        for t in range(4):
            # arcs of a 0|1 wall alternate between pieces 2 and 3
            omitted = 3 if t % 2 == 0 else 2
            intervals[omitted].append((ring[t], ring[(t + 1) % 4]))
    for b in range(2):
        ring = [p(0, b, 0), p(1, b, 0), p(0, b, 1), p(1, b, 1)]
        walls[2 + b] = ring
        for t in range(4):
            omitted = 1 if t % 2 == 0 else 0
            intervals[omitted].append((ring[t], ring[(t + 1) % 4]))
    return intervals, walls


def s2xs1_decomposition() -> GoodBallDecomposition:
    """Each hemisphere × S^1 split into two balls by two walls; 8 points, 16 intervals."""
    intervals, walls = _s2xs1_walls()
    strata = []
    for indices in _subsets(4):
        k = len(indices)
        if k == 1:
            comps = [StratumComponent(dimension=3, euler=1)]
        elif k == 2 and set(indices) in ({0, 1}, {2, 3}):
            offset = 0 if indices == (0, 1) else 2
            comps = [StratumComponent(dimension=2, euler=1, points=tuple(sorted(walls[offset + w])))
                     for w in range(2)]
        elif k == 2:
            # faces of the equator torus cut by the four walls
            comps = [StratumComponent(dimension=2, euler=1) for _ in range(2)]
        elif k == 3:
            omitted = ({0, 1, 2, 3} - set(indices)).pop()
            comps = [StratumComponent(dimension=1, euler=1, points=ends) for ends in intervals[omitted]]
        else:
            comps = [StratumComponent(dimension=0, euler=1, points=(i,)) for i in range(8)]
        strata.append(Stratum(indices=indices, components=comps))
    return GoodBallDecomposition(base="S2xS1", dimension=3, piece_count=4, base_euler=0, strata=strata)


# ---------------------------------------------------------------------------
# Checks and derived data
# ---------------------------------------------------------------------------

def inclusion_exclusion_euler(gbd: GoodBallDecomposition) -> int:
    total = 0
    for stratum in gbd.strata:
        sign = 1 if len(stratum.indices) % 2 == 1 else -1
        total += sign * sum(c.euler for c in stratum.components)
    return total


def _faces(s: Simplex) -> List[Simplex]:
    return [s[:i] + s[i + 1:] for i in range(len(s))] if len(s) > 1 else []


def greedy_collapse(simplices: Sequence[Simplex]) -> bool:
    """Elementary collapses, smallest free face first; True when a single vertex remains."""
    alive: Set[Simplex] = set(simplices)
    cofaces: Dict[Simplex, Set[Simplex]] = {s: set() for s in alive}
    for s in alive:
        for f in _faces(s):
            if f in cofaces:
                cofaces[f].add(s)
    heap = [(len(s), s) for s in alive if len(cofaces[s]) == 1]
    heapq.heapify(heap)
    while heap:
        _, sigma = heapq.heappop(heap)
        if sigma not in alive or len(cofaces[sigma]) != 1:
            continue
        tau = next(iter(cofaces[sigma]))
        if cofaces[tau]:
            continue
        alive.discard(sigma)
        alive.discard(tau)
        touched = set()
        for gone in (tau, sigma):
            for f in _faces(gone):
                if f in alive:
                    cofaces[f].discard(gone)
                    touched.add(f)
        for f in touched:
            for g in [f] + _faces(f):
                if g in alive and len(cofaces[g]) == 1:
                    heapq.heappush(heap, (len(g), g))
    return len(alive) == 1


def validate_ball_likeness(gbd: GoodBallDecomposition) -> BallLikenessReport:
    """Dimension, connectivity and χ=1 per stratum component, plus a greedy collapsibility certificate."""
    checks = []
    for stratum in gbd.strata:
        expected = gbd.dimension - len(stratum.indices) + 1
        for i, comp in enumerate(stratum.components):
            if comp.simplices is None:
                collapse = "n/a"
            else:
                collapse = "collapsible" if greedy_collapse(comp.simplices) else "inconclusive"
            checks.append(BallCheck(indices=stratum.indices, component=i, expected_dimension=expected,
                                    dimension=comp.dimension, connected=comp.connected,
                                    euler=comp.euler, collapse=collapse))
    consistent = inclusion_exclusion_euler(gbd) == gbd.base_euler
    valid = consistent and all(c.passed for c in checks)
    return BallLikenessReport(base=gbd.base, valid=valid, checks=checks, euler_consistent=consistent)


def stratum_table(gbd: GoodBallDecomposition) -> pd.DataFrame:
    rows = []
    for stratum in gbd.strata:
        for i, comp in enumerate(stratum.components):
            rows.append({
                "stratum": ",".join(str(x) for x in stratum.indices),
                "size": len(stratum.indices),
                "component": i,
                "dimension": comp.dimension,
                "expected_dimension": gbd.dimension - len(stratum.indices) + 1,
                "euler": comp.euler,
                "points": len(comp.points),
            })
    return pd.DataFrame(rows)


def extract_base_graph(gbd: GoodBallDecomposition) -> BaseGraph:
    """Points of the full intersection joined by the coloured interval components."""
    pieces = gbd.piece_count
    full = gbd.full_stratum
    problems: List[str] = []
    if any(c.dimension != 0 for c in full.components):
        problems.append("full intersection is not a finite point set")
    edges: List[BaseEdge] = []
    for color in range(pieces):
        indices = tuple(i for i in range(pieces) if i != color)
        if not indices:
            continue
        for j, comp in enumerate(gbd.stratum(indices).components):
            if len(comp.points) != 2:
                problems.append(f"interval {j} of colour {color} has {len(comp.points)} endpoints")
                continue
            edges.append(BaseEdge(color=color, ends=(comp.points[0], comp.points[1])))
    graph = BaseGraph(vertex_count=len(full.components), colors=pieces, edges=edges)
    problems.extend(end_problems(graph))
    return graph.model_copy(update={"simple": not problems, "problems": problems})


def end_problems(graph: BaseGraph) -> List[str]:
    """Every vertex needs exactly one edge end of every colour."""
    problems = []
    for v in range(graph.vertex_count):
        for color in range(graph.colors):
            ends = len(graph.incident(v, color))
            if ends != 1:
                problems.append(f"vertex {v} has {ends} edge ends of colour {color}")
    return problems


def require_simple(graph: BaseGraph) -> None:
    problems = end_problems(graph) if graph.simple else (list(graph.problems) or ["graph is flagged as not simple"])
    if problems:
        raise NotSimple("; ".join(problems[:3]))


def graph_is_connected(graph: BaseGraph) -> bool:
    g = nx.MultiGraph()
    g.add_nodes_from(range(graph.vertex_count))
    g.add_edges_from(e.ends for e in graph.edges)
    return graph.vertex_count > 0 and nx.is_connected(g)


def predicted_genus(graph: BaseGraph, g: int) -> int:
    """Genus of the central surface: one genus-g panel per point, one tube per interval."""
    return graph.vertex_count * g + graph.edge_count - graph.vertex_count + 1
