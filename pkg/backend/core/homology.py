"""
Mod-2 homology classes of curves.

Basis: tree-cotree decomposition with a lowest-dart-first BFS spanning tree
of the vertex graph and a lowest-dart-first BFS spanning tree of the dual
among the remaining edges. The 2g leftover edges each close a dual cycle; a
curve's class vector is its mod-2 crossing count with those dual cycles, so
face boundaries map to zero.
"""
from collections import deque
from functools import lru_cache
from typing import Dict, List, Sequence, Set, Tuple

import numpy as np

from backend.core.combinatorial_map import CombinatorialMap
from backend.core.curves import Curve


def _primal_tree(cmap: CombinatorialMap) -> Set[int]:
    tree: Set[int] = set()
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for d in sorted(cmap.vertices[v]):
            w = cmap.head(d)
            if w not in seen:
                seen.add(w)
                tree.add(cmap.edge_key(d))
                queue.append(w)
    return tree


def _dual_tree(cmap: CombinatorialMap, tree: Set[int]) -> Dict[int, Tuple[int, int]]:
    """face -> (parent face, edge key) for a BFS cotree avoiding ``tree``."""
    parent: Dict[int, Tuple[int, int]] = {0: (-1, -1)}
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for d in sorted(cmap.faces[f]):
            key = cmap.edge_key(d)
            if key in tree:
                continue
            other = cmap.face_of[cmap.alpha[d]]
            if other not in parent:
                parent[other] = (f, key)
                queue.append(other)
    return parent


def _path_to_root(parent: Dict[int, Tuple[int, int]], f: int) -> List[int]:
    edges = []
    while parent[f][0] != -1:
        f, key = parent[f]
        edges.append(key)
    return edges


class HomologyBasis:
    """Dual cycles, one per leftover edge, as sets of edge keys."""

    def __init__(self, cmap: CombinatorialMap):
        self.cmap = cmap
        tree = _primal_tree(cmap)
        parent = _dual_tree(cmap, tree)
        cotree = {key for _, key in parent.values() if key != -1}
        self.leftover = [key for key, _ in cmap.edges if key not in tree and key not in cotree]
        self.dual_cycles: List[Set[int]] = []
        for key in self.leftover:
            f1 = cmap.face_of[key]
            f2 = cmap.face_of[cmap.alpha[key]]
            walk = set(_path_to_root(parent, f1)) ^ set(_path_to_root(parent, f2))
            walk.add(key)
            self.dual_cycles.append(walk)

    @property
    def rank(self) -> int:
        return len(self.leftover)

    def class_vector(self, curve: Curve) -> np.ndarray:
        keys = [self.cmap.edge_key(d) for d in curve.darts]
        return np.array([sum(1 for k in keys if k in cycle) % 2 for cycle in self.dual_cycles], dtype=np.uint8)


@lru_cache(maxsize=32)
def _basis_for(cmap: CombinatorialMap) -> HomologyBasis:
    return HomologyBasis(cmap)


def h1_class_vector(cmap: CombinatorialMap, curve: Curve) -> np.ndarray:
    return _basis_for(cmap).class_vector(curve)


def gf2_rank(rows: Sequence[np.ndarray]) -> int:
    if not len(rows):
        return 0
    matrix = np.array(rows, dtype=np.uint8) % 2
    rank = 0
    n_rows, n_cols = matrix.shape
    for col in range(n_cols):
        pivot = None
        for r in range(rank, n_rows):
            if matrix[r, col]:
                pivot = r
                break
        if pivot is None:
            continue
        matrix[[rank, pivot]] = matrix[[pivot, rank]]
        for r in range(n_rows):
            if r != rank and matrix[r, col]:
                matrix[r] ^= matrix[rank]
        rank += 1
        if rank == n_rows:
            break
    return rank


def family_rank(cmap: CombinatorialMap, curves: Sequence[Curve]) -> int:
    basis = _basis_for(cmap)
    return gf2_rank([basis.class_vector(c) for c in curves])


def same_span(cmap: CombinatorialMap, first: Sequence[Curve], second: Sequence[Curve]) -> bool:
    basis = _basis_for(cmap)
    a = [basis.class_vector(c) for c in first]
    b = [basis.class_vector(c) for c in second]
    ra, rb = gf2_rank(a), gf2_rank(b)
    return ra == rb == gf2_rank(a + b)
