from pydantic import BaseModel, ConfigDict, Field
from typing import Dict, List, Optional, Tuple

from backend.core.combinatorial_map import CombinatorialMap


class SimplicialComplex(BaseModel):
    """
    Abstract simplicial complex stored as its full face-closed simplex list.
    Simplices are sorted vertex tuples; ``origin`` (set on barycentric
    subdivisions) maps vertex i to the simplex of the parent complex whose
    barycenter it is.
    """
    model_config = ConfigDict(frozen=True)

    simplices: Tuple[Tuple[int, ...], ...]
    origin: Optional[Tuple[Tuple[int, ...], ...]] = None
    name: str = ""

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    @property
    def vertices(self) -> List[int]:
        return sorted(s[0] for s in self.simplices if len(s) == 1)

    def of_dimension(self, k: int) -> List[Tuple[int, ...]]:
        return [s for s in self.simplices if len(s) == k + 1]

    @property
    def facets(self) -> List[Tuple[int, ...]]:
        top = self.dimension
        return self.of_dimension(top)

    @property
    def f_vector(self) -> List[int]:
        counts = [0] * (self.dimension + 1)
        for s in self.simplices:
            counts[len(s) - 1] += 1
        return counts

    @property
    def euler(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.f_vector))


class StratumComponent(BaseModel):
    """One connected component of an intersection M_I."""
    dimension: int
    euler: int
    connected: bool = True
    points: Tuple[int, ...] = ()                      # full-intersection points in its closure
    simplices: Optional[Tuple[Tuple[int, ...], ...]] = None


class Stratum(BaseModel):
    indices: Tuple[int, ...]
    components: List[StratumComponent] = Field(default_factory=list)


class GoodBallDecomposition(BaseModel):
    """
    Decomposition of a closed d-manifold into pieces M_0..M_{p-1} with the
    components of every non-empty intersection M_I recorded.
    """
    base: str                      # "simplicial" | "SPHERE(m)" | "RPN(n)" | "S2xS1"
    dimension: int
    piece_count: int
    base_euler: int
    strata: List[Stratum] = Field(default_factory=list)
    complex: Optional[SimplicialComplex] = None

    def stratum(self, indices: Tuple[int, ...]) -> Stratum:
        for s in self.strata:
            if s.indices == tuple(indices):
                return s
        raise KeyError(f"no stratum {indices}")

    @property
    def full_stratum(self) -> Stratum:
        return self.stratum(tuple(range(self.piece_count)))


class BaseEdge(BaseModel):
    color: int
    ends: Tuple[int, int]


class BaseGraph(BaseModel):
    """
    Vertices are the points of the full intersection, edges the interval
    components of the codimension-one intersections coloured by the omitted piece.
    """
    vertex_count: int
    colors: int
    edges: List[BaseEdge] = Field(default_factory=list)
    simple: bool = True
    problems: List[str] = Field(default_factory=list)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def incident(self, v: int, color: int) -> List[int]:
        """Indices of edges of ``color`` with an end at v (a loop counts twice)."""
        found = []
        for i, e in enumerate(self.edges):
            if e.color == color:
                found.extend(i for end in e.ends if end == v)
        return found


class BallCheck(BaseModel):
    indices: Tuple[int, ...]
    component: int
    expected_dimension: int
    dimension: int
    connected: bool
    euler: int
    collapse: str                  # "collapsible" | "inconclusive" | "n/a"

    @property
    def passed(self) -> bool:
        return self.connected and self.dimension == self.expected_dimension and self.euler == 1


class BallLikenessReport(BaseModel):
    base: str
    valid: bool
    checks: List[BallCheck] = Field(default_factory=list)
    euler_consistent: bool = True

    def failures(self) -> List[BallCheck]:
        return [c for c in self.checks if not c.passed]


class ArcSystem(BaseModel):
    """Disjoint properly embedded arcs (dart paths) cutting a punctured panel into a disk."""
    arcs: List[Tuple[int, ...]] = Field(default_factory=list)
    puncture: int = 0
    targets: Dict[int, int] = Field(default_factory=dict)   # arc index -> puncture it ends on


class Monodromy(BaseModel):
    """
    Return map of a bundle over the circle: ``sigma`` permutes fiber families
    (1-based images) and ``phi`` is a dart permutation of the fiber map, or
    None for the identity.
    """
    model_config = ConfigDict(frozen=True)

    sigma: Tuple[int, ...]
    phi: Optional[Tuple[int, ...]] = None

    @property
    def is_identity(self) -> bool:
        return self.phi is None or all(i == x for i, x in enumerate(self.phi))

    def apply(self, dart: int) -> int:
        return dart if self.phi is None else self.phi[dart]

    @classmethod
    def identity(cls, rows: int) -> "Monodromy":
        return cls(sigma=tuple(range(1, rows + 1)))


class PunctureAssignment(BaseModel):
    """Dart of each puncture face in a panel map, keyed by puncture name."""
    faces: Dict[str, int] = Field(default_factory=dict)
    map: Optional[CombinatorialMap] = None
