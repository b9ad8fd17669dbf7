"""
Diagram controller

Facade between the command line and the library: builds diagrams and schemes
from ``key=value`` parameters, loads fixtures, runs validation and moves, and
reports every step to the audit trail.
"""
import os
from typing import Dict, List, Optional, Tuple, Union

from backend.api.complex_format import read_complex
from backend.api.msd_format import read_diagram
from backend.core.audit_logger import AuditLogger
from backend.core.diagram_models import (
    InvariantSummary,
    MultisectionDiagram,
    Scheme,
    SchemeReport,
    SlideScript,
    SlideStep,
    StabilizationWitness,
    ValidationReport,
)
from backend.core.diagram_ops import gen1_sphere_diagram, intersection_matrix, validate_diagram
from backend.core.errors import MultisectionError, Unsupported
from backend.core.homology import family_rank
from backend.core.isomorphism import diagrams_isomorphic
from backend.core.move_engine import MoveEngine
from backend.data.bundle_gen import circle_bundle_diagram, sphere_base_bundle_diagram, twisted_w_m
from backend.data.config import GENERATOR_CONFIG
from backend.data.fiber_fixtures import cp2_trisection, s2xs2_trisection
from backend.data.goodball import (
    extract_base_graph,
    predicted_genus,
    rpn_decomposition,
    s2xs1_decomposition,
    sphere_decomposition,
    star_decomposition,
    stratum_table,
    validate_ball_likeness,
)
from backend.data.models import GoodBallDecomposition, Monodromy
from backend.data.schemes import parse_sigma, scheme_for_sigma, scheme_validate

Generated = Union[MultisectionDiagram, Scheme, GoodBallDecomposition]

BUILTIN_FIBERS = {"cp2": cp2_trisection, "s2xs2": s2xs2_trisection}


def _int(params: Dict[str, str], key: str, default: Optional[int] = None) -> int:
    if key not in params:
        if default is None:
            raise Unsupported(f"missing parameter {key}=")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise Unsupported(f"parameter {key}= must be an integer, got {params[key]!r}")


def fixture_path(name: str) -> str:
    return os.path.join(GENERATOR_CONFIG["fixtures_dir"], GENERATOR_CONFIG["fixtures"][name])


class DiagramController:
    """One instance per CLI run; the move engine shares its audit logger."""

    def __init__(self, audit_logger: Optional[AuditLogger] = None):
        self.audit = audit_logger
        self.moves = MoveEngine(audit_logger)

    # ------------------------------------------------------------------
    # Loading
    # ------------------------------------------------------------------

    def load_fiber(self, ref: str) -> MultisectionDiagram:
        """A built-in fiber name (cp2, s2xs2), a shipped fixture file name or a path."""
        if ref in BUILTIN_FIBERS:
            return BUILTIN_FIBERS[ref]()
        if not os.path.exists(ref) and os.path.exists(os.path.join(GENERATOR_CONFIG["fixtures_dir"], ref)):
            ref = os.path.join(GENERATOR_CONFIG["fixtures_dir"], ref)
        return read_diagram(ref)

    # ------------------------------------------------------------------
    # Generation
    # ------------------------------------------------------------------

    def generate(self, kind: str, params: Dict[str, str], correlation_id: Optional[str] = None) -> Generated:
        if kind == "gen1-sphere":
            result: Generated = gen1_sphere_diagram(_int(params, "n"), _int(params, "k"))
        elif kind == "sphere-bundle":
            result = sphere_base_bundle_diagram(_int(params, "n"), _int(params, "g", 0))
        elif kind == "w-twist":
            result = twisted_w_m(_int(params, "m"))
        elif kind == "circle-bundle":
            result = self._circle_bundle(params)
        elif kind == "scheme":
            result = self.scheme(params)
        elif kind == "goodball":
            result = self.goodball(params)
        else:
            raise Unsupported(f"unknown kind {kind!r}")
        if self.audit and isinstance(result, MultisectionDiagram):
            self.audit.log_diagram_generated(result, correlation_id)
        return result

    def scheme(self, params: Dict[str, str]) -> Scheme:
        n = _int(params, "n", 0)
        sigma = parse_sigma(params.get("sigma", "id"), rows=n - 1 if n else None)
        return scheme_for_sigma(sigma, params.get("layout", "stack"))

    def _circle_bundle(self, params: Dict[str, str]) -> MultisectionDiagram:
        fiber = self.load_fiber(params.get("fiber", "cp2"))
        sigma = parse_sigma(params.get("sigma", "id"), rows=fiber.n)
        phi = None
        if "phi" in params:
            phi = tuple(int(t) for t in params["phi"].split(","))
        mono = Monodromy(sigma=sigma, phi=phi)
        identity = all(s == i for i, s in enumerate(sigma, start=1))
        layout = params.get("layout", "zigzag" if identity else "stack")
        return circle_bundle_diagram(fiber, mono, scheme_for_sigma(sigma, layout))

    def goodball(self, params: Dict[str, str]) -> GoodBallDecomposition:
        base = params.get("base", "sphere")
        if base == "sphere":
            return sphere_decomposition(_int(params, "m", 2))
        if base == "rpn":
            return rpn_decomposition(_int(params, "n", 2))
        if base == "s2xs1":
            return s2xs1_decomposition()
        if base == "complex":
            path = params.get("file", fixture_path("boundary_tetrahedron"))
            labels = [int(t) for t in params["labels"].split(",")] if "labels" in params else None
            return star_decomposition(read_complex(path), labels)
        raise Unsupported(f"unknown good ball base {base!r}")

    # ------------------------------------------------------------------
    # Checks and summaries
    # ------------------------------------------------------------------

    def validate(self, d: MultisectionDiagram, expected_n: Optional[int] = None,
                 correlation_id: Optional[str] = None) -> ValidationReport:
        report = validate_diagram(d, expected_n)
        if self.audit:
            self.audit.log_validation(report, correlation_id)
        return report

    def validate_scheme(self, s: Scheme, correlation_id: Optional[str] = None) -> SchemeReport:
        report = scheme_validate(s)
        if self.audit:
            self.audit.log_scheme_validated(report, correlation_id)
        return report

    def invariants(self, d: MultisectionDiagram) -> InvariantSummary:
        ranks = []
        for family in d.families:
            try:
                ranks.append(family_rank(d.map, family))
            except MultisectionError:
                ranks.append(-1)
        return InvariantSummary(
            name=d.name,
            genus=d.genus,
            n=d.n,
            family_sizes=[len(f) for f in d.families],
            family_ranks=ranks,
            map=d.map.summary(),
            intersection_matrix=intersection_matrix(d).values.tolist(),
        )

    def goodball_report(self, gbd: GoodBallDecomposition) -> str:
        report = validate_ball_likeness(gbd)
        graph = extract_base_graph(gbd)
        lines = [f"base: {gbd.base}", f"dimension: {gbd.dimension}", f"pieces: {gbd.piece_count}",
                 f"ball-like: {'yes' if report.valid else 'no'}",
                 f"base graph: v={graph.vertex_count} e={graph.edge_count} simple={'yes' if graph.simple else 'no'}"]
        if graph.simple:
            lines.append("predicted genus (g=0,1,2): " + " ".join(str(predicted_genus(graph, g)) for g in range(3)))
        lines.append(stratum_table(gbd).to_string(index=False))
        return "\n".join(lines) + "\n"

    # ------------------------------------------------------------------
    # Moves
    # ------------------------------------------------------------------

    def move(self, d: MultisectionDiagram, script: SlideScript) -> MultisectionDiagram:
        return self.moves.apply_script(d, script)

    def find_destab(self, d: MultisectionDiagram) -> List[StabilizationWitness]:
        return self.moves.find_witnesses(d)

    def enabling_slides(self, d: MultisectionDiagram, limit: int = 1) -> List[Tuple[SlideStep, int]]:
        if limit < 1:
            raise Unsupported(f"limit must be positive, got {limit}")
        return self.moves.find_slides(d, limit)

    def destab(self, d: MultisectionDiagram, witness: int = 0,
               correlation_id: Optional[str] = None) -> MultisectionDiagram:
        found = self.moves.find_witnesses(d)
        if not 0 <= witness < len(found):
            raise Unsupported(f"witness {witness} requested, {len(found)} found")
        return self.moves.destabilize(d, found[witness], correlation_id)

    def iso(self, d1: MultisectionDiagram, d2: MultisectionDiagram, unordered: bool = False) -> bool:
        return diagrams_isomorphic(d1, d2, unordered_families=unordered)
