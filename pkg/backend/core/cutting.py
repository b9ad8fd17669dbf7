"""
Cutting a surface along disjoint simple closed curves.

Each cut curve is doubled, its vertices split by side and both sides capped
with a new face, so the pieces come back as closed maps whose marked hole
faces remember where they came from. Cut-system and parallelism tests are
read off the pieces.
"""
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from backend.core.combinatorial_map import CombinatorialMap, build_map
from backend.core.curves import Curve, are_disjoint, simplicity_problem, vertex_set
from backend.core.errors import CurvesNotDisjoint, InvalidCurve, NotDisjoint, TrackedHitsCutLocus
from backend.core.map_editor import MapEditor


class HoleRef(BaseModel):
    model_config = ConfigDict(frozen=True)

    curve_index: int
    side: str            # "left" | "right"
    dart: int            # a dart of the cap face in the component map


class BoundedComponent(BaseModel):
    model_config = ConfigDict(frozen=True)

    map: CombinatorialMap
    holes: Tuple[HoleRef, ...]
    tracked: Dict[str, Curve] = Field(default_factory=dict)

    @property
    def hole_count(self) -> int:
        return len(self.holes)

    @property
    def capped_genus(self) -> int:
        return self.map.genus

    @property
    def bounded_euler(self) -> int:
        """Euler characteristic of the piece with its holes left open."""
        return self.map.euler - self.hole_count


class CutVerdict(BaseModel):
    ok: bool
    reason: str = ""


def cut_along(
    cmap: CombinatorialMap,
    curves: Sequence[Curve],
    tracked: Optional[Dict[str, Curve]] = None,
) -> List[BoundedComponent]:
    """Cut along pairwise disjoint simple curves; pieces ordered by least original dart."""
    tracked = tracked or {}
    for c in curves:
        problem = simplicity_problem(cmap, c)
        if problem:
            raise InvalidCurve(problem)
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            if not are_disjoint(cmap, curves[i], curves[j]):
                raise CurvesNotDisjoint(f"cut curves {i} and {j} meet")
    locus = set()
    for c in curves:
        locus |= vertex_set(cmap, c)
    for name, t in tracked.items():
        if vertex_set(cmap, t) & locus:
            raise TrackedHitsCutLocus(f"tracked curve {name} meets the cut locus")

    editor = MapEditor(cmap)
    holes: List[Tuple[int, str, int]] = []
    for index, c in enumerate(curves):
        left, right = editor.cut_curve(c.darts)
        holes.append((index, "left", left))
        holes.append((index, "right", right))
    whole, _ = editor.freeze(require_connected=False)

    pieces = []
    for comp in whole.component_darts:
        local = {d: i for i, d in enumerate(comp)}
        alpha = [local[whole.alpha[d]] for d in comp]
        rot = [local[whole.rot[d]] for d in comp]
        piece = build_map(alpha, rot)
        refs = tuple(
            HoleRef(curve_index=i, side=side, dart=local[d])
            for i, side, d in holes
            if d in local
        )
        kept = {
            name: t.relabel(local)
            for name, t in tracked.items()
            if t.darts[0] in local
        }
        pieces.append(BoundedComponent(map=piece, holes=refs, tracked=kept))
    return pieces


def cut_system_verdict(cmap: CombinatorialMap, curves: Sequence[Curve]) -> CutVerdict:
    g = cmap.genus
    if cmap.components != 1:
        return CutVerdict(ok=False, reason="surface is not connected")
    if len(curves) != g:
        return CutVerdict(ok=False, reason=f"family has {len(curves)} curves, genus is {g}")
    for c in curves:
        problem = simplicity_problem(cmap, c)
        if problem:
            return CutVerdict(ok=False, reason=problem)
    try:
        pieces = cut_along(cmap, curves)
    except CurvesNotDisjoint as exc:
        return CutVerdict(ok=False, reason=exc.message)
    if len(pieces) != 1:
        return CutVerdict(ok=False, reason=f"cut disconnects the surface into {len(pieces)} pieces")
    piece = pieces[0]
    if piece.capped_genus != 0 or piece.hole_count != 2 * g:
        return CutVerdict(ok=False, reason=f"cut leaves genus {piece.capped_genus} with {piece.hole_count} holes")
    return CutVerdict(ok=True)


def is_cut_system(cmap: CombinatorialMap, curves: Sequence[Curve]) -> bool:
    return cut_system_verdict(cmap, curves).ok


def are_parallel(cmap: CombinatorialMap, c1: Curve, c2: Curve) -> bool:
    """True when the two curves cobound an annulus."""
    if not are_disjoint(cmap, c1, c2):
        raise NotDisjoint("parallelism needs disjoint curves")
    for piece in cut_along(cmap, [c1, c2]):
        sources = sorted(h.curve_index for h in piece.holes)
        if piece.capped_genus == 0 and sources == [0, 1]:
            return True
    return False
