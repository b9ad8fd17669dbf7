"""
Exception hierarchy shared by every layer.

Each error carries a human message and a stable ``code`` so the CLI and the
audit trail can report failures without parsing text.
"""
from typing import Optional


class MultisectionError(Exception):
    code = "MULTISECTION_ERROR"

    def __init__(self, message: str, line: Optional[int] = None):
        self.message = message
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


# ---------------------------------------------------------------------------
# surface-core
# ---------------------------------------------------------------------------

class AlphaNotInvolution(MultisectionError):
    code = "ALPHA_NOT_INVOLUTION"


class AlphaFixedPoint(MultisectionError):
    code = "ALPHA_FIXED_POINT"


class Disconnected(MultisectionError):
    code = "DISCONNECTED"


class TargetMissing(MultisectionError):
    code = "TARGET_MISSING"


class NotTransverse(MultisectionError):
    code = "NOT_TRANSVERSE"


class CurvesNotDisjoint(MultisectionError):
    code = "CURVES_NOT_DISJOINT"


class TrackedHitsCutLocus(MultisectionError):
    code = "TRACKED_HITS_CUT_LOCUS"


class NotDisjoint(MultisectionError):
    code = "NOT_DISJOINT"


class InvalidCurve(MultisectionError):
    code = "INVALID_CURVE"


# ---------------------------------------------------------------------------
# diagram-ops
# ---------------------------------------------------------------------------

class KOutOfRange(MultisectionError):
    code = "K_OUT_OF_RANGE"


class MismatchedN(MultisectionError):
    code = "MISMATCHED_N"


class FaceNotCurveFree(MultisectionError):
    code = "FACE_NOT_CURVE_FREE"


class BandBlocked(MultisectionError):
    code = "BAND_BLOCKED"


class NotSameFamily(MultisectionError):
    code = "NOT_SAME_FAMILY"


class CurvesIntersect(MultisectionError):
    code = "CURVES_INTERSECT"


class WitnessStale(MultisectionError):
    code = "WITNESS_STALE"


class NotCleanlySeparated(MultisectionError):
    code = "NOT_CLEANLY_SEPARATED"


# ---------------------------------------------------------------------------
# goodball / bundle-gen
# ---------------------------------------------------------------------------

class NotClosedManifold(MultisectionError):
    code = "NOT_CLOSED_MANIFOLD"


class NotSimple(MultisectionError):
    code = "NOT_SIMPLE"


class InvalidPartition(MultisectionError):
    code = "INVALID_PARTITION"


class SchemeMismatch(MultisectionError):
    code = "SCHEME_MISMATCH"


class NoCurveFreeFace(MultisectionError):
    code = "NO_CURVE_FREE_FACE"


class MonodromyNotAutomorphism(MultisectionError):
    code = "MONODROMY_NOT_AUTOMORPHISM"


class Unsupported(MultisectionError):
    code = "UNSUPPORTED"


# ---------------------------------------------------------------------------
# cli-io
# ---------------------------------------------------------------------------

class VersionUnknown(MultisectionError):
    code = "VERSION_UNKNOWN"


class MalformedLine(MultisectionError):
    code = "MALFORMED_LINE"


class ValidationFailed(MultisectionError):
    code = "VALIDATION_FAILED"
