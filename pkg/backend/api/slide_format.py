"""
Slide scripts, one handleslide per line:

    slide <family> <curve> <over> [band=d1,d2,...]

A curve is given by its index in the family or by its role label.
"""
import re

from backend.core.diagram_models import CurveRef, SlideScript, SlideStep
from backend.core.errors import MalformedLine

COMMENT = re.compile(r"(?:^|\s)#.*$")


def _ref(family: int, token: str) -> CurveRef:
    if token.isdigit():
        return CurveRef(family=family, index=int(token))
    return CurveRef(family=family, label=token)


def parse_slides(text: str) -> SlideScript:
    steps = []
    for line, raw in enumerate(text.splitlines(), start=1):
        content = COMMENT.sub("", raw).strip()
        if not content:
            continue
        tokens = content.split()
        if tokens[0] != "slide" or len(tokens) not in (4, 5):
            raise MalformedLine("expected 'slide <family> <curve> <over> [band=...]'", line=line)
        if not tokens[1].isdigit() or int(tokens[1]) < 1:
            raise MalformedLine(f"family must be a positive integer, got {tokens[1]!r}", line=line)
        family = int(tokens[1])
        band = None
        if len(tokens) == 5:
            if not tokens[4].startswith("band="):
                raise MalformedLine(f"unexpected token {tokens[4]!r}", line=line)
            try:
                band = tuple(int(t) for t in tokens[4][len("band="):].split(","))
            except ValueError:
                raise MalformedLine("band darts must be integers", line=line)
        steps.append(SlideStep(family=family, curve=_ref(family, tokens[2]), over=_ref(family, tokens[3]), band=band))
    return SlideScript(steps=steps)


def serialize_slides(script: SlideScript) -> str:
    lines = []
    for step in script.steps:
        refs = [str(r.index) if r.label is None else r.label for r in (step.curve, step.over)]
        line = f"slide {step.family} {refs[0]} {refs[1]}"
        if step.band:
            line += " band=" + ",".join(map(str, step.band))
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def read_slides(path: str) -> SlideScript:
    with open(path, "r", encoding="utf-8") as f:
        return parse_slides(f.read())
