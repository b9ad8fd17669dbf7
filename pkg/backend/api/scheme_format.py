"""
Scheme text format.

    scheme n=4 N=4 sigma=(123)
    row 1: 3@0* 4@1-3 1@4*
    row 2: 1@0-2* 2@3-4*
    row 3: 2@0-1* 3@2-4*

Each row lists runs of equal labels over the drawn columns 0..N; a run that
touches a half of the wrap column (drawn 0 or N) carries ``*``.
"""
import re
from typing import List, Tuple

from backend.core.diagram_models import Scheme
from backend.core.errors import MalformedLine, ValidationFailed
from backend.data.schemes import format_sigma, parse_sigma

_HEADER = re.compile(r"^scheme\s+n=(\d+)\s+N=(\d+)\s+sigma=(\S+)(?:\s+name=(\S+))?$")
_RUN = re.compile(r"^(\d+)@(\d+)(?:-(\d+))?(\*?)$")


def _runs(row: Tuple[int, ...]) -> List[Tuple[int, int, int]]:
    runs = []
    start = 0
    for c in range(1, len(row) + 1):
        if c == len(row) or row[c] != row[start]:
            runs.append((row[start], start, c - 1))
            start = c
    return runs


def serialize_scheme(s: Scheme) -> str:
    header = f"scheme n={s.n} N={s.N} sigma={format_sigma(s.sigma).replace(' ', ',')}"
    if s.name:
        header += f" name={s.name}"
    lines = [header]
    for k, row in enumerate(s.cells, start=1):
        tokens = []
        for label, a, b in _runs(row):
            span = f"{a}" if a == b else f"{a}-{b}"
            wrap = "*" if a == 0 or b == s.N else ""
            tokens.append(f"{label}@{span}{wrap}")
        lines.append(f"row {k}: " + " ".join(tokens))
    return "\n".join(lines) + "\n"


def parse_scheme(text: str) -> Scheme:
    rows = [(i, raw.strip()) for i, raw in enumerate(text.splitlines(), start=1) if raw.strip()]
    if not rows:
        raise MalformedLine("empty scheme", line=1)
    line, header = rows[0]
    match = _HEADER.match(header)
    if not match:
        raise MalformedLine("expected 'scheme n=<n> N=<N> sigma=<cycles>'", line=line)
    n, N = int(match.group(1)), int(match.group(2))
    sigma = parse_sigma(match.group(3).replace(",", " "), rows=n - 1)
    if len(sigma) != n - 1:
        raise ValidationFailed(f"sigma acts on {len(sigma)} rows, expected {n - 1}", line=line)
    cells: List[Tuple[int, ...]] = []
    for line, content in rows[1:]:
        head, _, body = content.partition(":")
        if head.strip() != f"row {len(cells) + 1}":
            raise MalformedLine(f"expected 'row {len(cells) + 1}:'", line=line)
        row = [0] * (N + 1)
        expected = 0
        for token in body.split():
            run = _RUN.match(token)
            if not run:
                raise MalformedLine(f"cannot read run {token!r}", line=line)
            label, a = int(run.group(1)), int(run.group(2))
            b = int(run.group(3)) if run.group(3) else a
            if a != expected or b < a or b > N:
                raise MalformedLine(f"run {token!r} does not continue at column {expected}", line=line)
            if bool(run.group(4)) != (a == 0 or b == N):
                raise MalformedLine(f"run {token!r} has a wrong wrap mark", line=line)
            row[a:b + 1] = [label] * (b - a + 1)
            expected = b + 1
        if expected != N + 1:
            raise MalformedLine(f"row covers {expected} of {N + 1} drawn columns", line=line)
        cells.append(tuple(row))
    if len(cells) != n - 1:
        raise MalformedLine(f"scheme has {len(cells)} rows, expected {n - 1}", line=rows[-1][0] + 1)
    return Scheme(n=n, sigma=sigma, cells=tuple(cells), name=match.group(4) or "")
