"""
Command line entry point.

    python -m backend.main generate kind=sphere-bundle n=4 g=0 --out s4.msd
    python -m backend.main invariants s4.msd
    python -m backend.main render s4.msd --out s4.svg

Exit codes: 0 success, 1 error or bad usage, 2 a check that ran and failed.
"""
import argparse
import os
import sys
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from backend.api.diagram_controller import DiagramController, fixture_path
from backend.api.msd_format import parse, serialize
from backend.api.scheme_format import parse_scheme, serialize_scheme
from backend.api.slide_format import read_slides, serialize_slides
from backend.app_config import AppSettings
from backend.core.audit_logger import AuditLogger
from backend.core.audit_store import AuditStore, NullAuditStore
from backend.core.diagram_models import (
    CurveRef,
    MultisectionDiagram,
    Scheme,
    SchemeReport,
    SlideScript,
    StabilizationWitness,
)
from backend.core.diagram_ops import validate_diagram
from backend.core.errors import MultisectionError
from backend.data.config import GENERATOR_CONFIG
from backend.data.schemes import scheme_validate
from visualization.chart_exporter import ChartExporter
from visualization.panel_strip_chart import generate_panel_strip
from visualization.scheme_grid_chart import generate_scheme_grid

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2

COMMANDS = ("generate", "validate", "invariants", "move", "find-destab", "destab", "iso", "render",
            "batch-validate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="msd", description="Build, check and transform multisection diagrams.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("args", nargs="*", help="key=value parameters and input files")
    parser.add_argument("--out", default=None, help="write the result here instead of stdout")
    return parser


def split_args(tokens: Sequence[str]) -> Tuple[Dict[str, str], List[str]]:
    params: Dict[str, str] = {}
    files: List[str] = []
    for token in tokens:
        key, sep, value = token.partition("=")
        if sep and key and not os.path.exists(token):
            params[key] = value
        else:
            files.append(token)
    return params, files


def _read(path: str) -> str:
    if not os.path.exists(path):
        shipped = os.path.join(GENERATOR_CONFIG["fixtures_dir"], path)
        if os.path.exists(shipped):
            path = shipped
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")


def _load(path: str):
    text = _read(path)
    if text.lstrip().startswith("scheme"):
        return parse_scheme(text)
    return parse(text)


def _load_diagram(path: str) -> MultisectionDiagram:
    obj = _load(path)
    if not isinstance(obj, MultisectionDiagram):
        raise UsageError(f"{path} holds a scheme, a diagram is needed")
    return obj


def _int_param(params: Dict[str, str], key: str, default: Optional[int] = None) -> Optional[int]:
    if key not in params:
        return default
    try:
        return int(params[key])
    except ValueError:
        raise UsageError(f"{key}= must be an integer, got {params[key]!r}")


def _need(files: List[str], count: int, what: str) -> List[str]:
    if len(files) < count:
        raise UsageError(f"missing {what}")
    return files


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(out)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(out, "w", encoding="utf-8") as f:
        f.write(text)


def _flag(params: Dict[str, str], key: str) -> bool:
    return params.get(key, "no") in ("yes", "true", "1")


def _ref_text(ref: CurveRef) -> str:
    return f"{ref.family}:{ref.label if ref.label is not None else ref.index}"


def _witness_text(i: int, w: StabilizationWitness) -> str:
    a = " ".join(_ref_text(r) for r in w.group_a)
    b = " ".join(_ref_text(r) for r in w.group_b)
    return f"witness {i}: k={w.k} A=[{a}] B=[{b}]"


def _invariants_text(controller: DiagramController, d: MultisectionDiagram) -> str:
    summary = controller.invariants(d)
    lines = [
        f"name: {summary.name}",
        f"genus: {summary.genus}",
        f"n: {summary.n}",
        "family sizes: " + " ".join(map(str, summary.family_sizes)),
        "family ranks: " + " ".join(map(str, summary.family_ranks)),
        "map: " + " ".join(f"{k}={v}" for k, v in summary.map.items()),
        "intersection matrix:",
        _matrix_text(d, summary.intersection_matrix),
    ]
    return "\n".join(lines) + "\n"


def _matrix_text(d: MultisectionDiagram, rows: List[List[int]]) -> str:
    labels = [f"{i}.{j}" for i, fam in enumerate(d.families, start=1) for j in range(len(fam))]
    return pd.DataFrame(rows, index=labels, columns=labels).to_string()


def _report_text(report) -> str:
    if report.valid:
        return f"{report.name or 'input'}: valid ({report.rules_evaluated} rules)\n"
    lines = [f"{report.name or 'input'}: invalid"]
    lines.extend(f"  {v.rule_id} [{v.severity}] {v.message}" for v in report.violations)
    return "\n".join(lines) + "\n"


class Cli:
    def __init__(self, settings: AppSettings):
        self.settings = settings
        store = AuditStore(settings.LOG_DIR) if settings.AUDIT_ENABLED else NullAuditStore()
        self.audit = AuditLogger(store)
        self.controller = DiagramController(self.audit)

    def run(self, command: str, params: Dict[str, str], files: List[str], out: Optional[str], cid: str) -> int:
        handler = getattr(self, "cmd_" + command.replace("-", "_"))
        return handler(params, files, out, cid)

    def cmd_generate(self, params, files, out, cid) -> int:
        if "kind" not in params:
            raise UsageError("generate needs kind=...")
        kind = params.pop("kind")
        result = self.controller.generate(kind, params, cid)
        if isinstance(result, MultisectionDiagram):
            _emit(serialize(result), out)
        elif isinstance(result, Scheme):
            _emit(serialize_scheme(result), out)
        else:
            _emit(self.controller.goodball_report(result), out)
        return EXIT_OK

    def _check(self, path: str, params: Dict[str, str], cid: str):
        obj = _load(path)
        if isinstance(obj, Scheme):
            return self.controller.validate_scheme(obj, cid)
        expected = _int_param(params, "n")
        return self.controller.validate(obj, expected, cid)

    def cmd_validate(self, params, files, out, cid) -> int:
        report = self._check(_need(files, 1, "input file")[0], params, cid)
        _emit(_report_text(report), out)
        return EXIT_OK if report.valid else EXIT_FAILED

    def cmd_batch_validate(self, params, files, out, cid) -> int:
        """Files are checked in parallel; audit events are written afterwards in input order."""
        _need(files, 1, "input files")
        expected = _int_param(params, "n")

        def one(path: str):
            try:
                obj = _load(path)
                return scheme_validate(obj) if isinstance(obj, Scheme) else validate_diagram(obj, expected)
            except (MultisectionError, UsageError) as exc:
                return exc

        with ThreadPoolExecutor() as pool:
            results = list(pool.map(one, files))

        lines = []
        codes = set()
        for path, result in zip(files, results):
            if isinstance(result, Exception):
                lines.append(f"{path}: error: {result}\n")
                codes.add(EXIT_ERROR)
                continue
            if isinstance(result, SchemeReport):
                self.audit.log_scheme_validated(result, cid)
            else:
                self.audit.log_validation(result, cid)
            lines.append(f"{path}: " + _report_text(result).split(": ", 1)[1])
            codes.add(EXIT_OK if result.valid else EXIT_FAILED)
        _emit("".join(lines), out)
        if EXIT_ERROR in codes:
            return EXIT_ERROR
        return EXIT_FAILED if EXIT_FAILED in codes else EXIT_OK

    def cmd_invariants(self, params, files, out, cid) -> int:
        d = _load_diagram(_need(files, 1, "diagram file")[0])
        _emit(_invariants_text(self.controller, d), out)
        return EXIT_OK

    def cmd_move(self, params, files, out, cid) -> int:
        _need(files, 2, "diagram file and slide script")
        d = _load_diagram(files[0])
        script_path = files[1]
        if script_path in GENERATOR_CONFIG["fixtures"]:
            script_path = fixture_path(script_path)
        elif not os.path.exists(script_path):
            script_path = os.path.join(GENERATOR_CONFIG["fixtures_dir"], script_path)
        if not os.path.exists(script_path):
            raise UsageError(f"cannot read {files[1]}")
        result = self.controller.move(d, read_slides(script_path))
        _emit(serialize(result), out)
        return EXIT_OK

    def cmd_find_destab(self, params, files, out, cid) -> int:
        d = _load_diagram(_need(files, 1, "diagram file")[0])
        witnesses = self.controller.find_destab(d)
        lines = [f"witnesses: {len(witnesses)}"]
        lines.extend(_witness_text(i, w) for i, w in enumerate(witnesses))
        if _flag(params, "slides"):
            hits = self.controller.enabling_slides(d, _int_param(params, "limit", 1))
            lines.append(f"enabling slides: {len(hits)}")
            for step, count in hits:
                lines.append(f"{serialize_slides(SlideScript(steps=[step])).strip()}  # witnesses={count}")
        _emit("\n".join(lines) + "\n", out)
        return EXIT_OK

    def cmd_destab(self, params, files, out, cid) -> int:
        d = _load_diagram(_need(files, 1, "diagram file")[0])
        result = self.controller.destab(d, _int_param(params, "witness", 0), cid)
        _emit(serialize(result), out)
        return EXIT_OK

    def cmd_iso(self, params, files, out, cid) -> int:
        _need(files, 2, "two diagram files")
        unordered = _flag(params, "unordered")
        same = self.controller.iso(_load_diagram(files[0]), _load_diagram(files[1]), unordered)
        _emit("isomorphic\n" if same else "not isomorphic\n", out)
        return EXIT_OK if same else EXIT_FAILED

    def cmd_render(self, params, files, out, cid) -> int:
        obj = _load(_need(files, 1, "input file")[0])
        if out is None:
            exporter = ChartExporter(self.settings.OUTPUT_DIR)
            path = exporter.export_scheme(obj) if isinstance(obj, Scheme) else exporter.export_diagram(obj)
            sys.stdout.write(path + "\n")
            return EXIT_OK
        folder = os.path.dirname(out)
        if folder:
            os.makedirs(folder, exist_ok=True)
        if isinstance(obj, Scheme):
            generate_scheme_grid(obj, out)
        else:
            generate_panel_strip(obj, out)
        return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_intermixed_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_ERROR
    except SystemExit as exc:   # --help
        return int(exc.code or 0)

    cli = Cli(AppSettings())
    cid = str(uuid.uuid4())
    params, files = split_args(ns.args)
    cli.audit.log_command("started", ns.command, cid, {"args": list(ns.args)})
    try:
        code = cli.run(ns.command, params, files, ns.out, cid)
    except UsageError as exc:
        cli.audit.log_command("failed", ns.command, cid, {"error": str(exc)})
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_ERROR
    except MultisectionError as exc:
        cli.audit.log_command("failed", ns.command, cid, {"error": str(exc), "code": exc.code})
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    stage = "completed" if code == EXIT_OK else "failed"
    cli.audit.log_command(stage, ns.command, cid, {"exit_code": code})
    return code


if __name__ == "__main__":
    sys.exit(main())
