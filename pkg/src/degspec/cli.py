"""Batch front end: ``degspec run | models | validate``.

A request file is a JSON object::

    {"model": "P1xP1xK(2)",            # optional; name or model document
     "map": {"type": "monomial", "A": [[2, 1], [1, 1]]},
     "analyses": [{"kind": "degrees", "p": 1, "n_max": 20},
                  {"kind": "spectral_gap"}]}

Exit codes: 0 all verdicts PASS / NOT_APPLICABLE / verified, 1 input
error, 2 a CONCLUSION_VIOLATED verdict or failed invariant, 3 an
INDETERMINATE verdict.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import dynamics, theorems
from .errors import DegspecError
from .exact import DEFAULT_TOL, fraction_str, tagged_decimal
from .intersection import VarietyModel, hodge_signature, model_from_dict
from .maps import MatrixAction, MonomialMap, PolyMap, map_from_dict
from .models import builtin_catalog, make_model, product_of_lines, projective_space

KINDS = ("degrees", "stability", "fekete", "spectral_gap", "radius_inequality", "duality",
         "hodge", "cone", "inequalities")
# older request files name the two spectral checks by number
KIND_ALIASES = {"theorem1": "spectral_gap", "theorem2": "radius_inequality"}

EXIT_OK, EXIT_INPUT, EXIT_VIOLATED, EXIT_INDETERMINATE = 0, 1, 2, 3


class InputError(Exception):
    """Malformed request; ``line`` anchors the message in the source file."""

    def __init__(self, msg: str, line: int = 1):
        super().__init__(msg)
        self.line = line


@dataclass
class Analysis:
    kind: str
    label: str = ""
    p: int | None = None
    n_max: int | None = None
    tol: float | None = None
    r2: float | None = None
    line: int = 1


@dataclass
class Request:
    source: Any
    model: VarietyModel | None
    analyses: list[Analysis]
    text: str = ""
    origin: str = "<flags>"
    sequences: list = field(default_factory=list)


def _line_of(text: str, pattern: str, occurrence: int = 0) -> int:
    hits = [m.start() for m in re.finditer(pattern, text)]
    if occurrence < len(hits):
        return text.count("\n", 0, hits[occurrence]) + 1
    return 1


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from exc


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _model_arg(value, text: str = "") -> VarietyModel:
    """A built-in name, a path to a model document, or the document itself."""
    line = _line_of(text, r'"model"')
    try:
        if isinstance(value, str) and not Path(value).is_file():
            return make_model(value)
        if isinstance(value, str):
            return model_from_dict(_load_json(_read(value)))
        return model_from_dict(value)
    except DegspecError as exc:
        raise InputError(str(exc), line) from exc


def _implied_model(source) -> VarietyModel | None:
    if isinstance(source, MatrixAction):
        return source.model
    if isinstance(source, MonomialMap):
        if source.space == "p1k" and source.k <= 4:
            return product_of_lines(source.k)
        if source.space == "pk" and source.k <= 4:
            return projective_space(source.k)
    if isinstance(source, PolyMap) and source.k <= 4:
        return projective_space(source.k)
    return None


def _parse_analyses(items, text: str) -> list[Analysis]:
    if not isinstance(items, list) or not items:
        raise InputError("'analyses' must be a non-empty list", _line_of(text, r'"analyses"'))
    out = []
    for i, item in enumerate(items):
        line = _line_of(text, r'"kind"', i)
        if isinstance(item, str):
            item = {"kind": item}
        if not isinstance(item, dict) or "kind" not in item:
            raise InputError(f"analysis #{i + 1} needs a 'kind'", line)
        params = item.get("parameters", {})
        if not isinstance(params, dict):
            raise InputError(f"analysis #{i + 1}: 'parameters' must be an object", line)
        merged = {**params, **{k: v for k, v in item.items() if k not in ("kind", "parameters")}}
        unknown = set(merged) - {"p", "n_max", "tol", "r2"}
        if unknown:
            raise InputError(f"analysis #{i + 1}: unknown parameter(s) {sorted(unknown)}", line)
        try:
            out.append(Analysis(
                kind=item["kind"],
                p=None if merged.get("p") is None else int(merged["p"]),
                n_max=None if merged.get("n_max") is None else int(merged["n_max"]),
                tol=None if merged.get("tol") is None else float(merged["tol"]),
                r2=None if merged.get("r2") is None else float(merged["r2"]),
                line=line))
        except (TypeError, ValueError) as exc:
            raise InputError(f"analysis #{i + 1}: {exc}", line) from exc
    return out


def build_request(args: argparse.Namespace) -> Request:
    text, origin, doc = "", "<flags>", {}
    if args.request:
        origin = args.request
        text = _read(args.request)
        doc = _load_json(text)
        if not isinstance(doc, dict):
            raise InputError("request must be a JSON object")
        unknown = set(doc) - {"model", "map", "analyses", "description"}
        if unknown:
            raise InputError(f"unknown request field(s) {sorted(unknown)}")
    map_doc = doc.get("map")
    map_text = text
    if args.map:
        map_text = _read(args.map) if Path(args.map).is_file() else args.map
        map_doc = _load_json(map_text)
    source = None
    if map_doc is not None:
        try:
            source = map_from_dict(map_doc)
        except DegspecError as exc:
            raise InputError(f"map: {exc}", _line_of(map_text, r'"map"|"type"')) from exc
    model_value = args.model if args.model else doc.get("model")
    model = _model_arg(model_value, text) if model_value is not None else _implied_model(source)
    if args.check:
        analyses = [Analysis(kind=k.strip()) for k in args.check.split(",") if k.strip()]
    elif "analyses" in doc:
        analyses = _parse_analyses(doc["analyses"], text)
    else:
        raise InputError("no analyses requested (give 'analyses' or --check)")
    for a in analyses:
        if args.p is not None:
            a.p = args.p
        if args.nmax is not None:
            a.n_max = args.nmax
        if args.tol is not None:
            a.tol = args.tol
    req = Request(source, model, analyses, text, origin)
    validate(req)
    return req


def validate(req: Request) -> None:
    """Reject unsupported kind/map/model combinations before running anything."""
    src = req.source
    for a in req.analyses:
        def bad(msg: str):
            raise InputError(f"{a.kind}: {msg}", a.line)

        a.label = a.label or a.kind
        a.kind = KIND_ALIASES.get(a.kind, a.kind)
        if a.kind not in KINDS:
            bad(f"unknown analysis kind; choose from {', '.join(KINDS)}")
        if a.n_max is not None and a.n_max < 2:
            bad("n_max must be >= 2")
        if a.tol is not None and not a.tol > 0:
            bad("tol must be positive")
        if a.kind == "hodge":
            if req.model is None:
                bad("needs a model")
            if req.model.dim < 2:
                bad("needs a model of dimension >= 2")
            continue
        if src is None:
            bad("needs a map")
        p = 1 if a.p is None else a.p
        if a.kind in ("degrees", "fekete"):
            if isinstance(src, PolyMap) and p != 1:
                bad("polynomial maps support p = 1 only")
            if isinstance(src, MonomialMap) and p not in (1, src.k):
                bad(f"monomial maps support p in {{1, {src.k}}}")
            if isinstance(src, MatrixAction) and p not in src.matrices:
                bad(f"no matrix declared for codimension {p}")
        elif a.kind == "stability":
            if isinstance(src, MatrixAction):
                bad("a matrix action has no independent iterate data to compare against")
            if isinstance(src, MonomialMap) and src.space != "p1k":
                bad("monomial stability is checked on (P^1)^k")
            if isinstance(src, PolyMap) and p != 1:
                bad("polynomial maps support p = 1 only")
            if isinstance(src, MonomialMap) and p not in (1, src.k):
                bad(f"monomial maps support p in {{1, {src.k}}}")
        elif a.kind == "spectral_gap":
            if isinstance(src, PolyMap) and a.r2 is None:
                bad("polynomial maps need an explicit r2")
            if isinstance(src, MatrixAction) and 1 not in src.matrices:
                bad("needs the action on N^1")
            if isinstance(src, MatrixAction) and 2 not in src.matrices and a.r2 is None:
                bad("needs the action on N^2 or an explicit r2")
        elif a.kind in ("radius_inequality", "cone"):
            ok = isinstance(src, MatrixAction) or (isinstance(src, MonomialMap) and src.space == "p1k")
            if not ok:
                bad("needs a matrix action or a monomial map on (P^1)^k")
            if a.kind == "radius_inequality":
                if isinstance(src, MonomialMap) and src.k != 2:
                    bad("N^2 action of a monomial map is only available on (P^1)^2")
                if isinstance(src, MatrixAction) and not {1, 2} <= set(src.matrices):
                    bad("needs the actions on N^1 and N^2")
        elif a.kind == "duality":
            if not isinstance(src, MonomialMap) or src.k != 3 or abs(src.det) != 1:
                bad("needs a 3x3 monomial map with |det A| = 1")
        elif a.kind == "inequalities":
            if not isinstance(src, (MonomialMap, MatrixAction)):
                bad("needs a monomial map or a matrix action")


def _sequence_dict(seq: dynamics.DegreeSequence) -> dict:
    return {"p": seq.p, "values": [fraction_str(v) for v in seq.values],
            "assumption_dependent": seq.assumption_dependent}


def _fekete_dict(est: dynamics.FeketeEstimate, tol: float) -> dict:
    return {"upper_inf": tagged_decimal(est.upper_inf, tol), "upper_inf_at": est.upper_inf_at,
            "last_root": tagged_decimal(est.last_root, tol),
            "window_slope": tagged_decimal(est.window_slope, "estimate"),
            "violations": [list(v) for v in est.violations]}


def run_analysis(req: Request, a: Analysis) -> tuple[dict, str]:
    """Return (report entry, status) where status is one of the verdict words."""
    src = req.source
    tol = DEFAULT_TOL if a.tol is None else a.tol
    p = 1 if a.p is None else a.p
    n_max = dynamics.default_nmax(src) if a.n_max is None else a.n_max
    out: dict = {"kind": a.label or a.kind}
    if a.kind in ("degrees", "fekete"):
        seq = dynamics.degree_sequence(src, p, n_max)
        req.sequences.append(seq)
        out.update(_sequence_dict(seq))
        if a.kind == "fekete":
            est = dynamics.fekete_estimate(seq)
            out.update(_fekete_dict(est, tol))
            return out, "verified" if not est.violations else "failed"
        return out, "info"
    if a.kind == "stability":
        res = dynamics.stability_check(src, p, n_max)
        out.update({"p": p, "stable": res.stable, "checked_up_to": res.checked_up_to,
                    "first_failure": res.first_failure})
        return out, "info"
    if a.kind == "spectral_gap":
        rep = theorems.spectral_gap_for_map(src, a.r2, n_max=n_max, tol=tol)
        out.update(rep.to_dict())
        return out, rep.verdict
    if a.kind == "radius_inequality":
        rep = theorems.r1_squared_for_map(src)
        out.update(rep.to_dict())
        return out, rep.verdict
    if a.kind == "duality":
        rep = theorems.threefold_duality_check(src, tol)
        out.update(rep.to_dict())
        return out, "PASS" if rep.holds else "CONCLUSION_VIOLATED"
    if a.kind == "hodge":
        sig = hodge_signature(req.model)
        expected = (1, req.model.ranks[1] - 1, 0)
        out.update({"model": req.model.name, "signature": list(sig), "expected": list(expected)})
        return out, "verified" if sig == expected else "failed"
    if a.kind == "cone":
        checks = theorems.cone_checks_for_map(src, None if a.p is None else [a.p])
        out["checks"] = [c.to_dict() for c in checks]
        asserted = src.asserted_cone_preserving if isinstance(src, MatrixAction) else {}
        broken = [c for c in checks if not c.verified and asserted.get(c.p, False)]
        return out, "failed" if broken else "info" if any(not c.verified for c in checks) else "verified"
    if a.kind == "inequalities":
        rep = dynamics.degree_inequalities(src, a.n_max, tol=1e-6)
        out["rows"] = [{"p": r.p, "lambda_1": tagged_decimal(r.lambda_1, tol if r.method == "oracle" else r.method),
                        "lambda_p": tagged_decimal(r.lambda_p, tol if r.method == "oracle" else r.method),
                        "lambda_p1": tagged_decimal(r.lambda_p1, tol if r.method == "oracle" else r.method),
                        "method": r.method, "holds": r.holds} for r in rep.rows]
        out["class_checks"] = [{"n": c.n, "difference": [fraction_str(v) for v in c.difference],
                                "effective": c.effective} for c in rep.class_checks]
        out["notes"] = list(rep.notes)
        return out, "verified" if rep.holds else "failed"
    raise InputError(f"unknown analysis kind {a.kind!r}", a.line)


def exit_code(statuses: Sequence[str]) -> int:
    if any(s in ("CONCLUSION_VIOLATED", "failed") for s in statuses):
        return EXIT_VIOLATED
    if "INDETERMINATE" in statuses:
        return EXIT_INDETERMINATE
    return EXIT_OK


def _describe_map(src) -> str | None:
    return None if src is None else dynamics.describe(src)


def execute(req: Request) -> tuple[dict, int]:
    entries, statuses = [], []
    for a in req.analyses:
        try:
            entry, status = run_analysis(req, a)
        except DegspecError as exc:
            raise InputError(f"{a.kind}: {exc}", a.line) from exc
        entry["status"] = status
        entries.append(entry)
        statuses.append(status)
    code = exit_code(statuses)
    report = {"model": req.model.name if req.model else None, "map": _describe_map(req.source),
              "analyses": entries, "exit_code": code}
    return report, code


def _csv_paths(base: str, count: int) -> list[Path]:
    path = Path(base)
    if count <= 1:
        return [path]
    return [path] + [path.with_name(f"{path.stem}-{i}{path.suffix}") for i in range(2, count + 1)]


def cmd_run(args) -> int:
    req = build_request(args)
    report, code = execute(req)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        for path, seq in zip(_csv_paths(args.csv, len(req.sequences)), req.sequences):
            path.write_text(dynamics.sequence_to_csv(seq))
    return code


def cmd_models(args) -> int:
    for name in builtin_catalog():
        m = make_model(name)
        sys.stdout.write(f"{name}\tdim={m.dim}\tranks={list(m.ranks)}\n")
    return EXIT_OK


def cmd_validate(args) -> int:
    build_request(args)
    sys.stdout.write(f"{args.request}: ok\n")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="degspec", description="Degree growth and spectral-gap checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_request_flags(sp, optional: bool):
        sp.add_argument("request", nargs="?" if optional else None, help="request JSON file")
        sp.add_argument("--model", help="built-in model name or model JSON file")
        sp.add_argument("--map", help="map JSON file or inline JSON")
        sp.add_argument("--p", type=int, help="codimension")
        sp.add_argument("--nmax", type=int, help="number of iterates")
        sp.add_argument("--tol", type=float, help="numeric tolerance")
        sp.add_argument("--check", help="comma-separated analysis kinds")

    run = sub.add_parser("run", help="run a request")
    add_request_flags(run, optional=True)
    run.add_argument("--out", help="write the JSON report here instead of stdout")
    run.add_argument("--csv", help="write degree sequences as CSV")
    run.set_defaults(func=cmd_run)

    models = sub.add_parser("models", help="list built-in models")
    models.set_defaults(func=cmd_models)

    val = sub.add_parser("validate", help="check a request without running it")
    add_request_flags(val, optional=False)
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        where = getattr(args, "request", None) or "<flags>"
        sys.stderr.write(f"{where}:{exc.line}: error: {exc}\n")
        return EXIT_INPUT
    except DegspecError as exc:
        where = getattr(args, "request", None) or "<flags>"
        sys.stderr.write(f"{where}:1: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
