"""Command-line interface.

Exit codes: 0 success, 1 a demo missed its tolerance, 2 domain or validation
error (including bad arguments), 3 I/O error.

File arguments accept a path or ``corpus:<id>`` for a bundled diagram.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import corpus
from .dataset import Dataset
from .demos import CASES, bias_demo
from .diagnostics import check_assumptions, shear_dataset
from .dsl import DagDocument, DslError, parse, to_dot
from .errors import DagError, QueryError
from .estimate import ols
from .identify import classify_roles, find_adjustment_sets, satisfies_backdoor
from .paths import CausalQuery, classify_path, d_separated, enumerate_paths, is_blocked
from .scm import Scm, simulate

FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_DOMAIN = 2
EXIT_IO = 3


class CliError(DagError):
    pass


# -- helpers ---------------------------------------------------------------

def _read_source(spec: str) -> tuple[str, str]:
    if spec.startswith("corpus:"):
        cid = spec.split(":", 1)[1]
        if cid not in corpus.CORPUS_IDS:
            raise CliError(f"unknown corpus entry {cid!r}; expected one of {', '.join(corpus.CORPUS_IDS)}")
        return spec, corpus.load(cid).text
    return spec, Path(spec).read_text(encoding="utf-8")


def _load_doc(spec: str) -> DagDocument:
    name, text = _read_source(spec)
    try:
        return parse(text)
    except DslError as exc:
        raise CliError(f"{name}:{exc.line}:{exc.column}: {exc.kind}: {exc.message}") from exc


def _names(values) -> list[str]:
    out: list[str] = []
    for v in values or ():
        out.extend(x.strip() for x in v.split(",") if x.strip())
    return out


def _fmt_set(names) -> str:
    return "{" + ", ".join(names) + "}"


def _query(doc: DagDocument, args) -> CausalQuery:
    exposure = args.exposure or doc.exposure
    outcome = args.outcome or doc.outcome
    if exposure is None or outcome is None:
        raise QueryError("no exposure/outcome given and the document declares none")
    adjusted = doc.adjusted if (exposure, outcome) == (doc.exposure, doc.outcome) else frozenset()
    q = CausalQuery(exposure, outcome, adjusted - {exposure, outcome})
    q.validate(doc.dag)
    return q


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "structured":
        doc = {"format_version": FORMAT_VERSION, "command": args.command}
        doc.update(payload)
        sys.stdout.write(json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# -- subcommands -----------------------------------------------------------

def cmd_validate(args) -> int:
    doc = _load_doc(args.file)
    dag = doc.dag
    payload = {
        "valid": True,
        "name": doc.name,
        "nodes": list(dag.nodes),
        "edges": [list(e) for e in dag.sorted_edges],
        "moderations": [str(m) for m in dag.moderations],
    }
    text = (f"ok: {doc.name} ({len(dag)} nodes, {len(dag.edges)} edges, "
            f"{len(dag.moderations)} moderations)\ntopological order: {' '.join(dag.nodes)}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_paths(args) -> int:
    doc = _load_doc(args.file)
    dag = doc.dag
    cond = dag.sort_nodes(set(_names(args.conditioned)))  # raises UnknownNode
    sep = d_separated(dag, args.x, args.y, cond)
    rows = []
    lines = [f"paths between {args.x} and {args.y} given {_fmt_set(cond)}:"]
    paths = enumerate_paths(dag, args.x, args.y)
    width = max((len(str(p)) for p in paths), default=0)
    for i, p in enumerate(paths, 1):
        cls = classify_path(p)
        blocked = is_blocked(dag, p, cond)
        backdoor = p.directions[0].value == "backward"
        colliders = dag.sort_nodes(cls.colliders)
        rows.append({"path": str(p), "kind": cls.kind.value, "backdoor": backdoor,
                     "colliders": colliders, "blocked": blocked})
        kind = cls.kind.value + (" backdoor" if backdoor else "")
        lines.append(f"  {i:>2}. {str(p):<{width}}  {kind:<20}colliders: "
                     f"{','.join(colliders) or '-':<10}{'blocked' if blocked else 'open'}")
    if not paths:
        lines.append("  (no paths)")
    verdict = "d-separated" if sep.separated else "d-connected"
    lines.append(f"verdict: {verdict}" + ("" if sep.separated else f" ({len(sep.open_paths)} open)"))
    payload = {"x": args.x, "y": args.y, "conditioned": cond, "paths": rows,
               "d_separated": sep.separated, "open_paths": [str(p) for p in sep.open_paths]}
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _roles_payload(dag, report) -> dict:
    q = report.query
    return {
        "query": {"exposure": q.exposure, "outcome": q.outcome},
        "confounders": dag.sort_nodes(report.confounders),
        "mediators": dag.sort_nodes(report.mediators),
        "colliders": [{"node": c, "path": str(p)} for c, p in report.colliders],
        "instruments": dag.sort_nodes(report.instruments),
        "moderators": dag.sort_nodes(report.moderators),
        "unclassified": dag.sort_nodes(report.unclassified),
        "common_effects": [{"node": c, "path": str(p)} for c, p in report.common_effects],
    }


def cmd_roles(args) -> int:
    doc = _load_doc(args.file)
    dag = doc.dag
    q = _query(doc, args)
    report = classify_roles(dag, q)
    payload = _roles_payload(dag, report)
    lines = [f"roles for exposure {q.exposure}, outcome {q.outcome}:"]
    for key in ("confounders", "mediators", "instruments", "moderators", "unclassified"):
        lines.append(f"  {key:<15}{_fmt_set(payload[key])}")
    lines.append("  colliders on exposure-outcome paths:")
    for c in payload["colliders"] or [None]:
        lines.append(f"    {c['node']}  via {c['path']}" if c else "    (none)")
    lines.append("  common effects in the graph:")
    for c in payload["common_effects"] or [None]:
        lines.append(f"    {c['node']}  via {c['path']}" if c else "    (none)")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_adjust(args) -> int:
    doc = _load_doc(args.file)
    dag = doc.dag
    q = _query(doc, args)
    result = find_adjustment_sets(dag, q)
    report = classify_roles(dag, q)
    risky = dag.descendants(q.exposure) | {q.outcome}
    warnings = []
    for c, p in report.common_effects:
        if c in risky:
            a, _, b = p.nodes
            warnings.append(
                f"{c} is a common effect of {a} and {b}; conditioning on it (or a descendant) "
                f"opens the non-causal path {p} and induces a spurious {a}-{b} association"
            )
    declared = None
    if q.conditioned:
        declared = satisfies_backdoor(dag, q, q.conditioned)

    sets = [dag.sort_nodes(s) for s in result.minimal_sets]
    payload = {
        "query": {"exposure": q.exposure, "outcome": q.outcome},
        "minimal_sets": sets,
        "forbidden": dag.sort_nodes(result.forbidden),
        "backdoor_paths": [str(p) for p in result.backdoor_paths],
        "identifiable": result.identifiable,
        "warnings": warnings,
    }
    if declared is not None:
        payload["declared_adjustment"] = {"set": dag.sort_nodes(q.conditioned), "valid": declared}
    lines = [f"adjustment for the effect of {q.exposure} on {q.outcome}:"]
    lines.append("  backdoor paths: " + ("; ".join(payload["backdoor_paths"]) or "none"))
    if result.identifiable:
        shown = ", ".join(_fmt_set(s) for s in sets)
        if sets == [[]]:
            shown += " (no adjustment needed)"
        lines.append("  minimal adjustment sets: " + shown)
    else:
        lines.append("  minimal adjustment sets: none (no valid set of observed, non-descendant nodes)")
    lines.append(f"  forbidden: {_fmt_set(payload['forbidden'])}")
    if declared is not None:
        lines.append(f"  declared set {_fmt_set(payload['declared_adjustment']['set'])}: "
                     + ("valid" if declared else "NOT valid"))
    lines.extend(f"  warning: {w}" for w in warnings)
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_demo(args) -> int:
    report = bias_demo(args.case, n=args.n, seed=args.seed)
    _emit(args, report.as_dict(), report.render())
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_simulate(args) -> int:
    if args.shear:
        if args.file:
            raise CliError("give either a diagram file or --shear, not both")
        data = shear_dataset(args.n, args.seed, args.noise_sd)
        source = "shear"
    else:
        if not args.file:
            raise CliError("simulate needs a diagram file or --shear")
        doc = _load_doc(args.file)
        data = simulate(Scm.from_document(doc), args.n, args.seed)
        source = doc.name
    if args.out:
        data.to_csv(args.out)
        obs = data.observed()
        payload = {"source": source, "rows": obs.n, "columns": list(obs.columns), "seed": args.seed,
                   "out": args.out}
        _emit(args, payload, f"wrote {obs.n} rows x {len(obs.columns)} columns to {args.out}")
    else:
        sys.stdout.write(data.to_csv())
    return EXIT_OK


def cmd_regress(args) -> int:
    data = Dataset.from_csv(args.csv)
    predictors = _names(args.predictors)
    if args.log:
        cols = [args.response, *predictors]
        vals = data.matrix(cols)
        if np.any(vals <= 0):
            raise CliError("--log needs strictly positive response and predictors")
        data = Dataset(tuple(cols), np.log(vals))
    fit = ols(data, args.response, predictors)
    report = check_assumptions(data, fit, unordered=args.unordered)
    payload = {"fit": fit.as_dict(), "log": args.log, "diagnostics": report.as_dict()}
    terms = " + ".join(f"{b:.6g}*{v}" for v, b in zip(fit.predictors, fit.coefficients))
    prefix = "log " if args.log else ""
    lines = [
        f"{prefix}{fit.response} = {fit.intercept:.6g} + {terms}",
        f"n = {data.n}, R^2 = {fit.r_squared:.6f}",
        "",
        report.render(),
    ]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_render(args) -> int:
    doc = _load_doc(args.file)
    highlights = None
    if args.highlight:
        highlights = classify_roles(doc.dag, _query(doc, args))
    dot = to_dot(doc, highlights)
    if args.out:
        Path(args.out).write_text(dot, encoding="utf-8")
        _emit(args, {"out": args.out}, f"wrote {args.out}")
    else:
        sys.stdout.write(dot)
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default=argparse.SUPPRESS,
                        help="output style (default: text)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default: 0)")

    parser = argparse.ArgumentParser(prog="dagcheck", description="Causal diagram analysis toolkit")
    parser.add_argument("--format", choices=("text", "structured"), default="text")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check that a .dag file is a valid DAG")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("paths", parents=[common], help="list and classify paths between two nodes")
    p.add_argument("file")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("--conditioned", nargs="*", default=[], metavar="NODE",
                   help="conditioning set (space or comma separated)")
    p.set_defaults(func=cmd_paths)

    for name, func, help_ in (
        ("roles", cmd_roles, "classify variable roles for a query"),
        ("adjust", cmd_adjust, "minimal backdoor adjustment sets for a query"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("file")
        p.add_argument("--exposure")
        p.add_argument("--outcome")
        p.set_defaults(func=func)

    p = sub.add_parser("demo", parents=[common], help="run a case-study demo")
    p.add_argument("case", choices=CASES)
    p.add_argument("--n", type=int, default=100_000, help="rows per stratum for the fire demo")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("simulate", parents=[common], help="sample a dataset from a diagram")
    p.add_argument("file", nargs="?")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--out")
    p.add_argument("--shear", action="store_true", help="sample the synthetic shear-strength dataset instead")
    p.add_argument("--noise-sd", type=float, default=0.0, help="noise on Vc for --shear (newtons)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("regress", parents=[common], help="OLS fit plus assumption diagnostics")
    p.add_argument("csv")
    p.add_argument("--response", required=True)
    p.add_argument("--predictors", required=True, nargs="+", help="comma or space separated")
    p.add_argument("--log", action="store_true", help="fit on the natural log of all variables")
    p.add_argument("--unordered", action="store_true", help="rows carry no order (skip Durbin-Watson)")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("render", parents=[common], help="emit a DOT digraph")
    p.add_argument("file")
    p.add_argument("--out")
    p.add_argument("--highlight", action="store_true", help="color roles for the document's query")
    p.add_argument("--exposure")
    p.add_argument("--outcome")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_DOMAIN if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        _error(args, exc, "io")
        return EXIT_IO
    except (DagError, ValueError) as exc:
        _error(args, exc, "domain")
        return EXIT_DOMAIN


def _error(args, exc: Exception, kind: str) -> None:
    msg = str(exc) if not isinstance(exc, OSError) else f"{exc.strerror or exc}: {exc.filename}"
    if args.format == "structured":
        doc = {"format_version": FORMAT_VERSION, "command": args.command,
               "error": {"kind": kind, "type": type(exc).__name__, "message": msg}}
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"error: {msg}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
