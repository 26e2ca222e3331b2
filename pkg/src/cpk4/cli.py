"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 pipeline stage failure,
3 decision answered NONE.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

from . import __version__
from .claims import CLAIM_IDS, run_reduced_claims, run_trace_claims
from .coloring import CapExceeded, chromatic_decision, verify_coloring
from .graph_core import GraphError, canonical
from .instance_io import (
    FormatError,
    GeneratorSpec,
    gen_random,
    parse_document,
    search_bad_gluing,
    serialize,
    spec_metadata,
)
from .isr import DEFAULT_SUBSET_CAP
from .reduction import DEFAULT_EXACT_CAP, ReducedInstance, StageFailure, reduce

EXIT_OK, EXIT_USAGE, EXIT_STAGE, EXIT_NONE = 0, 1, 2, 3
REPORT_SCHEMA = "cpk4-report/1"


class UsageError(Exception):
    pass


def subset_cap() -> int:
    raw = os.environ.get("CPK4_SUBSET_CAP")
    if raw is None:
        return DEFAULT_SUBSET_CAP
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CPK4_SUBSET_CAP must be an integer, got {raw!r}") from None


def load(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = parse_document(text)
        inst = doc.to_instance()
    except (FormatError, GraphError) as exc:
        raise UsageError(f"{path}: {exc}") from None
    return doc, inst


def digest(inst) -> str:
    return hashlib.sha256(serialize(inst).encode()).hexdigest()


def render(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_text(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def claim_table(claims: dict) -> str:
    width = max(len(c) for c in CLAIM_IDS)
    lines = []
    for cid in CLAIM_IDS:
        res = claims[cid]
        tag = res["status"] + (" (sampled)" if res.get("sampled") else "")
        extra = f"  {json.dumps(res['witness'], sort_keys=True)}" if "witness" in res else ""
        lines.append(f"{cid:<{width}}  {tag}{extra}")
    return "\n".join(lines) + "\n"


def parse_claims(raw: str | None) -> tuple[str, ...]:
    if raw is None or raw == "all":
        return CLAIM_IDS
    chosen = tuple(c.strip() for c in raw.split(",") if c.strip())
    unknown = [c for c in chosen if c not in CLAIM_IDS]
    if unknown:
        raise UsageError(f"unknown claim id(s): {', '.join(unknown)} (known: {', '.join(CLAIM_IDS)})")
    return chosen


def base_report(args, inst) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "command": args.argv_echo,
        "instance_digest": digest(inst),
    }


def cmd_reduce(args) -> int:
    _, inst = load(args.input)
    if inst.order != 4:
        raise UsageError("reduce needs an order=4 instance")
    selected = parse_claims(args.claims)
    report = base_report(args, inst)
    started = time.perf_counter()
    try:
        red, tr = reduce(inst, exact_cap=args.exact_cap, isr_budget=args.isr_budget)
    except StageFailure as exc:
        report["stages"] = {"failed": exc.stage, "message": str(exc)}
        report["claims"] = {cid: {"status": "SKIPPED", "sampled": False, "detail": {"reason": "pipeline failed"}}
                            for cid in CLAIM_IDS}
        report["exit_status"] = EXIT_STAGE
        if args.trace:
            write_text(args.trace, render(report))
        print(f"stage failure: {exc}", file=sys.stderr)
        return EXIT_STAGE
    claims = run_trace_claims(tr, selected, cap=subset_cap(), budget=args.subset_budget, seed=args.seed)
    report["stages"] = {
        "normalize": {"vertices": len(tr.normalized.base)},
        "select_M": {"M": list(tr.selection.M), "method": tr.selection.method},
        "break_long_cycles": {"L": list(tr.breaking.L)},
        "isr_augmented": {"parts": len(tr.fam2)},
        "isr_cliques": {"parts": len(tr.famY)},
        "combine": {"rounds": len(tr.combine.rounds), "R": canonical(tr.R.vertices)},
        "reduced": {"vertices": len(red.base), "glued_triangles": len(red.glued_triangles)},
    }
    report["trace"] = tr.to_dict()
    report["claims"] = {cid: res.to_dict() for cid, res in claims.items()}
    failed = any(r.status == "FAIL" for r in claims.values())
    report["exit_status"] = EXIT_STAGE if failed else EXIT_OK
    if args.timings:
        report["timings"] = {"total_seconds": round(time.perf_counter() - started, 6)}
    write_text(args.output, serialize(red.as_instance(), {"source_digest": report["instance_digest"]}))
    if args.trace:
        write_text(args.trace, render(report))
    sys.stderr.write(claim_table(report["claims"]))
    return report["exit_status"]


def cmd_verify(args) -> int:
    _, inst = load(args.input)
    selected = parse_claims(args.claims)
    report = base_report(args, inst)
    cap = subset_cap()
    if inst.order == 4:
        try:
            red, tr = reduce(inst, isr_budget=args.isr_budget)
        except StageFailure as exc:
            report["stages"] = {"failed": exc.stage, "message": str(exc)}
            report["claims"] = {cid: {"status": "SKIPPED", "sampled": False, "detail": {"reason": "pipeline failed"}}
                                for cid in CLAIM_IDS}
            report["exit_status"] = EXIT_STAGE
            if args.report:
                write_text(args.report, render(report))
            print(f"stage failure: {exc}", file=sys.stderr)
            return EXIT_STAGE
        claims = run_trace_claims(tr, selected, cap=cap, budget=args.subset_budget, seed=args.seed)
    else:
        claims = run_reduced_claims(ReducedInstance(inst.base, inst.cliques), selected)
    report["claims"] = {cid: res.to_dict() for cid, res in claims.items()}
    failed = any(r.status == "FAIL" for r in claims.values())
    report["exit_status"] = EXIT_STAGE if failed else EXIT_OK
    if args.report:
        write_text(args.report, render(report))
    sys.stdout.write(claim_table(report["claims"]))
    return report["exit_status"]


def cmd_color(args) -> int:
    _, inst = load(args.input)
    g = inst.graph
    try:
        col = chromatic_decision(g, args.k, cap=args.cap)
    except CapExceeded as exc:
        raise UsageError(str(exc)) from None
    if col is None:
        print("NONE")
        return EXIT_NONE
    assert verify_coloring(g, col).ok
    for v in g.vertices:
        print(f"{v} {col.assignment[v]}")
    return EXIT_OK


def cmd_search(args) -> int:
    _, inst = load(args.input)
    try:
        found = search_bad_gluing(inst.base, args.budget, args.seed)
    except GraphError as exc:
        raise UsageError(str(exc)) from None
    if found is None:
        print("NONE")
        return EXIT_NONE
    meta = {"certified": "chi=4", "search_seed": str(args.seed)}
    write_text(args.output, serialize(found, meta))
    return EXIT_OK


def parse_cycles(raw: str) -> tuple[tuple[int, int], ...]:
    out = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            length, count = item.split(":")
            out.append((int(length), int(count)))
        except ValueError:
            raise UsageError(f"bad --cycles entry {item!r}; expected LENGTH:COUNT") from None
    return tuple(out)


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.seed, parse_cycles(args.cycles), args.triangles, args.order, args.coverage)
    try:
        inst = gen_random(spec)
    except GraphError as exc:
        raise UsageError(str(exc)) from None
    write_text(args.output, serialize(inst, spec_metadata(spec)))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cpk4", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cpk4 {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", help="reduce an order-4 instance to an order-3 instance")
    r.add_argument("input")
    r.add_argument("-o", "--output", default="-")
    r.add_argument("--trace", help="write the full JSON report here")
    r.add_argument("--claims", default="all")
    r.add_argument("--subset-budget", type=int, default=None)
    r.add_argument("--isr-budget", type=int, default=None)
    r.add_argument("--exact-cap", type=int, default=DEFAULT_EXACT_CAP)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identity)")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="run claim checks on an instance")
    v.add_argument("input")
    v.add_argument("--claims", default="all")
    v.add_argument("--subset-budget", type=int, default=None)
    v.add_argument("--isr-budget", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--report", help="write the JSON report here")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("color", help="decide k-colourability exactly")
    c.add_argument("input")
    c.add_argument("-k", type=int, required=True)
    c.add_argument("--cap", type=int, default=None)
    c.set_defaults(func=cmd_color)

    s = sub.add_parser("search", help="search for a 4-chromatic triangle gluing on a base graph")
    s.add_argument("input")
    s.add_argument("--budget", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", default="-")
    s.set_defaults(func=cmd_search)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--cycles", default="", help="comma-separated LENGTH:COUNT pairs")
    g.add_argument("--triangles", type=int, default=0)
    g.add_argument("--order", type=int, default=4, choices=(3, 4))
    g.add_argument("--coverage", type=float, default=1.0)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv_echo = ["cpk4", *argv]
        return args.func(args)
    except UsageError as exc:
        print(f"cpk4: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
