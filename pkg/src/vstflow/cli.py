"""Command-line entry point: check, test, run, soundness.

Exit codes: 0 success, 1 insecure (rule failure, counterexample or
soundness violation), 2 broken input, 3 inconclusive only.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Optional

from .checker import MUTATIONS, ConfigError, Derivation, check_program
from .core import UNDEF, BoolVal, Env, IntVal, Kcall, KloopBody, KloopIncr, Kseq, MachineState, PtrVal, Value
from .oracle import (
    Counterexample,
    EnumerationBudget,
    Inconclusive,
    Pass,
    function_setup,
    guard_style_report,
    check_direct_ni,
)
from .parser import ParseError, parse_file
from .semantics import Next, Stuck, Done, step

log = logging.getLogger("vstflow")

EXIT_OK, EXIT_INSECURE, EXIT_BROKEN, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def parse_domain(text: str) -> tuple[Value, ...]:
    """`0..k` or a comma list of values."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(IntVal(i) for i in range(int(lo), int(hi) + 1))
    return tuple(parse_value(t.strip()) for t in text.split(",") if t.strip())


def parse_value(text: str) -> Value:
    if text == "true":
        return BoolVal(True)
    if text == "false":
        return BoolVal(False)
    if text == "UNDEF":
        return UNDEF
    if text.startswith("@"):
        return PtrVal(int(text[1:]))
    return IntVal(int(text))


def budget_from(args) -> EnumerationBudget:
    return EnumerationBudget(parse_domain(args.domain), args.max_pairs, args.fuel, args.sync_bound)


def _emit(args, doc, human_lines):
    if args.format == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _span(sp) -> Optional[dict]:
    return {"line": sp.line, "col": sp.col} if sp is not None else None


# ---------------------------------------------------------------- check


def check_file(path, only=None, mutations=()) -> list[dict]:
    prog = parse_file(path)
    verdicts = check_program(prog, only=only, mutations=mutations)
    out = []
    for name, v in verdicts.items():
        if isinstance(v, Derivation):
            out.append({"function": name, "verdict": "accepted", "rule": v.rule, "span": _span(v.span)})
        else:
            rec = {"function": name, "verdict": "rejected", "rule": v.rule, "span": _span(v.span), "premise": v.premise}
            if v.witness:
                rec["witness"] = v.witness
            out.append(rec)
    return out


def cmd_check(args) -> int:
    files, code, lines = [], EXIT_OK, []
    for path in args.files:
        try:
            res = check_file(path, args.function, args.mutate)
        except (ParseError, ConfigError) as err:
            files.append({"file": str(path), "error": str(err)})
            lines.append(f"{path}: error: {err}")
            code = EXIT_BROKEN
            continue
        files.append({"file": str(path), "functions": res})
        for r in res:
            where = f" at {r['span']['line']}:{r['span']['col']}" if r.get("span") else ""
            if r["verdict"] == "accepted":
                lines.append(f"{path}: {r['function']}: accepted ({r['rule']})")
            else:
                lines.append(f"{path}: {r['function']}: rejected by {r['rule']}{where}: {r['premise']}")
                if code == EXIT_OK:
                    code = EXIT_INSECURE
    _emit(args, {"command": "check", "files": files}, lines)
    return code


# ---------------------------------------------------------------- test


def _verdict_name(v) -> str:
    return {Pass: "pass", Counterexample: "counterexample", Inconclusive: "inconclusive"}[type(v)]


def test_file(path, budget, only=None, guard=True) -> list[dict]:
    prog = parse_file(path)
    out = []
    for f in prog.functions:
        if only is not None and f.name != only:
            continue
        decls, pre, body, post, funcs, hs, variables, fixed = function_setup(prog, f.name)
        direct = check_direct_ni(decls, pre, body, post, budget, funcs, hs, variables, fixed)
        rec = {
            "program": str(path),
            "function": f.name,
            "pairsChecked": direct.pairs_checked,
            "truncated": bool(getattr(direct, "truncated", False)),
            "direct": _verdict_name(direct),
        }
        verdict = direct
        if guard:
            g = guard_style_report(decls, pre, body, post, None, budget, funcs, hs, variables, fixed)
            rec["guardStyle"] = _verdict_name(g.verdict)
            if g.skipped:
                rec["skippedTests"] = g.skipped
            if not isinstance(verdict, Counterexample) and isinstance(g.verdict, Counterexample):
                verdict = g.verdict
        rec["verdict"] = _verdict_name(verdict)
        if isinstance(verdict, Counterexample):
            rec["counterexample"] = verdict.to_json()
        out.append(rec)
    return out


def _test_code(recs) -> int:
    verdicts = {r["verdict"] for r in recs}
    if "counterexample" in verdicts:
        return EXIT_INSECURE
    if "inconclusive" in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_test(args) -> int:
    budget = budget_from(args)
    files, recs, lines = [], [], []
    broken = False
    for path in args.files:
        try:
            res = test_file(path, budget, args.function, not args.direct_only)
        except (ParseError, ConfigError) as err:
            files.append({"file": str(path), "error": str(err)})
            lines.append(f"{path}: error: {err}")
            broken = True
            continue
        files.append({"file": str(path), "functions": res})
        recs += res
        for r in res:
            line = f"{path}: {r['function']}: {r['verdict']} ({r['pairsChecked']} pairs"
            line += ", truncated)" if r["truncated"] else ")"
            if "counterexample" in r:
                dp = r["counterexample"]["divergencePoint"]
                line += f": {dp['kind']} {dp['detail']}"
            lines.append(line)
    _emit(args, {"command": "test", "files": files}, lines)
    code = _test_code(recs)
    if broken and code == EXIT_OK:
        return EXIT_BROKEN
    return code


# ---------------------------------------------------------------- run


def _head_kind(s: MachineState) -> Optional[str]:
    if not s.conts:
        return None
    h = s.conts[0]
    match h:
        case Kseq(st):
            return f"Kseq:{type(st).__name__}"
        case KloopIncr():
            return "KloopIncr"
        case KloopBody():
            return "KloopBody"
        case Kcall(f, _, _):
            return f"Kcall:{f}"
    return type(h).__name__


def trace(s: MachineState, fuel: int, functions) -> tuple[list[dict], str]:
    out = []
    for n in range(fuel):
        r = step(s, functions)
        match r:
            case Done():
                return out, "done"
            case Stuck(reason):
                return out, f"stuck: {reason}"
            case Next(s2):
                env_delta = {k: str(v) for k, v in s2.env.items() if s.env.get(k, UNDEF) != v or k not in s.env}
                mem_delta = {str(i): str(v) for i, v in enumerate(s2.mem) if i >= len(s.mem) or s.mem[i] != v}
                out.append({
                    "stepIndex": n,
                    "headContinuationKind": _head_kind(s),
                    "envDelta": env_delta,
                    "memDelta": mem_delta,
                })
                s = s2
    return out, "fuel exhausted"


def _find_counterexample(doc, fname: str) -> Optional[dict]:
    """Accept a whole `test --format json` document, one function record, or a bare counterexample."""
    if "s1" in doc:
        return doc
    if "counterexample" in doc:
        return doc["counterexample"]
    for f in doc.get("files", []):
        for rec in f.get("functions", []):
            if rec.get("function") == fname and "counterexample" in rec:
                return rec["counterexample"]
    return None


def cmd_run(args) -> int:
    try:
        prog = parse_file(args.files[0])
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BROKEN
    fname = args.function or prog.functions[-1].name
    try:
        f = prog.function(fname)
    except KeyError:
        print(f"error: no function {fname}", file=sys.stderr)
        return EXIT_BROKEN
    env = {l: UNDEF for l in f.local_names}
    mem: list[Value] = [IntVal(0)] * (prog.heap_size or 0)
    if args.replay:
        ce = _find_counterexample(json.loads(Path(args.replay).read_text()), fname)
        if ce is None:
            print(f"error: no counterexample for {fname} in {args.replay}", file=sys.stderr)
            return EXIT_BROKEN
        side = ce["s1"] if args.side == 1 else ce["s2"]
        env.update({k: parse_value(v) for k, v in side["env"].items()})
        mem = [parse_value(v) for v in side["mem"]]
    for item in args.set or []:
        k, v = item.split("=", 1)
        env[k] = parse_value(v)
    if args.mem:
        mem = [parse_value(v) for v in args.mem.split(",")]
    s = MachineState(Env(env), (Kseq(f.body),), tuple(mem))
    steps, outcome = trace(s, args.fuel, prog.function_table())
    doc = {"command": "run", "function": fname, "outcome": outcome, "trace": steps}
    lines = [f"{t['stepIndex']}: {t['headContinuationKind']} env{t['envDelta']} mem{t['memDelta']}" for t in steps]
    lines.append(outcome)
    _emit(args, doc, lines)
    return EXIT_OK if not outcome.startswith("stuck") else EXIT_INSECURE


# ---------------------------------------------------------------- soundness


def corpus_files(root: Optional[str]) -> list[Path]:
    if root is None:
        root = os.environ.get("VSTFLOW_CORPUS")
    if root is None:
        root = str(resources.files("vstflow") / "corpus")
    p = Path(root)
    if p.is_file():
        return [p]
    return sorted(p.glob("*.ifc.c"))


def cmd_soundness(args) -> int:
    budget = budget_from(args)
    files = corpus_files(args.files[0] if args.files else None)
    if not files:
        log.warning("empty corpus: nothing to check")
        _emit(args, {"command": "soundness", "matrix": [], "violations": []}, ["warning: empty corpus"])
        return EXIT_OK
    matrix, violations, lines = [], [], []
    for path in files:
        try:
            checks = {r["function"]: r for r in check_file(path, mutations=args.mutate)}
        except (ParseError, ConfigError) as err:
            matrix.append({"file": path.name, "error": str(err)})
            lines.append(f"{path.name}: error: {err}")
            continue
        for fname, chk in checks.items():
            row = {"file": path.name, "function": fname, "checkerVerdict": chk["verdict"], "oracleVerdict": None}
            if chk["verdict"] == "accepted" or args.all:
                rec = test_file(path, budget, fname, not args.direct_only)[0]
                row["oracleVerdict"] = rec["verdict"]
                if chk["verdict"] == "accepted" and rec["verdict"] == "counterexample":
                    violations.append({"file": path.name, "function": fname, "counterexample": rec["counterexample"]})
            matrix.append(row)
            lines.append(f"{path.name}:{fname}: checker={row['checkerVerdict']} oracle={row['oracleVerdict']}")
    for v in violations:
        lines.append(f"SOUNDNESS VIOLATION: {v['file']}:{v['function']}")
    _emit(args, {"command": "soundness", "matrix": matrix, "violations": violations}, lines)
    return EXIT_INSECURE if violations else EXIT_OK


# ---------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--fuel", type=int, default=10_000)
    common.add_argument("--sync-bound", type=int, default=10_000)
    common.add_argument("--domain", default="0..1", help="value domain for unconstrained slots, `0..k` or a list")
    common.add_argument("--max-pairs", type=int, default=200_000)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites (checks here are exhaustive)")
    common.add_argument("--function", default=None)
    common.add_argument("--mutate", action="append", choices=MUTATIONS, default=[])
    common.add_argument("--direct-only", action="store_true", help="skip the guard-style judgment")

    p = argparse.ArgumentParser(prog="vstflow", description="IFC verifier, interpreter and semantic oracle")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="run the IFC checker").add_argument("files", nargs="+")
    sub.add_parser("test", parents=[common], help="two-run non-interference testing").add_argument("files", nargs="+")
    r = sub.add_parser("run", parents=[common], help="execute a function and print a step trace")
    r.add_argument("files", nargs=1)
    r.add_argument("--replay", help="counterexample JSON to replay")
    r.add_argument("--side", type=int, choices=(1, 2), default=1)
    r.add_argument("--set", action="append", help="name=value initial binding")
    r.add_argument("--mem", help="comma-separated initial memory")
    s = sub.add_parser("soundness", parents=[common], help="checker-vs-oracle over a corpus")
    s.add_argument("files", nargs="?", help="corpus directory (default $VSTFLOW_CORPUS or the shipped corpus)")
    s.add_argument("--all", action="store_true", help="also test rejected programs")
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    if args.command == "soundness" and args.files is not None:
        args.files = [args.files]
    try:
        budget_from(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BROKEN
    handler = {"check": cmd_check, "test": cmd_test, "run": cmd_run, "soundness": cmd_soundness}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
