"""Command line entry point: ``l1cwc <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import construct, designs, develop as dev
from .bounds import known_value
from .core import CodeError, CodeParams, FormatError, format_code, parse_q, read_code, verify_code

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VERIFY = 3
EXIT_BUDGET = 4
EXIT_NO_RECIPE = 5


@dataclass
class CommandResult:
    status: int
    text: str
    payload: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


def _params(args, allowed_q=None) -> CodeParams:
    try:
        q = parse_q(args.q)
    except ValueError:
        raise UsageError(f"bad --q {args.q!r}; expected an integer >= 2 or 'inf'") from None
    if allowed_q is not None and q not in allowed_q:
        raise UsageError(f"--q must be one of {sorted('inf' if v == 0 else str(v) for v in allowed_q)}")
    try:
        return CodeParams(args.n, q, args.w, args.d)
    except CodeError as e:
        raise UsageError(str(e)) from None


def _param_dict(p: CodeParams) -> dict:
    return {"n": p.n, "q": p.q_text(), "w": p.w, "d": p.d}


def cmd_bound(args) -> CommandResult:
    p = _params(args)
    b = known_value(p)
    return CommandResult(EXIT_OK, b.describe(), {"params": _param_dict(p), "bound": b.as_dict()})


def _build(p: CodeParams, seed: int):
    key = (p.q, p.w, p.d)
    if key == (3, 3, 4):
        return construct.build_t3_w3_d4(p.n, seed)
    if key == (3, 4, 4):
        return construct.build_t3_w4_d4(p.n)
    if key == (3, 4, 6):
        return construct.build_t3_w4_d6(p.n)
    if key == (0, 3, 4):
        return construct.build_z_w3_d4(p.n, seed)
    if key == (0, 4, 4):
        return construct.build_z_w4_d4(p.n)
    if key == (0, 4, 6):
        return construct.build_z_w4_d6(p.n)
    if p.q == 3 and p.w >= 3 and p.d == 2 * p.w - 2:
        return construct.build_t3_general(p.n, p.w, seed=seed).code
    raise construct.ConstructionError(f"no construction for {p}")


def cmd_construct(args) -> CommandResult:
    p = _params(args, allowed_q={3, 0})
    try:
        code = _build(p, args.seed)
    except construct.NoRecipe as e:
        return CommandResult(EXIT_NO_RECIPE, str(e), {"params": _param_dict(p), "error": str(e),
                                                      "nearest": e.nearest})
    except (construct.ConstructionError, construct.InfeasibleByCount) as e:
        return CommandResult(EXIT_NO_RECIPE, str(e), {"params": _param_dict(p), "error": str(e)})
    footer = [f"provenance: {code.provenance}", f"size: {len(code)}"]
    text = format_code(code, footer=footer)
    payload = {"params": _param_dict(p), "size": len(code), "provenance": code.provenance}
    if args.out:
        Path(args.out).write_text(text)
        payload["file"] = str(args.out)
        text = f"wrote {len(code)} words to {args.out} ({code.provenance})"
    else:
        text = text.rstrip("\n")
    return CommandResult(EXIT_OK, text, payload)


def cmd_verify(args) -> CommandResult:
    try:
        code = read_code(args.file)
    except (OSError, FormatError, CodeError) as e:
        return CommandResult(EXIT_INVALID, f"cannot read {args.file}: {e}", {"error": str(e)})
    rep = verify_code(code)
    return CommandResult(EXIT_OK if rep.ok else EXIT_VERIFY, rep.summary(), {"report": rep.as_dict()})


def cmd_develop(args) -> CommandResult:
    try:
        b = dev.load_base_blocks(args.file)
        code = dev.develop(b)
    except (OSError, FormatError, CodeError, ValueError) as e:
        return CommandResult(EXIT_INVALID, f"cannot develop {args.file}: {e}", {"error": str(e)})
    payload = {"params": _param_dict(code.params), "size": len(code), "bases": len(b.bases)}
    text = format_code(code, footer=[f"developed from {len(b.bases)} base codewords under {b.perm}"])
    status = EXIT_OK
    if args.verify:
        rep = verify_code(code)
        problems = [] if rep.ok else ["verification failed"]
        if b.expect_size is not None and len(code) != b.expect_size:
            problems.append(f"developed {len(code)} words, file expects {b.expect_size}")
        if "propertyA" in b.flags and not dev.check_property_A(code):
            problems.append("Property A fails")
        if "propertyB" in b.flags and not dev.check_property_B(code):
            problems.append("Property B fails")
        payload["report"] = rep.as_dict()
        payload["problems"] = problems
        text += rep.summary() + "".join(f"\n{x}" for x in problems)
        status = EXIT_VERIFY if problems else EXIT_OK
    return CommandResult(status, text.rstrip("\n"), payload)


def cmd_search(args) -> CommandResult:
    from .search import SearchConfig, max_code_exact, parse_budget

    p = _params(args)
    try:
        budget = parse_budget(args.budget) if args.budget else {}
    except ValueError as e:
        raise UsageError(str(e)) from None
    warm = None
    if args.warm:
        try:
            warm = read_code(args.warm)
        except (OSError, FormatError, CodeError) as e:
            raise UsageError(f"cannot read --warm file: {e}") from None
        if warm.params != p:
            raise UsageError(f"--warm file is a {warm.params} code, search is for {p}")
    cfg = SearchConfig(seed=args.seed, prune_with_census=args.prune == "census", initial_lower=warm, **budget)
    try:
        res = max_code_exact(p, cfg)
    except (designs.TooLarge, ValueError) as e:
        return CommandResult(EXIT_INVALID, str(e), {"params": _param_dict(p), "error": str(e)})
    verdict = "proven optimal" if res.proven_optimal else "budget exhausted, not proven optimal"
    footer = [f"{verdict}; {res.nodes} nodes, {res.elapsed:.2f}s"]
    payload = {"params": _param_dict(p), "size": len(res.code), "proven_optimal": res.proven_optimal,
               "nodes": res.nodes, "words": [str(u) for u in res.code.words]}
    return CommandResult(EXIT_OK if res.proven_optimal else EXIT_BUDGET,
                         format_code(res.code, footer=footer).rstrip("\n"), payload)


def cmd_catalog(args) -> CommandResult:
    tables = dev.manifest()
    lines = ["tables:"]
    rows = []
    for tid in sorted(tables, key=lambda t: (tables[t]["n"], t)):
        e = tables[tid]
        flags = ",".join(e.get("flags", []))
        lines.append(f"  {tid:6} n={e['n']:<4} size={e['size']:<5} {flags}".rstrip())
        rows.append({"id": tid, "n": e["n"], "size": e["size"], "flags": e.get("flags", [])})
    lines.append("gdds:")
    gdds = []
    for gid in designs.catalog_ids():
        prov = [x for x in designs.catalog_provenance(gid) if not x.startswith("type ")]
        lines.append(f"  {gid:6} {'; '.join(prov)}")
        gdds.append({"type": gid, "provenance": prov})
    return CommandResult(EXIT_OK, "\n".join(lines), {"tables": rows, "gdds": gdds})


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    ap = argparse.ArgumentParser(prog="l1cwc", description="Constant-weight codes in the l1 metric.")
    ap.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_params(sp, q_choices=None):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--q", required=True, choices=q_choices,
                        help="alphabet size, or 'inf' for the non-negative integers")
        sp.add_argument("--w", type=int, required=True)
        sp.add_argument("--d", type=int, required=True)

    sp = sub.add_parser("bound", parents=[common], help="best known value or bound")
    with_params(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("construct", parents=[common], help="build a code")
    with_params(sp, ["3", "inf"])
    sp.add_argument("--out", help="write the code file here")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", parents=[common], help="check a code file")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("develop", parents=[common], help="develop base codewords")
    sp.add_argument("--file", required=True)
    sp.add_argument("--verify", action="store_true")
    sp.set_defaults(func=cmd_develop)

    sp = sub.add_parser("search", parents=[common], help="exact search for a largest code")
    with_params(sp)
    sp.add_argument("--budget", help="e.g. 60s or 1e7nodes")
    sp.add_argument("--prune", choices=["census", "none"], default="census")
    sp.add_argument("--warm", help="code file to start from")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("catalog", parents=[common], help="bundled tables and GDDs")
    sp.add_argument("--list", action="store_true", required=True)
    sp.set_defaults(func=cmd_catalog)
    return ap


def run(argv=None) -> tuple[CommandResult, bool]:
    args = _parser().parse_args(argv)
    try:
        return args.func(args), args.json
    except UsageError as e:
        return CommandResult(EXIT_INVALID, f"l1cwc {args.command}: {e}", {"error": str(e)}), args.json


def main(argv=None) -> int:
    res, as_json = run(argv)
    stream = sys.stdout if res.status in (EXIT_OK, EXIT_VERIFY, EXIT_BUDGET) else sys.stderr
    if as_json:
        print(json.dumps({"status": res.status, **res.payload}, sort_keys=True), file=stream)
    else:
        print(res.text, file=stream)
    return res.status


if __name__ == "__main__":
    sys.exit(main())
