"""Command line: describe groups, decide powerfulness of V(FG), replay identities, run the census.

Exit codes: 0 consistent, 1 falsification signal (a nonabelian case judged
powerful, or a failed identity), 2 usage or parse error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .algebra import GroupAlgebra
from .certify import (
    DEFAULT_BUDGET,
    DEFAULT_SAMPLES,
    certificate_from_dict,
    is_powerful_v,
)
from .descriptor import DescriptorError, build, parse_descriptor
from .field import FieldError, FiniteField, parse_field
from .groups import (
    Cyclic,
    GroupError,
    Modular,
    center,
    derived_subgroup,
    exponent,
    frattini,
    is_powerful_table,
    newman_class2_check,
)
from .units import DEFAULT_THRESHOLD, ThresholdExceeded, check_enumeration, v_size
from .witnesses import ReplayError, central_product_structure, m_inverse_crosscheck, replay_even, replay_odd

SCHEMA = 1
EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

CENSUS_ABELIAN = ["C2", "C4", "C8", "C2xC2", "C2xC4", "C9", "C27"]
CENSUS_NONABELIAN = [
    "D8", "Q8", "D16", "M16", "D8xC2", "H3", "MOD3,1", "H5",
    "C8YD8", "C8YD8YD8", "M16YD8", "C16YD8",
]
CENSUS_FIELDS = ["2", "2^2", "3", "5"]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# commands


def cmd_describe(args) -> tuple[dict, int]:
    G = build(args.descriptor)
    Z, D, Phi = center(G), derived_subgroup(G), frattini(G)
    out = {
        "group": G.name,
        "order": G.order,
        "prime": G.p,
        "abelian": G.is_abelian(),
        "center": Z.labels(),
        "center_cyclic": Z.is_cyclic(),
        "derived": D.labels(),
        "frattini": Phi.labels(),
        "exponent": exponent(G),
        "powerful": is_powerful_table(G),
        "newman_class2": newman_class2_check(G),
    }
    return out, EXIT_OK


def _verdict_exit(G, verdict) -> int:
    if verdict.status == "Powerful" and not G.is_abelian():
        return EXIT_FALSIFIED
    if verdict.status == "Unknown":
        return EXIT_LIMIT
    return EXIT_OK


def cmd_valg(args) -> tuple[dict, int]:
    G = build(args.descriptor)
    F = parse_field(args.field)
    A = GroupAlgebra(F, G)
    size = v_size(A)
    verdict = is_powerful_v(A, args.threshold, args.budget, args.samples, args.seed)
    out = {
        "group": G.name,
        "field": F.name,
        "v_size": size,
        "v_size_expr": f"{F.order}^{G.order - 1}",
        "enumerable": size <= args.threshold,
        "verdict": verdict.to_dict(),
    }
    if verdict.certificate is not None:
        out["certificate_reverified"] = certificate_from_dict(
            json.loads(verdict.certificate.to_json()), args.threshold
        ).verify()
    code = _verdict_exit(G, verdict)
    if verdict.certificate is not None and not out["certificate_reverified"]:
        code = EXIT_FALSIFIED
    return out, code


def _parse_base(text: str):
    spec = parse_descriptor(text)
    if not isinstance(spec, (Cyclic, Modular)):
        raise UsageError(f"central-product base must be cyclic or modular, got {text!r}")
    return spec


def cmd_replay(args) -> tuple[dict, int]:
    case = args.case.replace(" ", "")
    kind, _, rest = case.partition(":")
    if kind == "odd":
        p_s, _, desc = rest.partition(":")
        p = int(p_s)
        report = replay_odd(p, build(desc), FiniteField(p))
    elif kind == "even":
        desc, _, fld = rest.partition("@")
        F = parse_field(fld) if fld else FiniteField(2)
        report = replay_even(build(desc), F, args.samples, args.seed, args.threshold)
    elif kind == "minv":
        report = m_inverse_crosscheck(int(rest))
    elif kind == "cp":
        base, _, r = rest.rpartition(":")
        report = central_product_structure(_parse_base(base), int(r), args.samples, args.seed, args.budget)
    else:
        raise UsageError(f"unknown replay case {args.case!r}; use odd:p:<desc>, even:<desc>, minv:m or cp:<base>:<r>")
    return report, EXIT_OK if report["passed"] else EXIT_FALSIFIED


def census_case(desc: str, field_text: str, threshold: int, budget: int, samples: int, seed: int) -> dict:
    G = build(desc)
    F = parse_field(field_text)
    A = GroupAlgebra(F, G)
    size = v_size(A)
    rec = {
        "group": G.name,
        "field": F.name,
        "order": G.order,
        "abelian": G.is_abelian(),
        "v_size_expr": f"{F.order}^{G.order - 1}",
        "v_bits": (G.order - 1) * F.k * (F.p.bit_length() - 1) if F.p == 2 else None,
        "enumerable": size <= threshold,
    }
    if F.p != 2:
        rec["v_bits"] = round((G.order - 1) * F.k * __import__("math").log2(F.p), 2)
    if size <= threshold:
        rec["enumerated"] = check_enumeration(A, threshold)
        rec["order_formula_ok"] = rec["enumerated"] == size
    else:
        rec["order_formula_ok"] = size == F.order ** (G.order - 1)
    verdict = is_powerful_v(A, threshold, budget, samples, seed)
    rec["status"] = verdict.status
    rec["method"] = verdict.method
    if verdict.reason:
        rec["reason"] = verdict.reason
    if verdict.certificate is not None:
        rec["certificate"] = verdict.certificate.kind
        rec["certificate_verified"] = certificate_from_dict(
            json.loads(verdict.certificate.to_json()), threshold
        ).verify()
    rec["consistent"] = (
        rec["order_formula_ok"]
        and not (verdict.status == "Powerful" and not G.is_abelian())
        and rec.get("certificate_verified", True)
    )
    return rec


def census_cases(fields: list[str]) -> list[tuple[str, str]]:
    cases = []
    for desc in CENSUS_ABELIAN + CENSUS_NONABELIAN:
        p = parse_descriptor(desc).prime
        for f in fields:
            if parse_field(f).p == p:
                cases.append((desc, f))
    return cases


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("UNITLAB_THREADS")
    return max(1, int(env)) if env else 1


def cmd_census(args) -> tuple[dict, int]:
    fields = [f.strip() for f in args.fields.split(",") if f.strip()]
    for f in fields:
        parse_field(f)
    threshold = 2**args.max_vlog if args.max_vlog is not None else args.threshold
    cases = census_cases(fields)
    params = (threshold, args.budget, args.samples, args.seed)
    jobs = _jobs(args)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(census_case, d, f, *params) for d, f in cases]
            rows = [fut.result() for fut in futures]
    else:
        rows = [census_case(d, f, *params) for d, f in cases]
    falsified = any(r["status"] == "Powerful" and not r["abelian"] for r in rows)
    inconsistent = not all(r["consistent"] for r in rows)
    out = {
        "threshold": threshold,
        "fields": fields,
        "cases": rows,
        "summary": {
            "cases": len(rows),
            "powerful": sum(r["status"] == "Powerful" for r in rows),
            "not_powerful": sum(r["status"] == "NotPowerful" for r in rows),
            "unknown": sum(r["status"] == "Unknown" for r in rows),
            "falsified": falsified,
            "consistent": not inconsistent,
        },
    }
    return out, EXIT_FALSIFIED if falsified or inconsistent else EXIT_OK


# ---------------------------------------------------------------------------
# output


def _text(command: str, out: dict) -> str:
    if command == "census":
        cols = [("group", 14), ("field", 6), ("|G|", 4), ("|V|", 8), ("enum", 5), ("status", 12), ("method", 12), ("certificate", 18)]
        lines = ["".join(name.ljust(w) for name, w in cols)]
        for r in out["cases"]:
            vals = [
                r["group"], r["field"], str(r["order"]), r["v_size_expr"], "yes" if r["enumerable"] else "no",
                r["status"], r["method"], r.get("certificate", "-"),
            ]
            lines.append("".join(str(v).ljust(w) for v, (_, w) in zip(vals, cols)))
        s = out["summary"]
        lines.append(
            f"{s['cases']} cases: {s['powerful']} powerful, {s['not_powerful']} not powerful, "
            f"{s['unknown']} unknown; consistent={s['consistent']}"
        )
        return "\n".join(lines)
    if "identities" in out:
        lines = [f"case {out['case']}"]
        for e in out["identities"]:
            mark = "ok  " if e["passed"] else "FAIL"
            extra = f"  [{e['offending']}]" if "offending" in e else ""
            lines.append(f"  {mark} {e['step']:<18} {e['name']}{extra}")
        for k, v in out.items():
            if k not in ("identities", "case", "certificate", "schema", "command"):
                lines.append(f"{k}: {v}")
        return "\n".join(lines)
    lines = []
    for k, v in out.items():
        if k in ("schema", "command"):
            continue
        if k == "verdict":
            lines.append(f"verdict: {v['status']} ({v['method']})")
            if "reason" in v:
                lines.append(f"reason: {v['reason']}")
            if "certificate" in v:
                cert = v["certificate"]
                lines.append(f"certificate: {cert['kind']}")
                for key in ("w_text", "x_text", "y_text", "orders", "span_labels", "outside_labels"):
                    if key in cert:
                        lines.append(f"  {key}: {cert[key]}")
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    def add_common(p: argparse.ArgumentParser, defaults: bool):
        sup = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        p.add_argument("--threshold", type=int, default=sup(DEFAULT_THRESHOLD), help="enumeration threshold for |V|")
        p.add_argument("--seed", type=int, default=sup(0), help="seed for sampled checks")
        p.add_argument("--format", choices=["json", "text"], default=sup("text"))
        p.add_argument("--budget", type=int, default=sup(DEFAULT_BUDGET), help="commutator candidates for certificates")
        p.add_argument("--samples", type=int, default=sup(DEFAULT_SAMPLES), help="seeded samples per sampled check")
        p.add_argument("--timing", action="store_true", default=sup(False), help="include wall-clock time")

    parser = argparse.ArgumentParser(prog="unitlab", description=__doc__.splitlines()[0])
    add_common(parser, True)
    common = argparse.ArgumentParser(add_help=False)
    add_common(common, False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", parents=[common], help="subgroup data of a table group")
    p.add_argument("descriptor")

    p = sub.add_parser("valg", parents=[common], help="powerfulness of V(FG)")
    p.add_argument("descriptor")
    p.add_argument("--field", required=True, help="p or p^k")

    p = sub.add_parser("replay", parents=[common], help="replay identities: odd:p:<desc>, even:<desc>, minv:m, cp:<base>:<r>")
    p.add_argument("case")

    p = sub.add_parser("census", parents=[common], help="run the built-in census")
    p.add_argument("--fields", default=",".join(CENSUS_FIELDS))
    p.add_argument("--max-vlog", type=int, default=None, help="enumerate V when log2|V| <= this")
    p.add_argument("--jobs", type=int, default=None)
    return parser


COMMANDS = {"describe": cmd_describe, "valg": cmd_valg, "replay": cmd_replay, "census": cmd_census}


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    try:
        out, code = COMMANDS[args.command](args)
    except (DescriptorError, FieldError, GroupError, ReplayError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ThresholdExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    report = {"schema": SCHEMA, "command": argv, "seed": args.seed, **out}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 3)
    if args.format == "json":
        stdout.write(json.dumps(report, sort_keys=True, indent=1) + "\n")
    else:
        stdout.write(_text(args.command, report) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
