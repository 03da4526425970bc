"""Command-line entry point."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .baselines import Baselines
from .bounds import BudgetExceededError as TopTypeBudgetError
from .bounds import ExcludedTypeError, check_prop_nil
from .fq_counter import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    count_jet_points,
    count_jets_over_fixed,
    estimate_dimension,
)
from .groups import GroupCapError, commutator_distribution, convolve_power, enumerate_group, fiber_report
from .polysys import export_system, format_system, jet_system, multiplicative_system
from .quiver import (
    DimensionMismatchError,
    DomainError,
    Quiver,
    euler_form,
    p_value,
    rep_space_dim,
    sym_form,
)
from .reptypes import InvalidTypeError, RepType, enumerate_rep_types, local_quiver
from .suite import ConfigError, SuiteConfig, emit_report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _quiver(args) -> tuple[Quiver, list[int]]:
    """``--arrows 0>0,0>1`` with ``--dims``, or the loop quiver from ``--g``/``--n``."""
    if getattr(args, "arrows", None) is not None:
        if args.dims is None:
            raise UsageError("--arrows needs --dims")
        dims = _ints(args.dims)
        arrows = []
        for part in filter(None, args.arrows.split(",")):
            try:
                t, h = part.split(">")
                arrows.append((int(t), int(h)))
            except ValueError as exc:
                raise UsageError(f"bad arrow {part!r}; use tail>head") from exc
        return Quiver(len(dims), tuple(arrows)), dims
    if args.g is None or args.n is None:
        raise UsageError("give --g and --n, or --arrows and --dims")
    return Quiver.loops(args.g), [args.n]


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit(payload: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    else:
        text = "".join(f"{k}: {v}\n" for k, v in payload.items())
    _write(text, args.out)


def cmd_forms(args) -> int:
    q, dims = _quiver(args)
    other = _ints(args.other) if args.other else dims
    _emit(
        {
            "dims": dims,
            "euler": euler_form(q, dims, other),
            "symmetric": sym_form(q, dims, other),
            "p": p_value(q, dims),
            "rep_space_dim": rep_space_dim(q, dims),
        },
        args,
    )
    return EXIT_OK


def cmd_types(args) -> int:
    types = enumerate_rep_types(args.g, args.n)
    if args.format == "json":
        _emit({"g": args.g, "n": args.n, "types": [t.encode() for t in types]}, args)
    else:
        _write("".join(f"{t.encode()}\t{t}\n" for t in types), args.out)
    return EXIT_OK


def cmd_local_quiver(args) -> int:
    tau = RepType.decode(args.tau)
    lq = local_quiver(Quiver.loops(args.g), tau)
    _emit(
        {
            "tau": tau.encode(),
            "dims": list(lq.dims),
            "loops": lq.quiver.loop_counts(),
            "arrows": [f"{t}>{h}" for t, h in lq.quiver.arrows if t != h],
            "p": p_value(lq.quiver, lq.dims),
        },
        args,
    )
    return EXIT_OK


def cmd_check_bounds(args) -> int:
    if args.tau:
        types = [RepType.decode(args.tau)]
    else:
        types = [t for t in enumerate_rep_types(args.g, args.n) if not t.is_simple()]
    rows = []
    failed = False
    for tau in types:
        rep = check_prop_nil(args.g, args.n, tau, args.budget or 12)
        failed |= not rep.passed
        rows.append(
            {
                "tau": tau.encode(),
                "max_bound": rep.max_bound,
                "target": rep.target,
                "passed": rep.passed,
                "p_form_target": rep.p_form_target,
                "p_form_passed": rep.p_form_passed,
                "top_types": len(rep.per_top_type),
            }
        )
    if args.format == "json":
        _emit({"g": args.g, "n": args.n, "rows": rows}, args)
    else:
        lines = [
            f"{r['tau']}\tbound={r['max_bound']}\ttarget={r['target']}\t{'pass' if r['passed'] else 'FAIL'}\n"
            for r in rows
        ]
        _write("".join(lines), args.out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_jets_export(args) -> int:
    if args.mode == "multiplicative":
        ps = multiplicative_system(args.g, args.n, args.variant)
    else:
        q, dims = _quiver(args)
        ps = jet_system(q, dims, args.jet_order)
    if args.out:
        export_system(ps, args.out)
    else:
        sys.stdout.write(format_system(ps))
    return EXIT_OK


def cmd_count(args) -> int:
    q, dims = _quiver(args)
    budget = args.budget or DEFAULT_BUDGET
    payload: dict = {"dims": dims, "jet_order": args.jet_order, "mode": args.mode}
    try:
        if args.mode == "fixed":
            res = count_jets_over_fixed(q, dims, args.prime, args.jet_order, budget)
        else:
            res = count_jet_points(q, dims, args.prime, args.jet_order, budget)
    except BudgetExceededError as exc:
        payload.update(status="budget", message=str(exc))
        _emit(payload, args)
        return EXIT_FAIL
    payload.update(p=res.p, count=res.count, expected_exponent=res.expected_exponent, ratio=str(res.ratio))
    if args.mode == "jets":
        payload["heuristic"] = estimate_dimension([res]).note
    if args.freeze or args.check_baseline:
        base = Baselines(args.baselines)
        kind = "jets" if args.mode == "jets" else "fixed-jets"
        if getattr(args, "arrows", None) is None:
            params = {"g": args.g, "n": args.n}
        else:
            params = {"dims": ",".join(map(str, dims)), "arrows": args.arrows}
        params.update(p=args.prime, m=args.jet_order)
        if args.freeze:
            base.set(kind, res.count, **params)
            base.save()
            payload["baseline"] = "frozen"
        else:
            frozen = base.get(kind, **params)
            payload["baseline"] = "missing" if frozen is None else ("match" if frozen == res.count else f"diff {frozen}")
            if frozen is not None and frozen != res.count:
                _emit(payload, args)
                return EXIT_FAIL
    _emit(payload, args)
    return EXIT_OK


def cmd_count_group(args) -> int:
    grp = enumerate_group(args.prime, args.n, args.variant)
    fib = convolve_power(commutator_distribution(grp), args.g, grp)
    fr = fiber_report(grp, args.g)
    if args.dump:
        Path(args.dump).write_text("".join(f"{i} {int(c)}\n" for i, c in enumerate(fib)), encoding="utf-8")
    _emit(
        {
            "group": f"{args.variant}_{args.n}(F_{args.prime})",
            "order": grp.order,
            "g": args.g,
            "total": int(sum(fib)),
            "identity_fibre": int(fib[grp.identity]),
            "classes": len(fr.classes),
            "min_ratio": fr.min_ratio,
            "max_ratio": fr.max_ratio,
            "note": fr.note,
        },
        args,
    )
    return EXIT_OK


def cmd_suite(args) -> int:
    config = SuiteConfig.load(args.config) if args.config else SuiteConfig()
    report = run_suite(config, Baselines(args.baselines), freeze=args.freeze)
    return emit_report(report, args.format, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quivjet", description=__doc__, allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"quivjet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, quiver=False, fmt=True):
        p.add_argument("--g", type=int)
        p.add_argument("--n", type=int)
        if quiver:
            p.add_argument("--arrows", help="explicit arrows, e.g. 0>0,0>1")
            p.add_argument("--dims", help="dimension vector, e.g. 1,2")
        if fmt:
            p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out")
        return p

    p = common(sub.add_parser("forms", allow_abbrev=False, help="Euler form, symmetric form and p"), quiver=True)
    p.add_argument("--other", help="second dimension vector for the pairings")
    p.set_defaults(func=cmd_forms)

    p = common(sub.add_parser("types", allow_abbrev=False, help="list representation types"))
    p.set_defaults(func=cmd_types, need=("g", "n"))

    p = common(sub.add_parser("local-quiver", allow_abbrev=False, help="local quiver of a type"))
    p.add_argument("--tau", required=True)
    p.set_defaults(func=cmd_local_quiver, need=("g",))

    p = common(sub.add_parser("check-bounds", allow_abbrev=False, help="top-type bounds against the nilpotent target"))
    p.add_argument("--tau")
    p.add_argument("--budget", type=int, help="top-type budget on sum(e)")
    p.set_defaults(func=cmd_check_bounds, need=("g", "n"))

    jets = sub.add_parser("jets", allow_abbrev=False, help="polynomial systems")
    jsub = jets.add_subparsers(dest="jets_command", required=True)
    p = common(jsub.add_parser("export", allow_abbrev=False, help="write a system in the text interchange format"), quiver=True, fmt=False)
    p.add_argument("--jet-order", type=int, default=0)
    p.add_argument("--mode", choices=("jets", "multiplicative"), default="jets")
    p.add_argument("--variant", choices=("GL", "SL"), default="SL")
    p.set_defaults(func=cmd_jets_export)

    p = common(sub.add_parser("count", allow_abbrev=False, help="exact point counts over F_p"), quiver=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--jet-order", type=int, default=0)
    p.add_argument("--mode", choices=("jets", "fixed"), default="jets")
    p.add_argument("--budget", type=int)
    p.add_argument("--freeze", action="store_true")
    p.add_argument("--check-baseline", action="store_true")
    p.add_argument("--baselines")
    p.set_defaults(func=cmd_count)

    p = common(sub.add_parser("count-group", allow_abbrev=False, help="commutator counts in GL_n/SL_n(F_p)"))
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--variant", choices=("GL", "SL"), default="GL")
    p.add_argument("--dump", help="write 'index count' lines for every element")
    p.set_defaults(func=cmd_count_group, need=("g", "n"))

    p = sub.add_parser("suite", allow_abbrev=False, help="run the full check suite")
    p.add_argument("--config")
    p.add_argument("--baselines")
    p.add_argument("--freeze", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    missing = [f"--{k}" for k in getattr(args, "need", ()) if getattr(args, k) is None]
    if missing:
        parser.error(f"{args.command} needs {' '.join(missing)}")
    try:
        return args.func(args)
    except (UsageError, ConfigError, DomainError, DimensionMismatchError, InvalidTypeError) as exc:
        print(f"quivjet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExcludedTypeError as exc:
        print(f"quivjet: excluded type: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TopTypeBudgetError, GroupCapError) as exc:
        print(f"quivjet: budget: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"quivjet: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
