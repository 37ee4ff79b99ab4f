"""Command-line front end.

Subcommands: prob, sample, cs, verify, counterexample, scan.
Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
input error.  Numeric output carries 17 significant digits in JSON mode and
12 in text mode.  Indices are 1-based throughout.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from . import harness
from .harness import CampaignConfig, canonical_json, run_campaign
from .identities import (
    SkipInstance,
    verify_appendix,
    verify_block_diagonal,
    verify_plucker,
)
from .process import (
    ConditioningError,
    EnumerationCapError,
    Frame,
    SubsetEventSpec,
    condition_not_superset,
    counterexample_frame,
    enumerate_distribution,
    is_rank2_determinantal_certificate,
    prob_event,
    sample_many,
)
from .subspaces import classify_case, jordan_angles, pair_containment_stats

EXIT_OK = 0
EXIT_MATH_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _fmt(x: float, fmt: str) -> str:
    return format(float(x), ".17g" if fmt == "json" else ".12g")


def _parse_set(text: str) -> tuple[int, ...]:
    try:
        values = tuple(sorted(int(tok) for tok in text.replace(" ", "").split(",") if tok))
    except ValueError as exc:
        raise UsageError(f"bad index list {text!r}: {exc}") from exc
    if len(set(values)) != len(values):
        raise UsageError(f"repeated index in {text!r}")
    return values


def _load_frame(path: str) -> Frame:
    try:
        return Frame.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load frame from {path}: {exc}") from exc


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(canonical_json(payload))
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_prob(args) -> int:
    f = _load_frame(args.frame)
    event = SubsetEventSpec(
        include=_parse_set(args.include) if args.include else (),
        exclude=_parse_set(args.exclude) if args.exclude else (),
        not_supersets=tuple(_parse_set(s) for s in args.not_superset or []),
    )
    try:
        event.validate(f.n)
        value = prob_event(f, event, method="closed" if len(event.not_supersets) <= 2 else "oracle")
    except (ValueError, ConditioningError) as exc:
        raise UsageError(str(exc)) from exc
    payload = {"probability": value}
    lines = [f"P(event) = {_fmt(value, args.format)}"]
    if math.comb(f.n, f.p) <= args.cap:
        oracle = enumerate_distribution(f).event_prob(event)
        payload["oracle"] = oracle
        payload["oracle_delta"] = abs(value - oracle)
        lines.append(f"oracle    {_fmt(oracle, args.format)}  (delta {abs(value - oracle):.3g})")
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_sample(args) -> int:
    f = _load_frame(args.frame)
    try:
        draws = sample_many(f, args.seed, args.count)
    except EnumerationCapError as exc:
        raise UsageError(str(exc)) from exc
    payload = {"seed": args.seed, "draws": [list(d) for d in draws]}
    _emit(args, payload, [" ".join("-".join(str(i) for i in d) for d in draws)])
    return EXIT_OK


def _cmd_cs(args) -> int:
    f = _load_frame(args.frame)
    set_a = _parse_set(args.set_a)
    set_b = _parse_set(args.set_b)
    try:
        stats = pair_containment_stats(f, set_a, set_b)
        cls = classify_case(f, set_a, set_b)
    except (ConditioningError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    dist = None
    if math.comb(f.n, f.p) <= args.cap:
        dist = enumerate_distribution(f)
    deltas = {}
    if dist is not None:
        deltas = {
            "union": abs(stats.union_prob - dist.marginal(tuple(sorted(set_a + set_b)))),
            "no_block": abs(
                stats.not_superset_prob
                - dist.event_prob(SubsetEventSpec(not_supersets=(set_a, set_b)))
            ),
        }
    payload = {
        "angles_radians": list(stats.angles),
        "angles_degrees": [a * 180.0 / math.pi for a in stats.angles],
        "kappa1": stats.kappa1,
        "kappa2": stats.kappa2,
        "union_prob": stats.union_prob,
        "not_superset_prob": stats.not_superset_prob,
        "cross_inner_sq": stats.cross_inner_sq,
        "case_tag": cls.case_tag,
        "oracle_deltas": deltas,
    }
    fmt = args.format
    lines = [
        "angles (rad): " + " ".join(_fmt(a, fmt) for a in stats.angles),
        "angles (deg): " + " ".join(_fmt(a * 180 / math.pi, fmt) for a in stats.angles),
        f"kappa1 = {_fmt(stats.kappa1, fmt)}   kappa2 = {_fmt(stats.kappa2, fmt)}",
        f"P(union contained) = {_fmt(stats.union_prob, fmt)}",
        f"P(no block contained) = {_fmt(stats.not_superset_prob, fmt)}",
        f"case tag: {cls.case_tag}",
    ]
    if deltas:
        lines.append(
            "oracle deltas: union "
            + f"{deltas['union']:.3g}, no-block {deltas['no_block']:.3g}"
        )
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_counterexample(args) -> int:
    f = counterexample_frame()
    dist = enumerate_distribution(f)
    kappa = dist.event_prob(SubsetEventSpec(not_supersets=((1, 2),)))
    psi = condition_not_superset(f, [(1, 2)])
    law = {combo: psi.prob_of(combo) for combo in ((1, 3), (1, 4), (2, 3), (2, 4), (3, 4))}
    verdict = is_rank2_determinantal_certificate(psi)
    certified = verdict.status == "not determinantal"
    payload = {
        "kappa": kappa,
        "conditional_law": {"-".join(map(str, k)): v for k, v in law.items()},
        "status": verdict.status,
        "witness": [list(w) for w in verdict.witness] if verdict.witness else None,
        "detail": verdict.detail,
    }
    fmt = args.format
    lines = [
        f"P(sample != {{1,2}}) = kappa = {_fmt(kappa, fmt)}",
        "conditional law given {1,2} not contained:",
    ]
    for combo, v in law.items():
        lines.append(f"  {{{combo[0]},{combo[1]}}}: {_fmt(v, fmt)}")
    lines.append(f"certificate: {verdict.status}")
    if verdict.witness:
        (k_lo, r_lo), (k_hi, r_hi) = verdict.witness
        lines.append(
            f"ratio conflict: k={k_lo} gives {_fmt(r_lo, fmt)}, k={k_hi} gives {_fmt(r_hi, fmt)}"
        )
    _emit(args, payload, lines)
    return EXIT_OK if certified else EXIT_MATH_FAIL


def _single_instance_verify(args) -> int:
    ident = args.identity
    if ident == "appendix-M":
        if not args.angles:
            raise UsageError("appendix-M needs --angles a1,a2,...")
        angles = [float(x) for x in args.angles.split(",")]
        if args.k is not None and args.k != len(angles):
            raise UsageError(f"--k {args.k} disagrees with {len(angles)} angles")
        report = verify_appendix(angles)
        extra = {"det": report.diagnostics["det"], "eigmin": report.diagnostics["eigmin"]}
    elif ident == "block-diagonal":
        if not args.angles:
            raise UsageError("block-diagonal needs --angles a1,a2,...")
        report = verify_block_diagonal([float(x) for x in args.angles.split(",")])
        extra = {}
    elif ident == "plucker":
        if not (args.xs and args.y):
            raise UsageError("plucker needs --xs and --y coordinate lists")
        report = verify_plucker(
            [float(v) for v in args.xs.split(",")], [float(v) for v in args.y.split(",")]
        )
        extra = {}
    elif args.frame:
        f = _load_frame(args.frame)
        report = _frame_instance_verify(ident, f, args)
        extra = {}
    else:
        raise UsageError(
            f"identity {ident!r} needs --campaign or instance flags (--frame / --angles)"
        )
    payload = {"report": report.to_dict(), **extra}
    fmt = args.format
    lines = [f"{ident}: {report.verdict}"]
    for name, value in extra.items():
        lines.append(f"{name} = {_fmt(value, fmt)}")
    for c in report.checks:
        lines.append(
            f"  [{'ok' if c.ok else 'FAIL'}] {c.name}: lhs={_fmt(c.lhs, fmt)} "
            f"rhs={_fmt(c.rhs, fmt)} gap={c.abs_gap:.3g}"
        )
    _emit(args, payload, lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(payload))
    return EXIT_OK if report.passed else EXIT_MATH_FAIL


def _frame_instance_verify(ident, f, args):
    from . import identities as im

    need = {
        "theorem1": ("set_a", "set_b"),
        "lemma3": ("set_a", "set_b"),
        "remark1": ("set_a",),
        "n1-identity": ("set_a", "x", "x2"),
        "n2-equal": ("set_a", "set_b", "x", "x2"),
        "n2-unequal": ("set_a", "set_b", "x", "x2"),
        "restricted": ("set_a", "set_b", "x", "x2"),
        "degenerate": ("set_a", "set_b", "x", "x2"),
        "chain-2": (), "chain-3": (), "chain-4": (),
    }
    if ident not in need:
        raise UsageError(f"identity {ident!r} has no single-instance mode")
    for flag in need[ident]:
        if getattr(args, flag) in (None, ""):
            raise UsageError(f"identity {ident!r} needs --{flag.replace('_', '-')}")
    A = _parse_set(args.set_a) if args.set_a else ()
    B = _parse_set(args.set_b) if args.set_b else ()
    try:
        if ident == "theorem1":
            bs = [_parse_set(s) for s in args.not_superset or []]
            if not bs:
                raise UsageError("theorem1 needs at least one --not-superset block")
            return im.verify_theorem1(f, A, B, bs)
        if ident == "lemma3":
            return im.verify_lemma3(f, A, B)
        if ident == "remark1":
            if args.x is None or args.x2 is None:
                raise UsageError("remark1 needs --x and --x2")
            return im.verify_remark1(f, A, args.x, args.x2)
        if ident == "n1-identity":
            return im.verify_n1_identity(f, A, args.x, args.x2)
        if ident.startswith("chain-"):
            return im.verify_chain_formula(f, int(ident.split("-")[1]))
        verifier = {
            "n2-equal": im.verify_n2_equal,
            "n2-unequal": im.verify_n2_unequal,
            "restricted": im.verify_restricted,
            "degenerate": im.verify_degenerate,
        }[ident]
        result = verifier(f, A, B, args.x, args.x2)
        return result.report if hasattr(result, "report") else result
    except SkipInstance as exc:
        raise UsageError(f"instance rejected: {exc.reason}") from exc
    except (ConditioningError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _cmd_verify(args) -> int:
    known = set(harness.CATALOG)
    if args.identity != "all" and args.identity not in known:
        print(f"unknown identity {args.identity!r}; known: {', '.join(sorted(known))}",
              file=sys.stderr)
        return EXIT_USAGE
    if args.campaign is None and (args.angles or args.frame or args.xs):
        return _single_instance_verify(args)
    idents = tuple(harness.identity_ids()) if args.identity == "all" else (args.identity,)
    try:
        cfg = CampaignConfig.parse(args.campaign or "seed=0,n=100", identities=idents)
        if args.seed is not None:
            import dataclasses

            cfg = dataclasses.replace(cfg, seed=args.seed)
        result = run_campaign(cfg)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    report_text = result.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report_text)
    if args.format == "json":
        print(report_text)
    else:
        for ident, o in result.outcomes.items():
            worst = "n/a" if o.worst_gap is None else f"{o.worst_gap:.3g}"
            print(f"{ident}: pass={o.passes} fail={o.fails} skip={o.skips} "
                  f"worst={worst} ({o.worst_check})")
        print(f"wall clock: {result.wall_clock_s:.2f}s")
    return EXIT_OK if result.all_passed() else EXIT_MATH_FAIL


def _cmd_scan(args) -> int:
    cfg = CampaignConfig.parse(
        args.campaign or f"seed={args.seed or 0},n={args.n_instances}",
        identities=("theorem1-n3-scan",),
    )
    result = run_campaign(cfg)
    o = result.outcomes["theorem1-n3-scan"]
    if args.format == "json":
        print(result.to_json())
    else:
        print(f"scanned {o.passes + o.fails} instances with three forbidden blocks "
              f"(skips {o.skips})")
        worst = "n/a" if o.worst_gap is None else f"{o.worst_gap:.3g}"
        print(f"worst margin (gap/tolerance units): {worst} on {o.worst_check!r}")
        print("scan reports findings only; no inequality is asserted beyond two blocks")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(result.to_json())
    return EXIT_OK


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="detproc",
        description="Exact probabilities of fixed-cardinality determinantal "
                    "processes and verification of their correlation identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--cap", type=int, default=5_000_000,
                       help="enumeration cap for oracle cross-checks")

    p = sub.add_parser("prob", help="probability of a subset event")
    common(p)
    p.add_argument("--frame", required=True, help="frame file (.json or .csv)")
    p.add_argument("--include", help="comma list of points forced into the sample")
    p.add_argument("--exclude", help="comma list of points forced out")
    p.add_argument("--not-superset", action="append",
                   help="comma list forming a forbidden block; repeatable")
    p.set_defaults(func=_cmd_prob)

    p = sub.add_parser("sample", help="exact draws from the process law")
    common(p)
    p.add_argument("--frame", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("cs", help="principal angles and containment statistics")
    common(p)
    p.add_argument("--frame", required=True)
    p.add_argument("--set-a", required=True, dest="set_a")
    p.add_argument("--set-b", required=True, dest="set_b")
    p.set_defaults(func=_cmd_cs)

    p = sub.add_parser("verify", help="verify one identity (instance or campaign)")
    common(p)
    p.add_argument("identity", help="identity id or 'all'")
    p.add_argument("--campaign", help="campaign spec, e.g. seed=7,n=10000")
    p.add_argument("--seed", type=int, help="override the campaign seed")
    p.add_argument("--out", help="write the canonical JSON report here")
    p.add_argument("--frame")
    p.add_argument("--set-a", dest="set_a")
    p.add_argument("--set-b", dest="set_b")
    p.add_argument("--not-superset", action="append")
    p.add_argument("--x", type=int)
    p.add_argument("--x2", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--angles", help="comma list of angles in radians")
    p.add_argument("--xs", help="comma list (first vector for plucker)")
    p.add_argument("--y", help="comma list (second vector for plucker)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("counterexample",
                       help="reproduce the non-determinantal conditioning example")
    common(p)
    p.set_defaults(func=_cmd_counterexample)

    p = sub.add_parser("scan", help="empirical scan with three forbidden blocks")
    common(p)
    p.add_argument("--campaign")
    p.add_argument("--seed", type=int)
    p.add_argument("--n-instances", type=int, default=200, dest="n_instances")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_scan)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
