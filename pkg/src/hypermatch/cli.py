"""
Command-line entry point: ``hypermatch {gen,solve,rainbow,sweep}``.

Exit codes: 0 success or pass, 1 malformed input, 2 fail, 3 inconclusive
(including shortfalls in the best-effort regime).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .constructions import (
    complete,
    divisibility_barrier,
    fact_1_5_matching,
    random_instance,
    space_barrier,
)
from .core import DegreeProfile, dumps, load, validate_matching
from .driver import (
    DriverConfig,
    load_sweep_spec,
    spec_budget,
    sweep_instances,
    theorem_1_7,
    verify_main_theorem_sweep,
    write_sweep,
)
from .errors import HypothesisUnmet, InvalidInput, InvariantViolation
from .family import load_family, rainbow_to_json, validate_rainbow
from .oracles import OracleBudget, max_matching_exact, max_rainbow_matching_exact
from .rainbow import (
    RainbowConfig,
    almost_perfect_rainbow,
    pokrovskiy_rainbow,
    rainbow_m_plus_q,
    rainbow_or_dominating,
)

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_INCONCLUSIVE = 0, 1, 2, 3
FORMAT_VERSION = "hypermatch-format/1"


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _emit(report, code):
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return code


def _budget(args):
    return OracleBudget(args.budget_nodes, args.budget_seconds)


def _profile_or_max(args, H_or_F):
    if args.profile:
        return DegreeProfile.parse(args.profile)
    return DegreeProfile(tuple(H_or_F.codegree_profile()))


def cmd_gen(args):
    if args.construction == "complete":
        H, meta = complete(args.k, args.n), {"construction": "complete",
                                             "parameters": {"k": args.k, "n": args.n}}
    else:
        if args.construction == "divisibility":
            c = divisibility_barrier(args.k, args.n, _int_list(args.sizes) if args.sizes else None)
        elif args.construction == "space":
            if not args.profile:
                raise InvalidInput("space needs --profile")
            c = space_barrier(args.k, args.n, _int_list(args.profile))
        else:
            a = _int_list(args.profile) if args.profile else [0] * args.k
            c = random_instance(args.k, args.n, a, Fraction(args.density), args.seed)
        H, meta = c.graph, c.metadata()
    text = dumps(H)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text + "\n")
    if args.meta:
        with open(args.meta, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(meta, sort_keys=True))
    return EXIT_OK


def cmd_solve(args):
    H = load(args.instance)
    profile = _profile_or_max(args, H)
    report = {"algorithm": args.algorithm, "profile": list(profile), "n": H.n, "k": H.k}
    if args.algorithm == "oracle":
        res = max_matching_exact(H, _budget(args))
        report.update(nu=res.value, status=res.status, matching=[list(e) for e in res.witness])
        return _emit(report, EXIT_OK if res.exact else EXIT_INCONCLUSIVE)
    if args.algorithm == "fact15":
        M = fact_1_5_matching(H, profile)
        ok, _ = validate_matching(H, M)
        report.update(size=len(M), target=max(0, min(H.n - H.k + 2, profile.Q)), status="success",
                      matching=[list(e) for e in M])
        return _emit(report, EXIT_OK if ok else EXIT_FAIL)
    threshold = args.branch_threshold
    cfg = DriverConfig(args.mode, threshold, args.branch, _budget(args), seed=args.seed)
    rep = theorem_1_7(H, profile, cfg)
    report.update(rep.to_dict())
    report["size"] = len(rep.matching)
    return _emit(report, EXIT_OK if rep.status == "success" else EXIT_INCONCLUSIVE)


def cmd_rainbow(args):
    F = load_family(args.family)
    cfg = RainbowConfig(args.mode, budget=_budget(args), seed=args.seed)
    report = {"algorithm": args.algorithm, "t": F.t}
    if args.algorithm == "oracle":
        res = max_rainbow_matching_exact(F, _budget(args))
        report.update(size=res.value, status=res.status, matching=rainbow_to_json(res.witness))
        return _emit(report, EXIT_OK if res.exact else EXIT_INCONCLUSIVE)
    profile = _profile_or_max(args, F)
    report["profile"] = list(profile)
    if args.algorithm == "lemma22":
        if args.epsilon is None:
            raise InvalidInput("lemma22 needs --epsilon")
        out = rainbow_or_dominating(F, profile, Fraction(args.epsilon), cfg)
        report.update(out.to_dict())
        ok = validate_rainbow(F, out.matching)[0]
        code = EXIT_FAIL if not ok else (EXIT_INCONCLUSIVE if out.kind == "inconclusive" else EXIT_OK)
        return _emit(report, code)
    if args.algorithm == "lemma21":
        res = almost_perfect_rainbow(F, profile, args.m, _int_list(args.colours or ""), cfg)
    elif args.algorithm == "lemma25":
        res = rainbow_m_plus_q(F, profile, args.m, cfg)
    else:
        res = pokrovskiy_rainbow(F, profile, cfg)
    report.update(res.to_dict())
    return _emit(report, EXIT_OK if res.success else EXIT_INCONCLUSIVE)


def cmd_sweep(args):
    spec = load_sweep_spec(args.spec)
    budget = spec_budget(spec)
    rows = verify_main_theorem_sweep(sweep_instances(spec), budget, args.workers,
                                     bool(spec.get("driver", False)))
    os.makedirs(args.out, exist_ok=True)
    write_sweep(rows, os.path.join(args.out, "reports.jsonl"), os.path.join(args.out, "summary.csv"))
    return EXIT_FAIL if any(r["status"] == "fail" for r in rows) else EXIT_OK


def _common_solver_flags(p):
    p.add_argument("--profile", help="comma-separated codegree bounds; default: computed codegrees")
    p.add_argument("--mode", choices=["guaranteed", "best_effort"], default="best_effort")
    p.add_argument("--budget-nodes", type=int, default=2_000_000)
    p.add_argument("--budget-seconds", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypermatch", description=__doc__.strip().splitlines()[0],
                                     allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({FORMAT_VERSION})")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a generated instance", allow_abbrev=False)
    g.add_argument("construction", choices=["complete", "divisibility", "space", "random"])
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sizes", help="divisibility: comma-separated |A_i|")
    g.add_argument("--profile", help="space/random: comma-separated a_i")
    g.add_argument("--density", default="1/2", help="random: edge probability as a fraction or decimal")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="instance path (default: standard output)")
    g.add_argument("--meta", help="also write construction metadata here")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="find a matching in one instance", allow_abbrev=False)
    s.add_argument("--instance", required=True)
    s.add_argument("--algorithm", choices=["oracle", "fact15", "thm17"], default="oracle")
    s.add_argument("--branch", choices=["large_q", "small_q"], help="thm17: force a branch")
    s.add_argument("--branch-threshold", type=int, help="thm17: override the 400k^2 split")
    _common_solver_flags(s)
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("rainbow", help="find a rainbow matching in a family", allow_abbrev=False)
    r.add_argument("--family", required=True)
    r.add_argument("--algorithm", choices=["oracle", "lemma21", "lemma25", "pokrovskiy", "lemma22"],
                   default="oracle")
    r.add_argument("--m", type=int, default=0, help="multiplicity used for the target m + Q")
    r.add_argument("--colours", help="lemma21: comma-separated colours that must appear")
    r.add_argument("--epsilon", help="lemma22: slack as a fraction, e.g. 1/10")
    _common_solver_flags(r)
    r.set_defaults(func=cmd_rainbow)

    w = sub.add_parser("sweep", help="oracle sweep over a generator grid", allow_abbrev=False)
    w.add_argument("--spec", required=True)
    w.add_argument("--workers", type=int, default=1)
    w.add_argument("--out", required=True, help="directory for reports.jsonl and summary.csv")
    w.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors are input errors; 2 is reserved for failed checks
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except (InvalidInput, OSError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, HypothesisUnmet):
            print(f"hypothesis not met: {exc}", file=sys.stderr)
            return EXIT_INPUT
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
