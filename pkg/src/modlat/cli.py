"""Command-line front end.

Every command is pure: the same arguments and seed produce byte-identical
JSON.  Exit codes: 0 success, 1 a mathematical check failed (counterexample
found), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import classify, complexes, oracle, suites, zmodules
from .classify import ClosureKind, SuiteReport
from .intlinalg import snf
from .literals import (
    LiteralError,
    parse_context,
    parse_ideal,
    parse_int_matrix,
    parse_module,
    parse_spec_subset,
    parse_subgroup_elements,
    parse_zmodule,
)
from .oracle import Universe
from .spectrum import PrimeId, Z_BACKEND, monomial_backend

KIND_BY_NAME = {k.value: k for k in ClosureKind}


def _backend_from_args(args) -> tuple:
    backend = getattr(args, "backend", "z")
    if backend == "z":
        return Z_BACKEND
    variables = getattr(args, "vars", None)
    if not variables:
        raise LiteralError("", 0, "--vars for the monomial backend")
    return monomial_backend(parse_context(variables))


def _subset_payload(subset) -> dict:
    return {
        "literal": str(subset),
        "members": ([str(p) for p in subset.sorted_members()]
                    if subset.is_finite() else "all"),
    }


def _report_payload(report: SuiteReport) -> dict:
    return {
        "suite": report.name,
        "seed": report.seed,
        "passed": report.passed,
        "checks": [
            {"statement": c.name, "passed": c.passed,
             **({"detail": c.detail} if c.detail else {})}
            for c in report.checks
        ],
    }


def _emit(payload: dict, args) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
        return
    _emit_text(payload)


def _emit_text(payload: dict, indent: int = 0) -> None:
    pad = "  " * indent
    for key, value in payload.items():
        if isinstance(value, dict):
            print(f"{pad}{key}:")
            _emit_text(value, indent + 1)
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"{pad}{key}:")
            for entry in value:
                _emit_text(entry, indent + 1)
                if indent == 0:
                    print()
        else:
            print(f"{pad}{key}: {value}")


# -- command handlers ---------------------------------------------------------


def cmd_snf(args) -> tuple[int, dict]:
    matrix = parse_int_matrix(args.matrix)
    dec = snf(matrix)
    return 0, {
        "input": matrix.to_lists(),
        "d": dec.d.to_lists(),
        "u": dec.u.to_lists(),
        "v": dec.v.to_lists(),
    }


def cmd_module(args) -> tuple[int, dict]:
    backend = _backend_from_args(args)
    module = parse_module(args.literal, backend)
    payload = {"canonical": str(module)}
    if backend == Z_BACKEND:
        payload["free_rank"] = module.free_rank
        payload["invariant_factors"] = list(module.torsion)
    else:
        payload["summands"] = [str(s) for s in module.summands]
    return 0, payload


def cmd_ass(args) -> tuple[int, dict]:
    backend = _backend_from_args(args)
    module = parse_module(args.literal, backend)
    subset = classify.ass_of(module)
    return 0, {"module": str(module),
               "ass": [str(p) for p in sorted(subset.generators,
                                              key=PrimeId.sort_key)]}


def cmd_supp(args) -> tuple[int, dict]:
    backend = _backend_from_args(args)
    module = parse_module(args.literal, backend)
    return 0, {"module": str(module), "supp": _subset_payload(classify.supp_of(module))}


def cmd_grade(args) -> tuple[int, dict]:
    module = parse_zmodule(args.module)
    payload = {"module": str(module)}
    if args.ideal is not None:
        ideal = parse_ideal(args.ideal, Z_BACKEND)
        value = zmodules.grade_ideal(ideal, module)
        payload["ideal"] = str(ideal)
    elif args.against is not None:
        other = parse_zmodule(args.against)
        value = zmodules.grade_module(other, module)
        payload["against"] = str(other)
    else:
        raise LiteralError("", 0, "--ideal or --against")
    payload["grade"] = "inf" if value == zmodules.INFINITY else value
    return 0, payload


def cmd_filtration(args) -> tuple[int, dict]:
    module = parse_zmodule(args.literal)
    ideals = zmodules.cyclic_filtration(module)
    steps = zmodules.filtration_steps(module)
    return 0, {
        "module": str(module),
        "ideals": [str(i) for i in ideals],
        "steps": [str(s) for s in steps],
    }


def cmd_koszul(args) -> tuple[int, dict]:
    try:
        gens = [int(x) for x in args.sequence.split(",") if x.strip()]
    except ValueError as exc:
        raise LiteralError(args.sequence, 0, "a comma list of integers") from exc
    if not gens:
        raise LiteralError(args.sequence, 0, "a nonempty integer list")
    complex_ = complexes.koszul_complex(gens)
    table = complexes.homology_table(complex_)
    return 0, {
        "sequence": gens,
        "bottom_degree": complex_.bottom_degree,
        "ranks": list(complex_.ranks),
        "differentials": [d.to_lists() for d in complex_.differentials],
        "homology": {str(i): str(h) for i, h in sorted(table.items())},
        "support": _subset_payload(complexes.complex_support(complex_)),
    }


def cmd_classify_member(args) -> tuple[int, dict]:
    backend = _backend_from_args(args)
    kind = KIND_BY_NAME[args.kind]
    module = parse_module(args.module, backend)
    if args.gens is not None:
        gens = [parse_module(g, backend) for g in args.gens.split(",") if g.strip()]
        verdict = classify.generated_member(module, gens, kind)
        source = {"generators": [str(g) for g in gens]}
    else:
        subset = parse_spec_subset(args.criterion, backend)
        sub = classify.Subcategory.by_criterion(kind, subset)
        verdict = sub.member(module)
        source = {"criterion": str(subset)}
    return 0, {"module": str(module), "kind": args.kind,
               "member": verdict, **source}


def cmd_classify_examples(args) -> tuple[int, dict]:
    backend = _backend_from_args(args)
    report = classify.correspondence_suite(args.item, backend, args.trials,
                                           args.seed)
    return (0 if report.passed else 1), _report_payload(report)


def cmd_classify_roundtrip(args) -> tuple[int, dict]:
    backend = _backend_from_args(args)
    report = classify.roundtrip_suite(backend, args.seed)
    return (0 if report.passed else 1), _report_payload(report)


def cmd_classify_adjunction(args) -> tuple[int, dict]:
    backend = _backend_from_args(args)
    report = suites.adjunction_suite(backend, args.seed)
    return (0 if report.passed else 1), _report_payload(report)


def _parse_kinds(text: str) -> set[str]:
    aliases = {
        "sub": "subobjects", "subobjects": "subobjects",
        "quot": "quotients", "quotients": "quotients",
        "ext": "extensions", "extensions": "extensions",
        "sum": "finite_sums", "sums": "finite_sums", "finite_sums": "finite_sums",
        "ker": "kernels", "kernels": "kernels",
        "coker": "cokernels", "cokernels": "cokernels",
        "summands": "summands", "images": "images",
    }
    kinds = set()
    for part in text.split(","):
        part = part.strip()
        if part not in aliases:
            raise LiteralError(text, text.find(part),
                               f"closure kinds among {sorted(set(aliases))}")
        kinds.add(aliases[part])
    return kinds


def _universe_from_args(args) -> Universe:
    primes = tuple(int(p) for p in args.primes.split(",") if p.strip())
    return Universe(primes=primes, max_exponent=args.max_exp,
                    max_rank=args.max_rank,
                    max_torsion_factors=args.max_factors)


def cmd_oracle_close(args) -> tuple[int, dict]:
    universe = _universe_from_args(args)
    gens = [parse_zmodule(g) for g in args.gens.split(",")] if args.gens else []
    result = oracle.close(gens, _parse_kinds(args.kinds), universe)
    return 0, {
        "generators": [str(g) for g in gens],
        "kinds": sorted(_parse_kinds(args.kinds)),
        "universe_size": len(universe.members()),
        "closure": sorted(str(m) for m in result.members),
        "clipped": result.clipped,
        "iterations": result.iterations,
    }


def cmd_oracle_derive(args) -> tuple[int, dict]:
    ambient = parse_zmodule(args.ambient)
    gens = parse_subgroup_elements(args.sub, ambient)
    trace = oracle.derive_submodule(ambient, gens)
    final = trace.replay()
    return 0, {
        "ambient": str(ambient),
        "subgroup_class": str(final),
        "steps": [
            {
                "op": s.op,
                "inputs": list(s.inputs),
                **({"matrix": s.matrix.to_lists()} if s.matrix is not None else {}),
                "result": str(s.result),
            }
            for s in trace.steps
        ],
    }


def cmd_suite(args) -> tuple[int, dict]:
    context = parse_context(args.vars) if args.vars else ("x", "y", "z")
    trials = args.trials
    warning = None
    if trials is not None and trials == 0:
        warning = "0 trials requested: randomized checks pass vacuously"
    reports = suites.run_all_suites(seed=args.seed, trials=trials,
                                    only=args.only)
    payload = {
        "seed": args.seed,
        "passed": all(r.passed for r in reports),
        "reports": [_report_payload(r) for r in reports],
    }
    if warning:
        payload["warning"] = warning
    return (0 if payload["passed"] else 1), payload


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modlat",
        description="Decision procedures for module subcategories over the "
                    "integers and over monomial quotient rings.",
    )
    parser.add_argument("--format", choices=("text", "json"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_backend(p):
        p.add_argument("--backend", choices=("z", "monomial"), default="z")
        p.add_argument("--vars", help="comma list of variables for the monomial backend")

    p = sub.add_parser("snf", help="Smith normal form of a JSON matrix")
    p.add_argument("matrix")
    p.set_defaults(handler=cmd_snf)

    p = sub.add_parser("module", help="parse and normalize a module literal")
    add_backend(p)
    p.add_argument("literal")
    p.set_defaults(handler=cmd_module)

    p = sub.add_parser("ass", help="associated primes of a module")
    add_backend(p)
    p.add_argument("literal")
    p.set_defaults(handler=cmd_ass)

    p = sub.add_parser("supp", help="support of a module")
    add_backend(p)
    p.add_argument("literal")
    p.set_defaults(handler=cmd_supp)

    p = sub.add_parser("grade", help="grade of an ideal or module against a module")
    p.add_argument("--module", required=True)
    p.add_argument("--ideal")
    p.add_argument("--against")
    p.set_defaults(handler=cmd_grade)

    p = sub.add_parser("filtration", help="cyclic filtration of a module")
    p.add_argument("literal")
    p.set_defaults(handler=cmd_filtration)

    p = sub.add_parser("koszul", help="Koszul complex of an integer sequence")
    p.add_argument("sequence")
    p.set_defaults(handler=cmd_koszul)

    p = sub.add_parser("classify", help="membership and lattice map checks")
    csub = p.add_subparsers(dest="subcommand", required=True)

    c = csub.add_parser("member", help="subcategory membership")
    add_backend(c)
    c.add_argument("--kind", choices=sorted(KIND_BY_NAME), required=True)
    c.add_argument("--module", required=True)
    group = c.add_mutually_exclusive_group(required=True)
    group.add_argument("--gens", help="comma list of generator module literals")
    group.add_argument("--criterion", help="spec subset literal")
    c.set_defaults(handler=cmd_classify_member)

    c = csub.add_parser("examples", help="run one membership correspondence")
    add_backend(c)
    c.add_argument("--item", type=int, required=True)
    c.add_argument("--trials", type=int, default=500)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(handler=cmd_classify_examples)

    c = csub.add_parser("roundtrip", help="bijection round-trip checks")
    add_backend(c)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(handler=cmd_classify_roundtrip)

    c = csub.add_parser("adjunction", help="adjunction probe checks")
    add_backend(c)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(handler=cmd_classify_adjunction)

    p = sub.add_parser("oracle", help="finite-universe brute force")
    osub = p.add_subparsers(dest="subcommand", required=True)

    o = osub.add_parser("close", help="closure of generators inside a universe")
    o.add_argument("--gens", default="", help="comma list of module literals")
    o.add_argument("--kinds", required=True,
                   help="comma list: sub,quot,ext,sums,ker,coker,summands,images")
    o.add_argument("--primes", default="2,3")
    o.add_argument("--max-exp", type=int, default=2)
    o.add_argument("--max-rank", type=int, default=1)
    o.add_argument("--max-factors", type=int, default=2)
    o.set_defaults(handler=cmd_oracle_close)

    o = osub.add_parser("derive", help="derivation witness for a submodule")
    o.add_argument("--ambient", required=True)
    o.add_argument("--sub", required=True,
                   help="elements like '2*g0; g0+3*g1' in ambient generators")
    o.set_defaults(handler=cmd_oracle_derive)

    p = sub.add_parser("suite", help="run verification suites")
    p.add_argument("--only", choices=suites.SUITE_NAMES)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vars", help="monomial context for correspondence suites")
    p.set_defaults(handler=cmd_suite)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        code, payload = args.handler(args)
    except (LiteralError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(payload, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
