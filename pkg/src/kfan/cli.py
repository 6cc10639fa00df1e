"""Command-line front end.

Commands: info, k0-affine, k0-global, check-exactness, check-flasque,
hilbert, kclass.  Output is human-readable text, or a machine-readable
JSON job report with ``--json``.  Exit codes: 0 success, 1 verification
failure (with witness), 2 input error, 3 solver gave up.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .cech import h0, verify_exactness
from .cones import ConeNotInFan, NotAFan, NotStronglyConvex, UnsupportedRank
from .fanfile import FanFile, FanFileError, build_fan, load_fan_file
from .graded import CoefficientSpec, GradedFreeData, k0_affine_toric, k0_class
from .intlinalg import Lattice
from .monoids import AffineMonoid, hilbert_basis
from .report import (
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_SOLVER_GAVE_UP,
    EXIT_VERIFICATION_FAILURE,
    JobReport,
    cochain_to_jsonable,
    element_from_jsonable,
    element_to_jsonable,
)
from .sheaves import (
    NotSmoothFan,
    extend_section,
    random_open_subfan,
    random_section,
    sheaf_a0,
)
from .support_solver import SolverGaveUp


class InputError(Exception):
    pass


def _load(path: str) -> tuple[FanFile, "Fan"]:
    ff = load_fan_file(path)
    try:
        fan = build_fan(ff)
    except (NotStronglyConvex, NotAFan, UnsupportedRank, ValueError) as e:
        raise InputError(f"{path}: {e}") from e
    return ff, fan

def _fan_inputs(ff: FanFile, path: str) -> dict:
    out = {"fan_file": path, "fan": ff.to_jsonable()}
    if ff.warnings:
        out["warnings"] = list(ff.warnings)
    return out


def _cone_entry(fan, i, cone) -> dict:
    return {
        "id": i,
        "dim": cone.dim,
        "rays": [list(r) for r in cone.rays],
        "smooth": cone.is_smooth(),
        "simplicial": cone.is_simplicial(),
        "character_rank": cone.character_quotient().free_rank,
        "maximal": cone in fan.max_cones,
    }


def _get_cone(fan, cone_id: int):
    if not 0 <= cone_id < len(fan.cones):
        raise InputError(
            f"cone id {cone_id} out of range (fan has {len(fan.cones)} cones; run info)"
        )
    return fan.cones[cone_id]


def cmd_info(args) -> JobReport:
    ff, fan = _load(args.fanfile)
    try:
        complete = fan.is_complete()
    except UnsupportedRank:
        complete = None
    results = {
        "num_cones": len(fan.cones),
        "cones": [_cone_entry(fan, i, c) for i, c in enumerate(fan.cones)],
        "max_cone_ids": [fan.index_of(c) for c in fan.max_cones],
        "smooth": fan.is_smooth(),
        "complete": complete,
    }
    return JobReport(
        command="info", inputs=_fan_inputs(ff, args.fanfile), results=results
    )


def cmd_k0_affine(args) -> JobReport:
    ff, fan = _load(args.fanfile)
    cone = _get_cone(fan, args.cone)
    desc = k0_affine_toric(cone, CoefficientSpec(args.coeff))
    basis_chars = []
    n = fan.lattice.rank
    for j in range(n):
        e = tuple(1 if i == j else 0 for i in range(n))
        basis_chars.append(
            [list(e), element_to_jsonable(desc.element(e))]
        )
    results = {
        "cone_id": args.cone,
        "cone_rays": [list(r) for r in cone.rays],
        "cone_dim": cone.dim,
        "character_rank": desc.laurent_rank,
        "k_theory": desc.symbolic("q"),
        "k0": f"Z[Z^{desc.laurent_rank}]",
        "sample_basis_characters": basis_chars,
        "smooth": cone.is_smooth(),
        "note": "the description holds for every strongly convex cone; smoothness was not needed",
    }
    return JobReport(
        command="k0-affine", inputs=_fan_inputs(ff, args.fanfile), results=results
    )


def cmd_k0_global(args) -> JobReport:
    ff, fan = _load(args.fanfile)
    ring = h0(fan)
    inputs = _fan_inputs(ff, args.fanfile)
    results = {"smooth": fan.is_smooth()}
    if fan.is_smooth():
        results["k_theory"] = "K_q(k) (x) K_0^T(X)"
    else:
        results["warning"] = (
            "fan is not smooth: computing degree-zero cover cohomology anyway, "
            "without the identification with equivariant K_0"
        )
    if args.element is not None:
        try:
            data = json.loads(args.element)
            comps = {}
            for key, val in data.items():
                i = int(key)
                if not 0 <= i < len(fan.max_cones):
                    raise InputError(f"max-cone index {i} out of range")
                comps[i] = element_from_jsonable(ring.complex.stalk((i,)), val)
            for i in range(len(fan.max_cones)):
                comps.setdefault(
                    i,
                    element_from_jsonable(ring.complex.stalk((i,)), []),
                )
            c = ring.cochain(comps)
        except (json.JSONDecodeError, ValueError, TypeError, AttributeError) as e:
            raise InputError(f"malformed element: {e}") from e
        ok, witness = ring.membership(c)
        results["member"] = ok
        if not ok:
            pair, diff = witness
            results["failing_pair"] = list(pair)
            results["restriction_difference"] = element_to_jsonable(diff)
            return JobReport(
                command="k0-global",
                inputs=inputs,
                results=results,
                exit_status=EXIT_VERIFICATION_FAILURE,
            )
        return JobReport(command="k0-global", inputs=inputs, results=results)
    rng = random.Random(args.seed)
    n = fan.lattice.rank
    sampled = []
    seen = set()
    while len(sampled) < args.sample:
        m = tuple(rng.randint(-3, 3) for _ in range(n))
        if m in seen:
            continue
        seen.add(m)
        c = ring.character_tuple(m)
        assert ring.contains(c)
        sampled.append({"character": list(m), "tuple": cochain_to_jsonable(c)})
    results["character_members"] = sampled
    results["unit"] = cochain_to_jsonable(ring.unit())
    return JobReport(command="k0-global", inputs=inputs, results=results)


def cmd_check_exactness(args) -> JobReport:
    ff, fan = _load(args.fanfile)
    inputs = _fan_inputs(ff, args.fanfile)
    inputs.update(
        {"level": args.level, "trials": args.trials, "depth": args.depth, "seed": args.seed}
    )
    try:
        report = verify_exactness(
            fan,
            level=args.level,
            trials=args.trials,
            depth=args.depth,
            seed=args.seed,
            allow_nonsmooth=args.experimental_nonsmooth,
        )
    except NotSmoothFan as e:
        raise InputError(f"{e} (pass --experimental-nonsmooth to try anyway)") from e
    certificates = {
        "witnesses": [
            {"cocycle": cochain_to_jsonable(z), "coboundary": cochain_to_jsonable(b)}
            for z, b in report.witnesses
        ]
    }
    statistics = {
        "solved": report.solved,
        "gave_up": report.trials - report.solved,
        "trials": [
            {
                "index": t.index,
                "cocycle_support": t.cocycle_support,
                "solved": t.solved,
                "witness_support": t.witness_support,
                "support_sizes_tried": (
                    list(t.gave_up.support_sizes) if t.gave_up else None
                ),
            }
            for t in report.resolutions
        ],
    }
    results = {
        "level": args.level,
        "all_solved": report.all_solved,
        "solved": report.solved,
        "trials": report.trials,
    }
    return JobReport(
        command="check-exactness",
        inputs=inputs,
        results=results,
        certificates=certificates,
        statistics=statistics,
        exit_status=EXIT_OK if report.all_solved else EXIT_SOLVER_GAVE_UP,
    )


def _section_to_jsonable(fan, section) -> dict:
    return {
        "domain_cone_ids": sorted(fan.index_of(c) for c in section.domain.members),
        "components": [
            [fan.index_of(c), element_to_jsonable(v)]
            for c, v in sorted(
                section.components.items(), key=lambda kv: fan.index_of(kv[0])
            )
        ],
    }


def cmd_check_flasque(args) -> JobReport:
    ff, fan = _load(args.fanfile)
    inputs = _fan_inputs(ff, args.fanfile)
    inputs.update({"trials": args.trials, "depth": args.depth, "seed": args.seed})
    if not fan.is_smooth() and not args.experimental_nonsmooth:
        raise InputError(
            "extension is only guaranteed over smooth fans "
            "(pass --experimental-nonsmooth to try anyway)"
        )
    sheaf = sheaf_a0(fan)
    rng = random.Random(args.seed)
    trials = []
    witnesses = []
    extended = 0
    for i in range(args.trials):
        domain = random_open_subfan(fan, rng)
        section = random_section(sheaf, domain, rng)
        outcome = extend_section(
            section, depth=args.depth, allow_nonsmooth=args.experimental_nonsmooth
        )
        entry = {
            "index": i,
            "domain_cone_ids": sorted(fan.index_of(c) for c in domain.members),
            "section_support": sum(len(v.terms) for v in section.components.values()),
        }
        if isinstance(outcome, SolverGaveUp):
            entry["extended"] = False
            entry["support_sizes_tried"] = list(outcome.support_sizes)
        else:
            extended += 1
            entry["extended"] = True
            witnesses.append(
                {
                    "problem": _section_to_jsonable(fan, section),
                    "extension": _section_to_jsonable(fan, outcome),
                }
            )
        trials.append(entry)
    all_ok = extended == args.trials
    return JobReport(
        command="check-flasque",
        inputs=inputs,
        results={
            "all_extended": all_ok,
            "extended": extended,
            "trials": args.trials,
        },
        certificates={"witnesses": witnesses},
        statistics={"trials": trials},
        exit_status=EXIT_OK if all_ok else EXIT_SOLVER_GAVE_UP,
    )


def cmd_hilbert(args) -> JobReport:
    ff, fan = _load(args.fanfile)
    cone = _get_cone(fan, args.cone)
    try:
        basis = hilbert_basis(cone.dual())
    except UnsupportedRank as e:
        raise InputError(str(e)) from e
    results = {
        "cone_id": args.cone,
        "cone_rays": [list(r) for r in cone.rays],
        "dual_cone_rays": [list(r) for r in cone.dual().rays],
        "hilbert_basis": sorted([list(v) for v in basis]),
        "basis_size": len(basis),
    }
    return JobReport(
        command="hilbert", inputs=_fan_inputs(ff, args.fanfile), results=results
    )


def cmd_kclass(args) -> JobReport:
    inputs = {}
    if args.fan is not None:
        if args.cone is None:
            raise InputError("--fan needs --cone to pick the monoid")
        ff, fan = _load(args.fan)
        cone = _get_cone(fan, args.cone)
        monoid = AffineMonoid.from_cone(cone)
        inputs.update(_fan_inputs(ff, args.fan))
        inputs["cone_id"] = args.cone
    elif args.generators is not None:
        try:
            gens = json.loads(args.generators)
            rank = len(gens[0])
            monoid = AffineMonoid.from_generators(Lattice(rank), gens)
        except (json.JSONDecodeError, ValueError, TypeError, IndexError) as e:
            raise InputError(f"malformed generators: {e}") from e
        inputs["generators"] = gens
    else:
        raise InputError("give a monoid: --fan/--cone or --generators")
    try:
        shifts = json.loads(args.shifts)
        data = GradedFreeData(monoid, shifts)
    except (json.JSONDecodeError, ValueError, TypeError) as e:
        raise InputError(f"malformed shifts: {e}") from e
    cls = k0_class(data, CoefficientSpec(args.coeff))
    q = monoid.coset_quotient
    results = {
        "shifts": [list(s) for s in data.shifts],
        "coset_group": {
            "invariant_factors": list(q.invariant_factors),
            "free_rank": q.free_rank,
        },
        "k0_class": element_to_jsonable(cls.value),
        "effective": cls.is_effective(),
    }
    inputs["coefficients"] = args.coeff
    return JobReport(command="kclass", inputs=inputs, results=results)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kfan",
        description="equivariant K-theory of toric varieties from fan data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("info", cmd_info, help="cones, faces, smoothness, character ranks")
    p.add_argument("fanfile")

    p = add("k0-affine", cmd_k0_affine, help="K-theory of one affine piece")
    p.add_argument("fanfile")
    p.add_argument("--cone", type=int, required=True, help="cone id from info")
    p.add_argument("--coeff", default="k", help="coefficient ring label")

    p = add("k0-global", cmd_k0_global, help="global K_0 membership / generators")
    p.add_argument("fanfile")
    p.add_argument(
        "--element",
        help='JSON {"max-cone index": [[coords, coeff], ...]} to test membership',
    )
    p.add_argument("--sample", type=int, default=5, help="character members to emit")
    p.add_argument("--seed", type=int, default=0)

    p = add("check-exactness", cmd_check_exactness, help="randomized exactness runs")
    p.add_argument("fanfile")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--experimental-nonsmooth", action="store_true")

    p = add("check-flasque", cmd_check_flasque, help="randomized extension runs")
    p.add_argument("fanfile")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--experimental-nonsmooth", action="store_true")

    p = add("hilbert", cmd_hilbert, help="Hilbert basis of a cone's dual monoid")
    p.add_argument("fanfile")
    p.add_argument("--cone", type=int, required=True, help="cone id from info")

    p = add("kclass", cmd_kclass, help="K_0 class of a shift multiset")
    p.add_argument("--fan", help="fan file giving the monoid by a cone")
    p.add_argument("--cone", type=int, help="cone id from info")
    p.add_argument("--generators", help="JSON list of monoid generators")
    p.add_argument("--shifts", required=True, help="JSON list of shift degrees")
    p.add_argument("--coeff", default="k")

    return parser


def run(argv=None) -> JobReport | int:
    """Parse and dispatch, returning the JobReport (or an error exit
    code); the in-process entry point used by tests."""
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (FanFileError, InputError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ConeNotInFan as e:
        print(f"error: cone not in fan: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main(argv=None) -> int:
    outcome = run(argv)
    if isinstance(outcome, int):
        return outcome
    as_json = "--json" in (argv if argv is not None else sys.argv[1:])
    print(outcome.to_json() if as_json else outcome.to_text())
    return outcome.exit_status


if __name__ == "__main__":
    sys.exit(main())
