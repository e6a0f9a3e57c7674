"""Command-line front end.

Exit codes: 0 success / accepted, 1 negative verdict, 2 input error,
3 seed limit reached.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import InvalidTransitionSystem, NetType, TSFormatError, parse_ts, serialize_ts
from .nets import NetFormatError, parse_net, reachability_graph, serialize_net, net_from_regions
from .reductions import (DESIGNATED_TYPES, HSFormatError, THEOREMS, build, extract_hitting_set,
                         hs_brute_force, parse_hs)
from .regions import enumerate_atoms
from .solver import SeedLimitExceeded, SynthesisProblem, synthesize
from .verify import check_certificate, isomorphism_check, region_list_from_net

OK, NO, INPUT_ERROR, LIMIT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_ts(path):
    try:
        return parse_ts(_read(path))
    except (TSFormatError, InvalidTransitionSystem) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_net(path):
    try:
        return parse_net(_read(path))
    except NetFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_hs(path):
    try:
        return parse_hs(_read(path))
    except HSFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _parse_type(text):
    try:
        return NetType.parse(text)
    except ValueError as exc:
        raise InputError(f"--type: {exc}") from None


def _emit(text: str, out):
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"{out}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def _diag(msg: str):
    print(msg, file=sys.stderr)


def _stats_line(stats) -> str:
    return (f"seeds tried {stats.seeds_tried}, pruned {stats.seeds_pruned}, "
            f"regions found {stats.valid_regions}, {stats.elapsed:.3f}s")


def _synthesize(ts, type, d, args):
    try:
        problem = SynthesisProblem(ts, type, d)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return synthesize(problem, threads=args.threads, seed_limit=args.seed_limit)


def cmd_synth(args) -> int:
    ts = _load_ts(args.ts_file)
    type = _parse_type(args.type)
    result = _synthesize(ts, type, args.d, args)
    _diag(_stats_line(result.stats))
    net = net_from_regions(ts, type, result.admissible) if result.solvable else None
    if args.json:
        report = {"verdict": result.verdict,
                  "unsolved_atoms": [str(a) for a in result.unsolved_atoms],
                  "places": len(result.admissible),
                  "stats": {"seeds_tried": result.stats.seeds_tried,
                            "seeds_pruned": result.stats.seeds_pruned,
                            "valid_regions": result.stats.valid_regions,
                            "elapsed": result.stats.elapsed}}
        if net is not None:
            if args.out:
                _emit(serialize_net(net), args.out)
            else:
                report["net"] = serialize_net(net)
        print(json.dumps(report, indent=2))
    elif net is not None:
        _emit(serialize_net(net), args.out)
    else:
        print(f"unsolvable: {len(result.unsolved_atoms)} atom(s) without a {args.d}-restricted region")
        for atom in result.unsolved_atoms:
            print(f"unsolved {atom}")
    return OK if result.solvable else NO


def cmd_rg(args) -> int:
    net = _load_net(args.net_file)
    _emit(serialize_ts(reachability_graph(net)), args.out)
    return OK


def cmd_verify(args) -> int:
    ts = _load_ts(args.ts_file)
    net = _load_net(args.net_file)
    if args.d is not None and set(net.transitions) == set(ts.events):
        report = check_certificate(ts, net.type, args.d, region_list_from_net(ts, net))
        if args.json:
            print(json.dumps(report.to_dict(), indent=2))
        else:
            print("\n".join(report.lines()))
        return OK if report.accepted else NO
    iso = isomorphism_check(ts, reachability_graph(net))
    if args.json:
        print(json.dumps({"accepted": bool(iso), "isomorphism": iso.reason, "mapping": iso.mapping}, indent=2))
    else:
        print(f"isomorphism {iso.reason}")
        if iso:
            for s, t in sorted(iso.mapping.items()):
                print(f"map {s} {t}")
        print("accepted" if iso else "rejected")
    return OK if iso else NO


def cmd_reduce(args) -> int:
    inst = _load_hs(args.hs_file)
    gadget = build(inst, args.theorem)
    _emit(gadget.serialize(), args.out)
    if args.json:
        print(json.dumps({"theorem": gadget.theorem, "d": gadget.d, "alpha": str(gadget.alpha),
                          "states": len(gadget.ts.states), "events": len(gadget.ts.events)}, indent=2),
              file=sys.stdout if args.out else sys.stderr)
    else:
        _diag(f"d = {gadget.d}")
        _diag(f"alpha = {gadget.alpha}")
        _diag(f"{len(gadget.ts.states)} states, {len(gadget.ts.events)} events")
    return OK


def cmd_hs(args) -> int:
    inst = _load_hs(args.hs_file)
    found = hs_brute_force(inst)
    if args.json:
        print(json.dumps({"found": found is not None, "hitting_set": list(found) if found is not None else None}))
    elif found is None:
        print(f"no hitting set of size <= {inst.kappa}")
    else:
        print("hitting set " + " ".join(found))
    return OK if found is not None else NO


def cmd_roundtrip(args) -> int:
    inst = _load_hs(args.hs_file)
    gadget = build(inst, args.theorem)
    type = NetType.of(*DESIGNATED_TYPES[args.theorem])
    expected = hs_brute_force(inst) is not None
    result = _synthesize(gadget.ts, type, gadget.d, args)
    _diag(_stats_line(result.stats))
    region = result.witnesses.get(gadget.alpha)
    extracted = extract_hitting_set(inst, region) if region is not None else None
    extraction_ok = extracted is None or (len(extracted) <= inst.kappa and inst.is_hitting_set(extracted))
    agree = expected == result.solvable
    lines = [f"hitting-set {'yes' if expected else 'no'}",
             f"synthesis {result.verdict}",
             f"alpha {'solved' if region is not None else 'unsolved'}"]
    if extracted is not None:
        lines.append("extracted " + (" ".join(extracted) if extracted else "(empty)")
                     + (" valid" if extraction_ok else " INVALID"))
    lines += [f"unsolved {a}" for a in result.unsolved_atoms]
    lines.append("agree" if agree and extraction_ok else "disagree")
    if args.json:
        print(json.dumps({"hitting_set": expected, "synthesis": result.verdict,
                          "alpha_solved": region is not None,
                          "extracted": list(extracted) if extracted is not None else None,
                          "extraction_valid": extraction_ok,
                          "unsolved_atoms": [str(a) for a in result.unsolved_atoms],
                          "agree": agree and extraction_ok}, indent=2))
    else:
        print("\n".join(lines))
    return OK if agree and extraction_ok else NO


def cmd_atoms(args) -> int:
    ts = _load_ts(args.ts_file)
    atoms = enumerate_atoms(ts)
    if args.json:
        print(json.dumps([str(a) for a in atoms]))
    else:
        for atom in atoms:
            print(atom)
    return OK


def _natural(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return value


def _positive(text):
    value = _natural(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drsynth", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_flags(p):
        p.add_argument("--seed-limit", type=_positive, default=None,
                       help="abort with exit code 3 after this many seeds")
        p.add_argument("--threads", type=_positive, default=1, help="worker processes")

    p = sub.add_parser("synth", help="synthesize a d-restricted net for a transition system")
    p.add_argument("ts_file")
    p.add_argument("--type", required=True, help="comma-separated interactions, e.g. nop,swap,used,set")
    p.add_argument("--d", type=_natural, required=True)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    solver_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("rg", help="reachability graph of a net")
    p.add_argument("net_file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rg)

    p = sub.add_parser("verify", help="check a net against a transition system")
    p.add_argument("ts_file")
    p.add_argument("net_file")
    p.add_argument("--d", type=_natural, default=None,
                   help="also check the places as a d-restricted admissible set")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="build the gadget transition system of a hitting-set instance")
    p.add_argument("hs_file")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("hs", help="solve a hitting-set instance by brute force")
    p.add_argument("hs_file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_hs)

    p = sub.add_parser("roundtrip", help="compare hitting-set and synthesis verdicts on a gadget")
    p.add_argument("hs_file")
    p.add_argument("--theorem", required=True, choices=THEOREMS)
    p.add_argument("--json", action="store_true")
    solver_flags(p)
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("atoms", help="list the separation atoms of a transition system")
    p.add_argument("ts_file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_atoms)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        _diag(f"error: {exc}")
        return INPUT_ERROR
    except SeedLimitExceeded as exc:
        _diag(f"error: {exc}")
        return LIMIT


if __name__ == "__main__":
    sys.exit(main())
