"""Command-line surface: every analysis as a subcommand emitting one
canonically ordered JSON report on stdout.

Exit codes: 0 when the analysis ran and any asserted property holds, 1 when
the analysis ran and the property fails, 2 for input errors.  Reports contain
no paths or timestamps, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .errors import BeliefKitError, EventNotMeasurable
from .game import interim_rationalizable
from .hierarchy import hierarchy_analysis, find_duplicates, quotient
from .io import (
    canonical_json,
    format_rational,
    model_doc,
    parse_game,
    parse_model,
    parse_rational,
)
from .measure import sorted_points
from .morphism import check_morphism, verify_terminality_small
from .typespace import (
    belief_operator,
    check_completeness,
    common_belief,
    mutual_belief,
    validate_type_space,
)


def _emit(report: dict) -> None:
    sys.stdout.write(canonical_json(report))


def _read(path: str) -> str:
    return Path(path).read_text()


def _violations(violations) -> list:
    return [
        {"code": v.code, "message": v.message, "player": v.player} for v in violations
    ]


def cmd_validate(args) -> int:
    ts = parse_model(_read(args.model))
    report = validate_type_space(ts)
    _emit(
        {
            "command": "validate",
            "valid": report.ok,
            "violations": _violations(report.violations),
        }
    )
    return 0 if report.ok else 1


def cmd_complete(args) -> int:
    ts = parse_model(_read(args.model))
    verdict = check_completeness(ts)
    players = {}
    for i in ts.players:
        pc = verdict.per_player[i]
        if pc.complete:
            players[i] = {"complete": True}
        else:
            players[i] = {
                "complete": False,
                "witness": {
                    str(b): format_rational(w)
                    for b, w in enumerate(pc.witness.weights)
                    if w != 0
                },
            }
    _emit(
        {
            "command": "complete",
            "all_complete": verdict.all_complete,
            "players": players,
        }
    )
    return 0 if verdict.all_complete else 1


def _level_entries(level) -> list:
    out = []
    for (sa, labs), w in level.support_items():
        out.append([[sa, list(labs)], format_rational(w)])
    return out


def cmd_hierarchy(args) -> int:
    ts = parse_model(_read(args.model))
    analysis = hierarchy_analysis(ts, depth=args.depth)
    profiles = {
        i: {
            s: [_level_entries(level) for level in profile.levels]
            for s, profile in per_state.items()
        }
        for i, per_state in analysis.profiles.items()
    }
    _emit(
        {
            "command": "hierarchy",
            "depth": analysis.depth,
            "stabilization_depth": analysis.stabilization_depth,
            "players": list(ts.players),
            "s_atoms": [
                sorted_points(ts.parameter_space, a) for a in ts.parameter_space.atoms
            ],
            "opponents": {i: [j for j in ts.players if j != i] for i in ts.players},
            "label_classes": {
                i: [[list(cls) for cls in per_depth] for per_depth in analysis.classes[i]]
                for i in ts.players
            },
            "profiles": profiles,
        }
    )
    return 0


def cmd_quotient(args) -> int:
    ts = parse_model(_read(args.model))
    result = quotient(ts)
    _emit(
        {
            "command": "quotient",
            "depth": result.depth,
            "classes": [list(c) for c in result.classes],
            "projection": {s: result.projection(s) for s in ts.states},
            "model": model_doc(result.quotient),
        }
    )
    return 0


def cmd_duplicates(args) -> int:
    ts = parse_model(_read(args.model))
    groups = {}
    for i in ts.players:
        found = find_duplicates(ts, i)
        groups[i] = [
            [
                {"atom": k, "states": sorted_points(ts.fields[i], ts.fields[i].atoms[k])}
                for k in group
            ]
            for group in found
        ]
    _emit({"command": "duplicates", "groups": groups})
    return 0


def _parse_state_map(arg: str, src_states, tgt_states) -> dict:
    mapping = {}
    for pair in arg.split(","):
        left, sep, right = pair.partition(":")
        if not sep or not left or not right:
            raise BeliefKitError(f"bad map entry {pair!r}; expected 'src:tgt'")
        if left in mapping:
            raise BeliefKitError(f"state {left!r} mapped twice")
        mapping[left] = right
    if set(mapping) != set(src_states):
        raise BeliefKitError("map must cover every source state exactly once")
    for right in mapping.values():
        if right not in tgt_states:
            raise BeliefKitError(f"unknown target state {right!r}")
    return mapping


def cmd_morphism(args) -> int:
    src = parse_model(_read(args.source))
    tgt = parse_model(_read(args.target))
    mapping = _parse_state_map(args.map, src.states, tgt.states)
    report = check_morphism(src, tgt, mapping)
    _emit(
        {
            "command": "morphism",
            "morphism": report.ok,
            "map": mapping,
            "violations": _violations(report.violations),
        }
    )
    return 0 if report.ok else 1


def cmd_terminality(args) -> int:
    target = parse_model(_read(args.target))
    candidates = [parse_model(_read(p)) for p in args.candidates]
    report = verify_terminality_small(candidates, target, max_search=args.max_search)
    _emit(
        {
            "command": "terminality",
            "counts": list(report.counts),
            "terminal_at_this_scale": report.terminal_at_this_scale,
        }
    )
    return 0 if report.terminal_at_this_scale else 1


def cmd_believe(args) -> int:
    ts = parse_model(_read(args.model))
    event = args.event.split(",")
    unknown = [e for e in event if e not in ts.states]
    if unknown:
        raise BeliefKitError(f"unknown states in event: {unknown}")
    p = parse_rational(args.p, "--p")
    report = {
        "command": "believe",
        "event": [s for s in ts.states if s in set(event)],
        "p": format_rational(p),
        "belief": {i: list(belief_operator(ts, i, event, p)) for i in ts.players},
        "mutual": list(mutual_belief(ts, event, p)),
    }
    try:
        report["common"] = list(common_belief(ts, event, p))
    except EventNotMeasurable as exc:
        # an iterate escaped some player's field: a real outcome of the purely
        # measurable framework, reported rather than treated as bad input
        report["common"] = {
            "error": "event-not-measurable",
            "player": exc.player,
            "iteration": exc.iteration,
        }
    _emit(report)
    return 0


def cmd_rationalize(args) -> int:
    game = parse_game(_read(args.game))
    result = interim_rationalizable(game)
    ts = game.space
    rounds = [
        {i: [list(acts) for acts in table[i]] for i in ts.players}
        for table in result.rounds
    ]
    _emit(
        {
            "command": "rationalize",
            "players": list(ts.players),
            "types": {
                i: [sorted_points(ts.fields[i], a) for a in ts.fields[i].atoms]
                for i in ts.players
            },
            "rounds": rounds,
            "fixpoint_round": result.fixpoint_round,
            "survivors": rounds[-1],
            "rationalizable": {i: list(v) for i, v in result.rationalizable.items()},
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beliefkit",
        description="Finite type-space analyses with exact rational arithmetic.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("validate", help="check the type-space conditions of a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("hierarchy", help="extract belief hierarchies to a given depth")
    p.add_argument("model")
    p.add_argument("--depth", type=int, default=None,
                   help="profile depth (default: stabilization depth + 1)")
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("quotient", help="collapse states with identical hierarchies")
    p.add_argument("model")
    p.set_defaults(func=cmd_quotient)

    p = sub.add_parser("duplicates", help="find types sharing a stable hierarchy")
    p.add_argument("model")
    p.set_defaults(func=cmd_duplicates)

    p = sub.add_parser("morphism", help="verify a candidate type morphism")
    p.add_argument("source")
    p.add_argument("target")
    p.add_argument("--map", required=True, help='state map, e.g. "w:w2" or "a:b,c:d"')
    p.set_defaults(func=cmd_morphism)

    p = sub.add_parser("terminality", help="count morphisms from candidates into a target")
    p.add_argument("target")
    p.add_argument("candidates", nargs="+")
    p.add_argument("--max-search", type=int, default=10**6,
                   help="candidate-map budget per search (default: 10^6)")
    p.set_defaults(func=cmd_terminality)

    p = sub.add_parser("complete", help="decide completeness of every type function")
    p.add_argument("model")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("believe", help="belief, mutual-belief, and common-belief operators")
    p.add_argument("model")
    p.add_argument("--event", required=True, help="comma-separated state labels")
    p.add_argument("--p", required=True, help='probability threshold, e.g. "1" or "2/3"')
    p.set_defaults(func=cmd_believe)

    p = sub.add_parser("rationalize", help="interim rationalizability of a game file")
    p.add_argument("game")
    p.set_defaults(func=cmd_rationalize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BeliefKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
