"""Type spaces over a fixed parameter space, with validation, completeness
checking, and the belief / mutual-belief / common-belief operators.

A type space bundles the parameter space S, a carrier of states of the world,
one sigma-field per agent (nature is the reserved agent "0"), a nature map g,
and per player a belief measure for each of that player's atoms.  Beliefs are
keyed by atoms, so measurability of the type functions holds by construction;
what remains checkable is that g is measurable for nature's field and that
each belief lives on the right field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .errors import (
    BadProbability,
    EventNotMeasurable,
    InvalidTypeSpace,
    NotMeasurableSet,
    UnknownPlayer,
    UnknownState,
)
from .measure import Measure, MeasurableMap, Space, sigma_join, sorted_points

NATURE = "0"


@dataclass(frozen=True, eq=False)
class TypeSpace:
    parameter_space: Space
    players: tuple
    states: tuple
    fields: Mapping[str, Space]
    g: MeasurableMap
    beliefs: Mapping[str, tuple]

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "fields", dict(self.fields))
        object.__setattr__(self, "beliefs", {i: tuple(ms) for i, ms in self.beliefs.items()})
        if not self.players:
            raise InvalidTypeSpace("a type space needs at least one player")
        if NATURE in self.players:
            raise InvalidTypeSpace('"0" is reserved for nature and cannot be a player id')
        if len(set(self.players)) != len(self.players):
            raise InvalidTypeSpace("duplicate player ids")
        expected = {NATURE, *self.players}
        if set(self.fields) != expected:
            raise InvalidTypeSpace(f"fields must be keyed by {sorted(expected)}, got {sorted(self.fields)}")
        for i, fld in self.fields.items():
            if fld.points != self.states:
                raise InvalidTypeSpace(f"field of agent {i} is not on the state carrier")
        if self.g.domain.points != self.states:
            raise InvalidTypeSpace("g is not defined on the state carrier")
        if self.g.target.points != self.parameter_space.points:
            raise InvalidTypeSpace("g does not map into the parameter space")
        if set(self.beliefs) != set(self.players):
            raise InvalidTypeSpace("beliefs must be keyed by exactly the player ids")
        for i in self.players:
            if len(self.beliefs[i]) != self.fields[i].n_atoms:
                raise InvalidTypeSpace(f"player {i} needs one belief per atom of their field")

    def belief_at(self, i: str, state) -> Measure:
        """Player i's belief at the atom containing `state`."""
        if i not in self.players:
            raise UnknownPlayer(f"unknown player {i!r}")
        if state not in self.states:
            raise UnknownState(f"unknown state {state!r}")
        return self.beliefs[i][self.fields[i].atom_index(state)]

    def state_index(self, state) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownState(f"unknown state {state!r}") from None


def minus_i_field(ts: TypeSpace, i: str) -> Space:
    """sigma(M_0 union all M_j, j != i): everything player i does not know.

    Nature's field is included so that g-preimages are always measurable for
    the belief measures, which is what the first-order beliefs need.
    """
    if i not in ts.players:
        raise UnknownPlayer(f"unknown player {i!r}")
    parts = [ts.fields[NATURE]] + [ts.fields[j] for j in ts.players if j != i]
    return sigma_join(parts)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    player: Optional[str] = None


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_type_space(ts: TypeSpace) -> ValidationReport:
    """Report every violated type-space condition; empty report means valid."""
    found = []
    from .measure import is_measurable

    ok, witness = is_measurable(ts.g, ts.fields[NATURE], ts.parameter_space)
    if not ok:
        found.append(
            Violation(
                "g-not-measurable",
                f"g is not measurable for nature's field; witness atom "
                f"{sorted_points(ts.parameter_space, witness)}",
            )
        )
    for i in ts.players:
        minus = minus_i_field(ts, i)
        for k, mu in enumerate(ts.beliefs[i]):
            if mu.base.points != ts.states:
                found.append(
                    Violation(
                        "belief-base-carrier",
                        f"belief of player {i} at atom {k} is not on the state carrier",
                        player=i,
                    )
                )
                continue
            if not mu.base.same_partition(minus):
                found.append(
                    Violation(
                        "belief-base-field",
                        f"belief of player {i} at atom {k} is based on the wrong field "
                        f"(expected M_-{i})",
                        player=i,
                    )
                )
            total = sum(mu.weights, Fraction(0))
            if total != 1 or any(w < 0 for w in mu.weights):
                found.append(
                    Violation(
                        "belief-weights",
                        f"belief of player {i} at atom {k} has weights summing to {total}",
                        player=i,
                    )
                )
    return ValidationReport(tuple(found))


def require_valid(ts: TypeSpace) -> None:
    report = validate_type_space(ts)
    if not report.ok:
        raise InvalidTypeSpace(
            "; ".join(v.message for v in report.violations), report=report
        )


@dataclass(frozen=True)
class PlayerCompleteness:
    complete: bool
    witness: Optional[Measure] = None


@dataclass(frozen=True)
class CompletenessVerdict:
    per_player: Mapping[str, PlayerCompleteness]

    @property
    def all_complete(self) -> bool:
        return all(v.complete for v in self.per_player.values())


def _witness_outside_range(minus: Space, attained: set) -> Measure:
    """First measure, in a fixed enumeration, that no type's belief attains.

    Candidates put mass t on the first atom and 1-t on the second, t running
    over the Farey-style enumeration 1/2, 1/3, 2/3, 1/4, 3/4, ...; the
    attained set is finite so this terminates.
    """
    k = minus.n_atoms
    zero = Fraction(0)
    for q in range(2, 2 + 2 * (len(attained) + 2)):
        for p in range(1, q):
            if math.gcd(p, q) != 1:
                continue
            t = Fraction(p, q)
            weights = tuple([t, 1 - t] + [zero] * (k - 2))
            if weights not in attained:
                return Measure(minus, weights)
    raise AssertionError("witness enumeration exhausted; unreachable")


def check_completeness(ts: TypeSpace) -> CompletenessVerdict:
    """Decide surjectivity of each type function onto the measures on (Omega, M_-i).

    On a finite space the dichotomy is sharp: one atom in M_-i means a single
    probability measure (always attained); two or more atoms mean a continuum
    of measures against a finite range, so a witness always exists.
    """
    require_valid(ts)
    verdicts = {}
    for i in ts.players:
        minus = minus_i_field(ts, i)
        if minus.n_atoms == 1:
            verdicts[i] = PlayerCompleteness(complete=True)
        else:
            attained = {mu.weights for mu in ts.beliefs[i]}
            verdicts[i] = PlayerCompleteness(
                complete=False, witness=_witness_outside_range(minus, attained)
            )
    return CompletenessVerdict(verdicts)


def belief_operator(ts: TypeSpace, i: str, event: Iterable, p) -> tuple:
    """B_i^p(E): the states whose type assigns `event` probability at least p.

    The result is a union of player i's atoms, hence measurable for them.
    """
    if i not in ts.players:
        raise UnknownPlayer(f"unknown player {i!r}")
    p = Fraction(p)
    if p < 0 or p > 1:
        raise BadProbability(f"belief threshold {p} outside [0, 1]")
    minus = minus_i_field(ts, i)
    try:
        e = minus.require_measurable(event)
    except NotMeasurableSet as exc:
        raise EventNotMeasurable(
            f"event is not measurable for player {i}: {exc}", player=i
        ) from None
    result = set()
    for k, atom in enumerate(ts.fields[i].atoms):
        if ts.beliefs[i][k].of_set(e) >= p:
            result |= atom
    assert ts.fields[i].is_measurable_set(result)
    return tuple(sorted_points(ts.fields[i], result))


def mutual_belief(ts: TypeSpace, event: Iterable, p) -> tuple:
    """Intersection of B_i^p(event) over all players."""
    result = set(ts.states)
    for i in ts.players:
        result &= set(belief_operator(ts, i, event, p))
    return tuple(s for s in ts.states if s in result)


def common_belief(ts: TypeSpace, event: Iterable, p) -> tuple:
    """Iterated mutual belief to a fixpoint: E_0 = MB(E), E_{k+1} = E_k & MB(E_k).

    The chain strictly decreases until it stabilizes, so at most |states|
    iterations run.  An iterate can escape some player's field; that raises
    EventNotMeasurable carrying the player and the iteration index, which is
    the purely measurable framework showing through.
    """
    def step(current, iteration):
        try:
            return frozenset(mutual_belief(ts, current, p))
        except EventNotMeasurable as exc:
            raise EventNotMeasurable(
                f"iterate {iteration} is not measurable for player {exc.player}",
                player=exc.player,
                iteration=iteration,
            ) from None

    current = step(frozenset(event), 0)
    iteration = 0
    while True:
        iteration += 1
        nxt = current & step(current, iteration)
        if nxt == current:
            return tuple(s for s in ts.states if s in current)
        current = nxt
