"""Bayesian games on type spaces and interim correlated rationalizability.

An action survives a round iff some conjecture makes it a weakly best reply:
the conjecture assigns, to every atom of the player's uncertainty field, a
distribution over the opponents' currently surviving action profiles at the
types that atom pins down.  Expected payoffs are exact; the existence check
first tries the point-mass conjectures (which decide the question outright
when the player has only two actions) and otherwise settles it with a small
exact-rational phase-one simplex, since an action can be a best reply only
against a strictly mixed conjecture.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvalidGame
from .measure import sorted_points
from .typespace import TypeSpace, ValidationReport, Violation, validate_type_space

ZERO = Fraction(0)
ONE = Fraction(1)

_VERTEX_LIMIT = 512


@dataclass(frozen=True, eq=False)
class BayesianGame:
    """A type space plus finite action sets and nature-measurable payoffs.

    `payoffs` maps (parameter point, action profile in player order) to the
    payoff vector, one entry per player in player order.
    """

    space: TypeSpace
    actions: Mapping[str, tuple]
    payoffs: Mapping[tuple, tuple]

    def __post_init__(self):
        object.__setattr__(self, "actions", {i: tuple(a) for i, a in self.actions.items()})
        object.__setattr__(
            self,
            "payoffs",
            {
                (s, tuple(profile)): tuple(Fraction(v) for v in vec)
                for (s, profile), vec in self.payoffs.items()
            },
        )
        if set(self.actions) != set(self.space.players):
            raise InvalidGame("actions must be keyed by exactly the player ids")
        for i, acts in self.actions.items():
            if not acts:
                raise InvalidGame(f"player {i} has an empty action list")
            if len(set(acts)) != len(acts):
                raise InvalidGame(f"player {i} has duplicate actions")

    def payoff(self, s_point, profile: tuple, player_pos: int) -> Fraction:
        return self.payoffs[(s_point, profile)][player_pos]


@dataclass(frozen=True, eq=False)
class RationalizabilityResult:
    """Survivor sets per (player, atom) for every elimination round; the last
    round equals the one before it, and its index is the fixpoint round."""

    rounds: tuple
    fixpoint_round: int
    actions: Mapping[str, tuple]

    @property
    def survivors(self) -> dict:
        return self.rounds[-1]

    @property
    def rationalizable(self) -> dict:
        out = {}
        for i, per_atom in self.survivors.items():
            present = set().union(*[set(acts) for acts in per_atom])
            out[i] = tuple(a for a in self.actions[i] if a in present)
        return out


def validate_game(game: BayesianGame) -> ValidationReport:
    """Check the underlying space, payoff-table completeness, and
    nature-measurability of every payoff entry."""
    found = list(validate_type_space(game.space).violations)
    ts = game.space
    players = ts.players
    profiles = list(itertools.product(*(game.actions[i] for i in players)))
    for s in ts.parameter_space.points:
        for profile in profiles:
            key = (s, profile)
            if key not in game.payoffs:
                found.append(
                    Violation("payoff-missing", f"no payoff entry for {s!r} with profile {profile}")
                )
            elif len(game.payoffs[key]) != len(players):
                found.append(
                    Violation("payoff-arity", f"payoff entry for {s!r}, {profile} needs one value per player")
                )
    known = {(s, p) for s in ts.parameter_space.points for p in profiles}
    for key in game.payoffs:
        if key not in known:
            found.append(Violation("payoff-extra", f"payoff entry {key} references no point/profile"))
    if not any(v.code.startswith("payoff") for v in found):
        for atom in ts.parameter_space.atoms:
            pts = sorted_points(ts.parameter_space, atom)
            if len(pts) < 2:
                continue
            ref = pts[0]
            for profile in profiles:
                for other in pts[1:]:
                    for pos, i in enumerate(players):
                        if game.payoffs[(ref, profile)][pos] != game.payoffs[(other, profile)][pos]:
                            found.append(
                                Violation(
                                    "payoff-not-nature-measurable",
                                    f"player {i}'s payoff varies inside parameter atom {pts} "
                                    f"at profile {profile}",
                                    player=i,
                                )
                            )
    return ValidationReport(tuple(found))


def _require_valid_game(game: BayesianGame) -> None:
    report = validate_game(game)
    if not report.ok:
        raise InvalidGame("; ".join(v.message for v in report.violations), report=report)


class _Elimination:
    def __init__(self, game: BayesianGame):
        self.game = game
        ts = game.space
        self.players = ts.players
        self.pos = {i: k for k, i in enumerate(self.players)}
        self.state_order = {s: k for k, s in enumerate(ts.states)}
        # every atom of a player's uncertainty field pins down nature's atom
        # and each opponent's atom; cache that per atom set
        self._atom_info: dict = {}

    def info(self, atom: frozenset):
        if atom not in self._atom_info:
            ts = self.game.space
            rep = min(atom, key=self.state_order.__getitem__)
            s_point = ts.g(rep)
            opp_atoms = {j: ts.fields[j].atom_index(rep) for j in self.players}
            self._atom_info[atom] = (s_point, opp_atoms)
        return self._atom_info[atom]

    def run(self) -> RationalizabilityResult:
        game = self.game
        ts = game.space
        rounds = [
            {i: tuple(game.actions[i] for _ in ts.fields[i].atoms) for i in self.players}
        ]
        while True:
            current = rounds[-1]
            nxt = {}
            for i in self.players:
                per_atom = []
                for t_idx in range(ts.fields[i].n_atoms):
                    mu = ts.beliefs[i][t_idx]
                    keep = tuple(
                        a
                        for a in current[i][t_idx]
                        if self._best_reply_possible(i, a, mu, current)
                    )
                    assert keep, "a nonempty survivor set lost every action"
                    per_atom.append(keep)
                nxt[i] = tuple(per_atom)
            rounds.append(nxt)
            if nxt == current:
                return RationalizabilityResult(
                    rounds=tuple(rounds),
                    fixpoint_round=len(rounds) - 1,
                    actions=dict(game.actions),
                )

    def _best_reply_possible(self, i: str, a: str, mu, current) -> bool:
        game = self.game
        competitors = [c for c in game.actions[i] if c != a]
        if not competitors:
            return True
        pos_i = self.pos[i]
        opponents = [j for j in self.players if j != i]
        # per supported atom, the payoff-difference vectors of the available
        # opponent profiles (diff = weight * (payoff(a) - payoff(competitor)))
        atom_vectors = []
        for atom, w in zip(mu.base.atoms, mu.weights):
            if w == 0:
                continue
            s_point, opp_atoms = self.info(atom)
            choices = [current[j][opp_atoms[j]] for j in opponents]
            vectors = []
            for combo in itertools.product(*choices):
                base = {j: act for j, act in zip(opponents, combo)}
                base[i] = a
                profile_a = tuple(base[j] for j in self.players)
                u_a = game.payoff(s_point, profile_a, pos_i)
                diff = []
                for c in competitors:
                    base[i] = c
                    profile_c = tuple(base[j] for j in self.players)
                    diff.append(w * (u_a - game.payoff(s_point, profile_c, pos_i)))
                vectors.append(tuple(diff))
            atom_vectors.append(vectors)
        if not atom_vectors:
            return True
        n_combos = 1
        for vectors in atom_vectors:
            n_combos *= len(vectors)
        if n_combos <= _VERTEX_LIMIT:
            for choice in itertools.product(*atom_vectors):
                if all(sum(v[k] for v in choice) >= 0 for k in range(len(competitors))):
                    return True
            if len(competitors) == 1:
                # a single comparison is linear in the conjecture, so its
                # maximum over the conjecture polytope sits at a vertex
                return False
        return _mixed_conjecture_feasible(atom_vectors, len(competitors))


def _mixed_conjecture_feasible(atom_vectors, n_comp: int) -> bool:
    """Feasibility of: one distribution per atom over its vectors, with every
    competitor's aggregated payoff difference nonnegative."""
    n_vars = sum(len(v) for v in atom_vectors)
    cols = n_vars + n_comp  # conjecture weights, then one slack per competitor
    rows = []
    rhs = []
    offset = 0
    for vectors in atom_vectors:
        row = [ZERO] * cols
        for k in range(len(vectors)):
            row[offset + k] = ONE
        rows.append(row)
        rhs.append(ONE)
        offset += len(vectors)
    for c in range(n_comp):
        row = [ZERO] * cols
        offset = 0
        for vectors in atom_vectors:
            for k, vec in enumerate(vectors):
                row[offset + k] = vec[c]
            offset += len(vectors)
        row[n_vars + c] = -ONE
        rows.append(row)
        rhs.append(ZERO)
    return _phase_one_feasible(rows, rhs)


def _phase_one_feasible(rows, rhs) -> bool:
    """Exact phase-one simplex with Bland's rule: is {Ax = b, x >= 0} nonempty?

    Requires b >= 0, which the callers arrange.  Minimizes the sum of one
    artificial variable per row; feasible iff that minimum is zero.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    tableau = [list(rows[r]) + [ONE if k == r else ZERO for k in range(m)] + [rhs[r]] for r in range(m)]
    basis = [n + r for r in range(m)]
    width = n + m + 1
    # objective row for W = sum of artificials, expressed in nonbasic columns
    obj = [ZERO] * width
    for r in range(m):
        for k in range(width):
            obj[k] += tableau[r][k]
    for r in range(m):
        obj[n + r] -= ONE

    while True:
        enter = next((k for k in range(n + m) if obj[k] > 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for r in range(m):
            coeff = tableau[r][enter]
            if coeff > 0:
                ratio = tableau[r][-1] / coeff
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best = ratio
                    leave = r
        if leave is None:
            raise AssertionError("phase-one simplex cannot be unbounded")
        pivot = tableau[leave][enter]
        tableau[leave] = [v / pivot for v in tableau[leave]]
        for r in range(m):
            if r != leave and tableau[r][enter] != 0:
                factor = tableau[r][enter]
                tableau[r] = [v - factor * p for v, p in zip(tableau[r], tableau[leave])]
        if obj[enter] != 0:
            factor = obj[enter]
            obj = [v - factor * p for v, p in zip(obj, tableau[leave])]
        basis[leave] = enter
    return obj[-1] == 0


def interim_rationalizable(game: BayesianGame) -> RationalizabilityResult:
    """Iterated elimination of never-best replies, simultaneously across all
    players and types, to its fixpoint."""
    _require_valid_game(game)
    return _Elimination(game).run()


def rationalizable_actions(game: BayesianGame) -> dict:
    """Actions surviving at some type of each player, in declared order."""
    return interim_rationalizable(game).rationalizable
