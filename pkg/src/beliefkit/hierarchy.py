"""Finite-depth belief hierarchies: recursive extraction, coherency checking,
stabilization, hierarchy quotients, and duplicate-type detection.

The n-th order belief of a player at a state is the pushforward of their type's
belief under the map sending each state to the pair (atom of nature's value,
labels of the opponents' depth-(n-1) hierarchies).  Labels are canonical
integers assigned by first occurrence in the fixed state order, so hierarchy
equality is label equality and everything stays exact.  Depth 0 is a single
dummy label per player.

The per-player partition of states by depth-n hierarchy only ever refines as n
grows, so on a finite carrier it reaches a fixpoint; the depth where it stops
moving is the stabilization depth, and "stable hierarchy" below always means
the hierarchy at that depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Tuple

from .errors import InternalMeasurabilityFailure, UnknownState
from .measure import (
    Measure,
    MeasurableMap,
    Space,
    discrete_space,
    pushforward,
    sigma_join,
    _canonical_atoms,
)
from .typespace import NATURE, TypeSpace, minus_i_field, require_valid

ZERO = Fraction(0)


@dataclass(frozen=True)
class HierarchyLevel:
    """One order of belief: a finitely supported measure over pairs
    (parameter atom index, opponent depth-(n-1) label tuple)."""

    depth: int
    player: str
    space: Space
    measure: Measure
    opponents: tuple
    opponent_classes: Mapping[str, tuple]
    opponent_parents: Mapping[str, tuple]

    def support_items(self):
        for point, w in zip(self.space.points, self.measure.weights):
            if w != 0:
                yield point, w


@dataclass(frozen=True)
class HierarchyProfile:
    player: str
    state: object
    levels: tuple


@dataclass(frozen=True)
class QuotientResult:
    quotient: TypeSpace
    projection: MeasurableMap
    depth: int
    classes: tuple


class _Engine:
    """Shared label/level computation over one type space."""

    def __init__(self, ts: TypeSpace):
        require_valid(ts)
        self.ts = ts
        self.n = len(ts.states)
        self.state_idx = {s: k for k, s in enumerate(ts.states)}
        self.minus = {i: minus_i_field(ts, i) for i in ts.players}
        self.g_atom = tuple(ts.parameter_space.atom_index(ts.g(s)) for s in ts.states)
        # labels[d][player][state index] -> canonical int; depth 0 is the dummy label
        self.labels = [{i: (0,) * self.n for i in ts.players}]
        self.classes = [{i: (tuple(ts.states),) for i in ts.players}]
        self.levels = []  # levels[d-1][player] -> _LevelData

    def ensure_depth(self, depth: int) -> None:
        while len(self.levels) < depth:
            self._extend()

    def _extend(self) -> None:
        ts = self.ts
        d = len(self.levels) + 1
        prev_labels = self.labels[d - 1]
        prev_classes = self.classes[d - 1]
        level_row = {}
        label_row = {}
        class_row = {}
        for i in ts.players:
            opponents = tuple(j for j in ts.players if j != i)
            keys = tuple(
                (self.g_atom[s], tuple(prev_labels[j][s] for j in opponents))
                for s in range(self.n)
            )
            for atom in self.minus[i].atoms:
                if len({keys[self.state_idx[p]] for p in atom}) != 1:
                    raise InternalMeasurabilityFailure(
                        f"depth-{d} labeling map for player {i} is not constant on an "
                        f"atom of M_-{i}; the type space was not validated"
                    )
            support = []
            position = {}
            for s in range(self.n):
                k = keys[s]
                if k not in position:
                    position[k] = len(support)
                    support.append(k)
            space = discrete_space(tuple(support))
            measures = []
            for mu in ts.beliefs[i]:
                weights = [ZERO] * len(support)
                for ai, atom in enumerate(mu.base.atoms):
                    w = mu.weights[ai]
                    if w != 0:
                        rep = next(iter(atom))
                        weights[position[keys[self.state_idx[rep]]]] += w
                measures.append(Measure(space, tuple(weights)))
            if d >= 2:
                parents = {
                    j: tuple(
                        self.labels[d - 2][j][self.state_idx[cls[0]]]
                        for cls in prev_classes[j]
                    )
                    for j in opponents
                }
            else:
                parents = {j: () for j in opponents}
            level_row[i] = _LevelData(space, tuple(measures), opponents,
                                      {j: prev_classes[j] for j in opponents}, parents)
            # refine the per-player partition: previous label plus this level
            combo = {}
            new_labels = []
            new_classes = []
            for s in range(self.n):
                mu = measures[ts.fields[i].atom_index(ts.states[s])]
                key = (prev_labels[i][s], mu.weights)
                if key not in combo:
                    combo[key] = len(new_classes)
                    new_classes.append([])
                new_labels.append(combo[key])
                new_classes[combo[key]].append(ts.states[s])
            label_row[i] = tuple(new_labels)
            class_row[i] = tuple(tuple(c) for c in new_classes)
        self.levels.append(level_row)
        self.labels.append(label_row)
        self.classes.append(class_row)

    def level_for(self, i: str, state, depth: int) -> HierarchyLevel:
        data = self.levels[depth - 1][i]
        mu = data.measures[self.ts.fields[i].atom_index(state)]
        return HierarchyLevel(
            depth=depth,
            player=i,
            space=data.space,
            measure=mu,
            opponents=data.opponents,
            opponent_classes=data.classes,
            opponent_parents=data.parents,
        )

    def stabilization(self) -> int:
        cap = self.n * len(self.ts.players) + 2
        for d in range(1, cap + 1):
            self.ensure_depth(d)
            if self.labels[d] == self.labels[d - 1]:
                return d - 1
        raise AssertionError("refinement did not stabilize within its bound")


@dataclass(frozen=True)
class _LevelData:
    space: Space
    measures: tuple
    opponents: tuple
    classes: Mapping[str, tuple]
    parents: Mapping[str, tuple]


def first_order_belief(ts: TypeSpace, i: str, state) -> Measure:
    """Pushforward of the type's belief through g: the belief about nature."""
    require_valid(ts)
    mu = ts.belief_at(i, state)
    return pushforward(mu, ts.g, ts.parameter_space)


def nth_order_belief(ts: TypeSpace, i: str, state, n: int) -> HierarchyLevel:
    if n < 1:
        raise ValueError("belief order must be at least 1")
    engine = _Engine(ts)
    if state not in engine.state_idx:
        raise UnknownState(f"unknown state {state!r}")
    engine.ensure_depth(n)
    return engine.level_for(i, state, n)


def hierarchy_profile(ts: TypeSpace, i: str, state, n: int) -> HierarchyProfile:
    if n < 1:
        raise ValueError("profile depth must be at least 1")
    engine = _Engine(ts)
    if state not in engine.state_idx:
        raise UnknownState(f"unknown state {state!r}")
    engine.ensure_depth(n)
    levels = tuple(engine.level_for(i, state, d) for d in range(1, n + 1))
    return HierarchyProfile(player=i, state=state, levels=levels)


def all_profiles(ts: TypeSpace, n: int) -> dict:
    """Profiles for every player and state in one pass: {player: {state: profile}}."""
    engine = _Engine(ts)
    engine.ensure_depth(n)
    out = {}
    for i in ts.players:
        out[i] = {}
        for s in ts.states:
            levels = tuple(engine.level_for(i, s, d) for d in range(1, n + 1))
            out[i][s] = HierarchyProfile(player=i, state=s, levels=levels)
    return out


def coherency_check(profile: HierarchyProfile) -> Tuple[bool, Optional[int]]:
    """Marginal of each level onto the previous level's coordinates must
    reproduce it exactly; returns (ok, least failing depth)."""
    levels = profile.levels
    for k in range(1, len(levels)):
        hi = levels[k]
        lo = levels[k - 1]
        projected: dict = {}
        for (sa, labs), w in hi.support_items():
            truncated = tuple(
                hi.opponent_parents[j][lab] for j, lab in zip(hi.opponents, labs)
            )
            tp = (sa, truncated)
            projected[tp] = projected.get(tp, ZERO) + w
        low = {point: w for point, w in lo.support_items()}
        if projected != low:
            return False, k
    return True, None


def stabilization_depth(ts: TypeSpace) -> int:
    """Least n at which every player's depth-n hierarchy partition equals the
    depth-(n+1) one; being a fixpoint of the refinement, it stays put after."""
    return _Engine(ts).stabilization()


def find_duplicates(ts: TypeSpace, i: str):
    """Groups of >= 2 atoms of player i carrying identical stable hierarchies."""
    engine = _Engine(ts)
    nstar = engine.stabilization()
    labels = engine.labels[nstar][i]
    groups: dict = {}
    for k, atom in enumerate(ts.fields[i].atoms):
        atom_labels = {labels[engine.state_idx[p]] for p in atom}
        assert len(atom_labels) == 1
        groups.setdefault(atom_labels.pop(), []).append(k)
    return tuple(
        tuple(g) for _, g in sorted(groups.items(), key=lambda kv: kv[1][0]) if len(g) >= 2
    )


def quotient(ts: TypeSpace) -> QuotientResult:
    """Collapse states sharing nature's atom and every player's stable hierarchy.

    The projection is a type morphism, the quotient is a valid type space, and
    no two quotient states agree on both nature and all hierarchies.
    """
    engine = _Engine(ts)
    nstar = engine.stabilization()
    labels = engine.labels[nstar]
    keys = tuple(
        (engine.g_atom[s], tuple(labels[i][s] for i in ts.players))
        for s in range(engine.n)
    )
    class_of: dict = {}
    members: list = []
    for s in range(engine.n):
        k = keys[s]
        if k not in class_of:
            class_of[k] = len(members)
            members.append([])
        members[class_of[k]].append(ts.states[s])
    classes = tuple(tuple(m) for m in members)
    q_states = tuple(f"q{c}" for c in range(len(classes)))
    class_key = {c: keys[engine.state_idx[classes[c][0]]] for c in range(len(classes))}

    def grouped(component):
        groups: dict = {}
        for c, name in enumerate(q_states):
            groups.setdefault(component(c), []).append(name)
        return Space(q_states, _canonical_atoms(q_states, (frozenset(g) for g in groups.values())))

    q_fields = {NATURE: grouped(lambda c: class_key[c][0])}
    for pos, i in enumerate(ts.players):
        q_fields[i] = grouped(lambda c, pos=pos: class_key[c][1][pos])

    g_star = MeasurableMap(
        q_fields[NATURE], ts.parameter_space, tuple(ts.g(classes[c][0]) for c in range(len(classes)))
    )

    projection_assignment = tuple(q_states[class_of[keys[s]]] for s in range(engine.n))
    m_src = sigma_join([ts.fields[NATURE]] + [ts.fields[i] for i in ts.players])
    m_tgt = sigma_join([q_fields[NATURE]] + [q_fields[i] for i in ts.players])
    projection = MeasurableMap(m_src, m_tgt, projection_assignment)

    q_minus = {
        i: sigma_join([q_fields[NATURE]] + [q_fields[j] for j in ts.players if j != i])
        for i in ts.players
    }
    q_beliefs = {}
    for i in ts.players:
        per_atom = []
        for atom in q_fields[i].atoms:
            rep_class = min(q_states.index(name) for name in atom)
            rep_state = classes[rep_class][0]
            mu = ts.belief_at(i, rep_state)
            weights = tuple(
                mu.of_set(projection.preimage(b)) for b in q_minus[i].atoms
            )
            per_atom.append(Measure(q_minus[i], weights))
        q_beliefs[i] = tuple(per_atom)

    q_ts = TypeSpace(
        parameter_space=ts.parameter_space,
        players=ts.players,
        states=q_states,
        fields=q_fields,
        g=g_star,
        beliefs=q_beliefs,
    )
    return QuotientResult(quotient=q_ts, projection=projection, depth=nstar, classes=classes)


@dataclass(frozen=True)
class HierarchyAnalysis:
    depth: int
    stabilization_depth: int
    classes: Mapping[str, tuple]
    profiles: Mapping[str, Mapping[object, HierarchyProfile]]


def hierarchy_analysis(ts: TypeSpace, depth: Optional[int] = None) -> HierarchyAnalysis:
    """Stabilization depth, per-depth label classes, and all profiles in one
    engine pass; `depth` defaults to one past stabilization."""
    engine = _Engine(ts)
    nstar = engine.stabilization()
    d = depth if depth is not None else nstar + 1
    if d < 1:
        raise ValueError("analysis depth must be at least 1")
    engine.ensure_depth(d)
    classes = {i: tuple(engine.classes[k][i] for k in range(d + 1)) for i in ts.players}
    profiles = {
        i: {
            s: HierarchyProfile(
                player=i,
                state=s,
                levels=tuple(engine.level_for(i, s, k) for k in range(1, d + 1)),
            )
            for s in ts.states
        }
        for i in ts.players
    }
    return HierarchyAnalysis(
        depth=d, stabilization_depth=nstar, classes=classes, profiles=profiles
    )


def canonical_hierarchy(ts: TypeSpace, player: str, state, depth: int):
    """Label-free nested form of a hierarchy; equal across type spaces exactly
    when the hierarchies agree (requires a shared parameter space to compare)."""
    engine = _Engine(ts)
    if state not in engine.state_idx:
        raise UnknownState(f"unknown state {state!r}")
    engine.ensure_depth(depth)
    memo: dict = {}

    def form(j: str, sidx: int, d: int):
        key = (j, engine.labels[d][j][sidx], d)
        if key in memo:
            return memo[key]
        if d == 0:
            result = ()
        else:
            result = form(j, sidx, d - 1) + (level_form(j, sidx, d),)
        memo[key] = result
        return result

    def level_form(j: str, sidx: int, d: int):
        data = engine.levels[d - 1][j]
        mu = data.measures[ts.fields[j].atom_index(ts.states[sidx])]
        entries = []
        for (sa, labs), w in zip(data.space.points, mu.weights):
            if w == 0:
                continue
            opp_forms = tuple(
                form(o, engine.state_idx[data.classes[o][lab][0]], d - 1)
                for o, lab in zip(data.opponents, labs)
            )
            entries.append(((sa, opp_forms), w))
        entries.sort()
        return tuple(entries)

    return form(player, engine.state_idx[state], depth)
