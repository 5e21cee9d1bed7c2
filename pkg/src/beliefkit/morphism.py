"""Type-morphism verification and exhaustive morphism search.

A morphism between type spaces over one parameter space is a map of state
carriers that is measurable for the pooled fields and makes two diagrams
commute: nature-compatibility (preimages of parameter events agree) and
belief-compatibility (each target belief evaluates like the transported
source belief).  On finite carriers both diagrams are decided exhaustively
over atoms, which suffices by additivity.

The search enumerates candidate maps by backtracking over the source states.
Two exact per-state filters cut the tree without ever discarding a morphism:
nature-compatibility is equivalent to "g and g' o phi land in the same
parameter atom at every state", and pooled-field measurability is equivalent
to "states sharing a source M-atom share a target M-atom".  Every surviving
leaf still gets the full belief-diagram check, so the result set equals the
plain lexicographic enumeration's.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import (
    CarrierMismatch,
    NotAMorphism,
    ParameterSpaceMismatch,
    SearchSpaceTooLarge,
)
from .measure import MeasurableMap, Space, make_map, sigma_join, sorted_points
from .typespace import (
    NATURE,
    TypeSpace,
    Violation,
    minus_i_field,
    require_valid,
)

ZERO = Fraction(0)


@dataclass(frozen=True, eq=False)
class TypeMorphism:
    source: TypeSpace
    target: TypeSpace
    map: MeasurableMap


@dataclass(frozen=True)
class MorphismReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class TerminalityReport:
    counts: tuple

    @property
    def terminal_at_this_scale(self) -> bool:
        return all(c == 1 for c in self.counts)


def _pooled_field(ts: TypeSpace) -> Space:
    return sigma_join([ts.fields[NATURE]] + [ts.fields[i] for i in ts.players])


def _require_same_category(src: TypeSpace, tgt: TypeSpace) -> None:
    if src.parameter_space != tgt.parameter_space:
        raise ParameterSpaceMismatch("the two type spaces use different parameter spaces")
    if set(src.players) != set(tgt.players):
        raise ParameterSpaceMismatch("the two type spaces have different player sets")


def _as_map(src: TypeSpace, tgt: TypeSpace, phi) -> MeasurableMap:
    if isinstance(phi, MeasurableMap):
        if phi.domain.points != src.states or phi.target.points != tgt.states:
            raise CarrierMismatch("map carriers do not match the two state spaces")
        return phi
    return make_map(_pooled_field(src), _pooled_field(tgt), phi)


def check_morphism(src: TypeSpace, tgt: TypeSpace, phi: Union[Mapping, MeasurableMap]) -> MorphismReport:
    """Full diagnostic check; collects every violation with a witness."""
    require_valid(src)
    require_valid(tgt)
    _require_same_category(src, tgt)
    m = _as_map(src, tgt, phi)
    found = []

    from .measure import is_measurable

    m_src = _pooled_field(src)
    m_tgt = _pooled_field(tgt)
    ok, witness = is_measurable(m, m_src, m_tgt)
    if not ok:
        found.append(
            Violation(
                "not-m-measurable",
                f"map is not measurable for the pooled fields; witness atom "
                f"{sorted_points(m_tgt, witness)}",
            )
        )

    for a in src.parameter_space.atoms:
        lhs = src.g.preimage(a)
        rhs = m.preimage(tgt.g.preimage(a))
        if lhs != rhs:
            found.append(
                Violation(
                    "nature-diagram",
                    f"nature preimages differ at parameter atom "
                    f"{sorted_points(src.parameter_space, a)}: "
                    f"{sorted_points(m_src, lhs)} vs {sorted_points(m_src, rhs)}",
                )
            )

    for i in src.players:
        for omega in src.states:
            mu_src = src.belief_at(i, omega)
            mu_tgt = tgt.belief_at(i, m(omega))
            for b, w_tgt in zip(mu_tgt.base.atoms, mu_tgt.weights):
                pre = m.preimage(b)
                if not mu_src.base.is_measurable_set(pre):
                    found.append(
                        Violation(
                            "belief-preimage",
                            f"preimage of target event {sorted_points(mu_tgt.base, b)} "
                            f"is not measurable for player {i}",
                            player=i,
                        )
                    )
                    continue
                w_src = mu_src.of_set(pre)
                if w_src != w_tgt:
                    found.append(
                        Violation(
                            "belief-diagram",
                            f"belief diagram fails for player {i} at state {omega!r} on "
                            f"target event {sorted_points(mu_tgt.base, b)}: "
                            f"{w_tgt} vs transported {w_src}",
                            player=i,
                        )
                    )
    return MorphismReport(tuple(found))


class _SearchContext:
    """Precomputed bitmask tables for fast full checks of candidate maps."""

    def __init__(self, src: TypeSpace, tgt: TypeSpace):
        require_valid(src)
        require_valid(tgt)
        _require_same_category(src, tgt)
        self.src = src
        self.tgt = tgt
        self.n_src = len(src.states)
        self.n_tgt = len(tgt.states)
        src_idx = {s: k for k, s in enumerate(src.states)}
        # nature filter: admissible targets share the parameter atom of g
        tgt_g_atom = [tgt.parameter_space.atom_index(tgt.g(t)) for t in tgt.states]
        src_g_atom = [src.parameter_space.atom_index(src.g(s)) for s in src.states]
        self.admissible = [
            tuple(t for t in range(self.n_tgt) if tgt_g_atom[t] == src_g_atom[s])
            for s in range(self.n_src)
        ]
        # pooled-field cohesion
        self.m_src = _pooled_field(src)
        self.m_tgt = _pooled_field(tgt)
        self.src_m_atom = [self.m_src.atom_index(s) for s in src.states]
        self.tgt_m_atom = [self.m_tgt.atom_index(t) for t in tgt.states]
        # belief tables: per player, minus atoms as source-state bitmasks and
        # per-state weight vectors aligned with the canonical minus fields
        self.players = src.players
        self.tables = {}
        for i in src.players:
            minus_src = minus_i_field(src, i)
            minus_tgt = minus_i_field(tgt, i)
            atom_masks = []
            for a in minus_src.atoms:
                mask = 0
                for p in a:
                    mask |= 1 << src_idx[p]
                atom_masks.append(mask)

            def aligned(ts, minus, state):
                mu = ts.belief_at(i, state)
                by_set = dict(zip(mu.base.atoms, mu.weights))
                return tuple(by_set[a] for a in minus.atoms)

            src_w = [aligned(src, minus_src, s) for s in src.states]
            tgt_w = [aligned(tgt, minus_tgt, t) for t in tgt.states]
            tgt_minus_idx = [minus_tgt.atom_index(t) for t in tgt.states]
            self.tables[i] = (atom_masks, src_w, tgt_w, tgt_minus_idx, minus_tgt.n_atoms)

    def full_check(self, assignment) -> bool:
        """Belief diagram over every player, state, and target minus-atom."""
        for i in self.players:
            atom_masks, src_w, tgt_w, tgt_minus_idx, n_b = self.tables[i]
            pre_masks = [0] * n_b
            for s, t in enumerate(assignment):
                pre_masks[tgt_minus_idx[t]] |= 1 << s
            covered = [[] for _ in range(n_b)]
            for b in range(n_b):
                mask = pre_masks[b]
                for ai, am in enumerate(atom_masks):
                    inter = mask & am
                    if inter == am:
                        covered[b].append(ai)
                    elif inter:
                        return False  # preimage not measurable for player i
            for s in range(self.n_src):
                ws = src_w[s]
                wt = tgt_w[assignment[s]]
                for b in range(n_b):
                    total = ZERO
                    for ai in covered[b]:
                        total += ws[ai]
                    if total != wt[b]:
                        return False
        return True

    def search(self):
        assignment = [0] * self.n_src
        chosen_m_atom: dict = {}
        results = []

        def recurse(s: int):
            if s == self.n_src:
                if self.full_check(assignment):
                    results.append(tuple(assignment))
                return
            ma = self.src_m_atom[s]
            pinned = chosen_m_atom.get(ma)
            for t in self.admissible[s]:
                if pinned is not None and self.tgt_m_atom[t] != pinned:
                    continue
                assignment[s] = t
                fresh = pinned is None
                if fresh:
                    chosen_m_atom[ma] = self.tgt_m_atom[t]
                recurse(s + 1)
                if fresh:
                    del chosen_m_atom[ma]

        recurse(0)
        return results


def find_morphisms(src: TypeSpace, tgt: TypeSpace, max_search: int = 10**6) -> list:
    """All type morphisms from src to tgt, in lexicographic map order.

    The nominal candidate count |target states| ** |source states| is checked
    against `max_search` before anything runs.
    """
    ctx = _SearchContext(src, tgt)
    required = ctx.n_tgt**ctx.n_src
    if required > max_search:
        raise SearchSpaceTooLarge(
            f"{required} candidate maps exceed the limit {max_search}",
            required=required,
            limit=max_search,
        )
    out = []
    for assignment in ctx.search():
        mapping = MeasurableMap(
            ctx.m_src, ctx.m_tgt, tuple(tgt.states[t] for t in assignment)
        )
        out.append(TypeMorphism(source=src, target=tgt, map=mapping))
    return out


def is_isomorphism(src: TypeSpace, tgt: TypeSpace, phi: Union[Mapping, MeasurableMap]) -> bool:
    """True iff phi is a bijective morphism whose inverse is also a morphism."""
    report = check_morphism(src, tgt, phi)
    if not report.ok:
        raise NotAMorphism(
            "; ".join(v.message for v in report.violations), report=report
        )
    m = _as_map(src, tgt, phi)
    if not m.is_bijection():
        return False
    return check_morphism(tgt, src, m.inverse()).ok


def verify_terminality_small(candidates, target: TypeSpace, max_search: int = 10**6) -> TerminalityReport:
    """Count morphisms from each candidate into the target; terminal at this
    scale means every count is exactly one."""
    counts = tuple(len(find_morphisms(c, target, max_search=max_search)) for c in candidates)
    return TerminalityReport(counts=counts)
