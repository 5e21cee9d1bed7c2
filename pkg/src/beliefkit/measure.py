"""Finite measurable spaces, sigma-field algebra, and exact probability measures.

A sigma-field on a finite carrier is identified with its atom partition
(every finite sigma-field is atomic, so this is lossless).  All weights are
`fractions.Fraction`; nothing here ever touches floating point.  Every value
is immutable and every operation is a pure function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .errors import (
    BadCoordinate,
    BadProbability,
    CarrierMismatch,
    DuplicateLabel,
    NotAPartition,
    NotAProduct,
    NotMeasurable,
    NotMeasurableSet,
    UnknownPoint,
)

Label = Hashable

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Space:
    """A finite carrier together with the atom partition of its sigma-field.

    `points` fixes the carrier order used everywhere for determinism; `atoms`
    keeps the order it was constructed with (file order for parsed spaces,
    canonical min-index order for derived ones).  A set is measurable iff it
    is a union of atoms.
    """

    points: tuple
    atoms: tuple
    factors: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "atoms", tuple(frozenset(a) for a in self.atoms))
        seen = set()
        for p in self.points:
            if p in seen:
                raise DuplicateLabel(f"duplicate point label {p!r}")
            seen.add(p)
        covered = set()
        for a in self.atoms:
            if not a:
                raise NotAPartition("empty atom", offending=a)
            stray = a - seen
            if stray:
                raise NotAPartition(f"atom contains unknown points {sorted(stray, key=repr)}", offending=a)
            overlap = covered & a
            if overlap:
                raise NotAPartition(f"atoms overlap at {sorted(overlap, key=repr)}", offending=a)
            covered |= a
        if covered != seen:
            missing = seen - covered
            raise NotAPartition(
                f"points not covered by any atom: {sorted(missing, key=repr)}",
                offending=frozenset(missing),
            )

    @cached_property
    def _point_index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def _atom_index(self) -> dict:
        idx = {}
        for i, a in enumerate(self.atoms):
            for p in a:
                idx[p] = i
        return idx

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def point_index(self, point) -> int:
        try:
            return self._point_index[point]
        except KeyError:
            raise UnknownPoint(f"unknown point {point!r}") from None

    def atom_index(self, point) -> int:
        try:
            return self._atom_index[point]
        except KeyError:
            raise UnknownPoint(f"unknown point {point!r}") from None

    def atom_of(self, point) -> frozenset:
        return self.atoms[self.atom_index(point)]

    def is_measurable_set(self, pts: Iterable) -> bool:
        s = self._as_point_set(pts)
        return self.split_fragment(s) is None

    def split_fragment(self, pts: Iterable) -> Optional[frozenset]:
        """The part of some atom that `pts` cuts in half, or None if measurable."""
        s = self._as_point_set(pts)
        for a in self.atoms:
            inter = a & s
            if inter and inter != a:
                return frozenset(inter)
        return None

    def require_measurable(self, pts: Iterable) -> frozenset:
        s = self._as_point_set(pts)
        frag = self.split_fragment(s)
        if frag is not None:
            raise NotMeasurableSet(
                f"set is not a union of atoms; splits an atom at {sorted_points(self, frag)}",
                fragment=frag,
            )
        return s

    def _as_point_set(self, pts: Iterable) -> frozenset:
        s = frozenset(pts)
        for p in s:
            if p not in self._point_index:
                raise UnknownPoint(f"unknown point {p!r}")
        return s

    def same_partition(self, other: "Space") -> bool:
        """Equality of carrier and sigma-field, ignoring atom order."""
        return self.points == other.points and set(self.atoms) == set(other.atoms)


def sorted_points(space: Space, pts: Iterable) -> list:
    """Points sorted in carrier order; use this for any observable output."""
    return sorted(pts, key=space.point_index)


def make_space(points: Sequence, atoms: Sequence) -> Space:
    """Build a space from a point list and an atom partition, validating both."""
    return Space(tuple(points), tuple(frozenset(a) for a in atoms))


def discrete_space(points: Sequence) -> Space:
    return Space(tuple(points), tuple(frozenset([p]) for p in points))


def _canonical_atoms(points: Sequence, groups: Iterable[frozenset]) -> tuple:
    index = {p: i for i, p in enumerate(points)}
    return tuple(sorted(groups, key=lambda a: min(index[p] for p in a)))


def sigma_join(fields: Sequence[Space]) -> Space:
    """Coarsest common refinement of several partitions on one carrier."""
    if not fields:
        raise CarrierMismatch("sigma_join needs at least one field")
    carrier = fields[0].points
    for f in fields[1:]:
        if f.points != carrier:
            raise CarrierMismatch("fields live on different carriers")
    groups: dict = {}
    for p in carrier:
        key = tuple(f.atom_index(p) for f in fields)
        groups.setdefault(key, []).append(p)
    return Space(carrier, _canonical_atoms(carrier, (frozenset(g) for g in groups.values())))


def product_space(*factors: Space) -> Space:
    """Product carrier with the sigma-field generated by rectangles of atoms."""
    points = tuple(itertools.product(*(f.points for f in factors)))
    atoms = []
    for combo in itertools.product(*(f.atoms for f in factors)):
        atoms.append(frozenset(itertools.product(*combo)))
    return Space(points, _canonical_atoms(points, atoms), factors=tuple(factors))


@dataclass(frozen=True)
class MeasurableMap:
    """A total function between carriers, stored against the domain order."""

    domain: Space
    target: Space
    assignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(self.assignment))
        if len(self.assignment) != len(self.domain.points):
            raise UnknownPoint("assignment length does not match the domain carrier")
        for img in self.assignment:
            self.target.point_index(img)

    def __call__(self, point):
        return self.assignment[self.domain.point_index(point)]

    def preimage(self, pts: Iterable) -> frozenset:
        s = frozenset(pts)
        return frozenset(p for p, img in zip(self.domain.points, self.assignment) if img in s)

    def then(self, other: "MeasurableMap") -> "MeasurableMap":
        """Composition: first self, then other."""
        if self.target.points != other.domain.points:
            raise CarrierMismatch("composition carriers do not line up")
        return MeasurableMap(self.domain, other.target, tuple(other(img) for img in self.assignment))

    def is_bijection(self) -> bool:
        return len(set(self.assignment)) == len(self.target.points) == len(self.assignment)

    def inverse(self) -> "MeasurableMap":
        if not self.is_bijection():
            raise CarrierMismatch("map is not a bijection")
        back = {img: p for p, img in zip(self.domain.points, self.assignment)}
        return MeasurableMap(self.target, self.domain, tuple(back[q] for q in self.target.points))


def make_map(domain: Space, target: Space, mapping) -> MeasurableMap:
    """Build a MeasurableMap from a dict or callable."""
    if callable(mapping):
        images = tuple(mapping(p) for p in domain.points)
    else:
        extra = set(mapping) - set(domain.points)
        if extra:
            raise UnknownPoint(f"mapping mentions points outside the domain: {extra}")
        try:
            images = tuple(mapping[p] for p in domain.points)
        except KeyError as exc:
            raise UnknownPoint(f"no image for domain point {exc.args[0]!r}") from None
    return MeasurableMap(domain, target, images)


def induced_field(m: MeasurableMap) -> Space:
    """Coarsest field on the domain making `m` measurable: nonempty atom preimages."""
    groups: dict = {}
    for p in m.domain.points:
        groups.setdefault(m.target.atom_index(m(p)), []).append(p)
    return Space(m.domain.points, _canonical_atoms(m.domain.points, (frozenset(g) for g in groups.values())))


def is_measurable(m: MeasurableMap, src_field: Optional[Space] = None, tgt_field: Optional[Space] = None):
    """Check preimages of target atoms land in `src_field`; returns (ok, witness).

    Atoms suffice: preimages commute with unions, so every measurable target
    set has a measurable preimage iff every atom does.
    """
    src = src_field if src_field is not None else m.domain
    tgt = tgt_field if tgt_field is not None else m.target
    if src.points != m.domain.points:
        raise CarrierMismatch("source field is not on the map's domain carrier")
    if tgt.points != m.target.points:
        raise CarrierMismatch("target field is not on the map's target carrier")
    for b in tgt.atoms:
        if not src.is_measurable_set(m.preimage(b)):
            return False, b
    return True, None


@dataclass(frozen=True)
class Measure:
    """An exact probability measure: one nonnegative rational per atom, summing to 1."""

    base: Space
    weights: tuple

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if len(ws) != self.base.n_atoms:
            raise ValueError("need exactly one weight per atom")
        for w in ws:
            if w < 0:
                raise ValueError(f"negative weight {w}")
        total = sum(ws, ZERO)
        if total != 1:
            raise ValueError(f"weights sum to {total}, expected 1")

    def of_atom(self, i: int) -> Fraction:
        return self.weights[i]

    def of_set(self, pts: Iterable) -> Fraction:
        s = self.base.require_measurable(pts)
        seen = set()
        total = ZERO
        for p in s:
            i = self.base.atom_index(p)
            if i not in seen:
                seen.add(i)
                total += self.weights[i]
        return total

    @property
    def support(self) -> tuple:
        return tuple(i for i, w in enumerate(self.weights) if w > 0)


def measure_of(mu: Measure, pts: Iterable) -> Fraction:
    return mu.of_set(pts)


def dirac(point, space: Space) -> Measure:
    """Unit mass on the atom containing `point`."""
    i = space.atom_index(point)
    return Measure(space, tuple(ONE if j == i else ZERO for j in range(space.n_atoms)))


def uniform(space: Space) -> Measure:
    n = space.n_atoms
    return Measure(space, tuple(Fraction(1, n) for _ in range(n)))


def product_measure(mu: Measure, nu: Measure) -> Measure:
    """Product measure on product_space(mu.base, nu.base); rectangles multiply."""
    space = product_space(mu.base, nu.base)
    weights = []
    for a in space.atoms:
        x, y = next(iter(a))
        weights.append(mu.weights[mu.base.atom_index(x)] * nu.weights[nu.base.atom_index(y)])
    return Measure(space, tuple(weights))


def pushforward(mu: Measure, m: MeasurableMap, tgt_field: Optional[Space] = None) -> Measure:
    """Image measure: result(B) = mu(m^{-1}(B)) for every measurable B."""
    tgt = tgt_field if tgt_field is not None else m.target
    ok, witness = is_measurable(m, mu.base, tgt)
    if not ok:
        raise NotMeasurable(
            f"map is not measurable from the measure's field; witness atom {sorted_points(tgt, witness)}",
            witness=witness,
        )
    return Measure(tgt, tuple(mu.of_set(m.preimage(b)) for b in tgt.atoms))


def marginal(mu: Measure, kept: Sequence[int]) -> Measure:
    """Restriction of a product measure to a sub-product of its coordinates."""
    factors = mu.base.factors
    if factors is None:
        raise NotAProduct("measure base is not a product space")
    kept = list(kept)
    if not kept or kept != sorted(set(kept)):
        raise BadCoordinate(f"kept coordinates must be distinct and increasing: {kept}")
    if kept[0] < 0 or kept[-1] >= len(factors):
        raise BadCoordinate(f"coordinate out of range for {len(factors)} factors: {kept}")
    if len(kept) == len(factors):
        return mu
    if len(kept) == 1:
        k = kept[0]
        tgt = factors[k]
        project = lambda p: p[k]
    else:
        tgt = product_space(*(factors[k] for k in kept))
        project = lambda p: tuple(p[k] for k in kept)
    weights = [ZERO] * tgt.n_atoms
    for i, a in enumerate(mu.base.atoms):
        weights[tgt.atom_index(project(next(iter(a))))] += mu.weights[i]
    return Measure(tgt, tuple(weights))


def belief_event_contains(mu: Measure, event: Iterable, p) -> bool:
    """Membership in the generator event {measures giving `event` mass >= p}."""
    p = Fraction(p)
    if p < 0 or p > 1:
        raise BadProbability(f"probability threshold {p} outside [0, 1]")
    return mu.of_set(event) >= p
