"""Model and game file parsing plus canonical serialization.

The on-disk format is JSON.  Rationals are strings "numerator/denominator"
with a positive denominator; serialization always emits lowest terms.  Labels
(points, states, players, actions) are nonempty strings and may not contain
"," or ":" because the command line uses those as separators.  Beliefs are
keyed by atom indices: the player's own atom index maps to a sparse row over
the atoms of everything they do not know, in the canonical order computed by
the library (never read from the file).
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from importlib import resources

from .errors import BeliefKitError, ParseError, SchemaError, SemanticError
from .game import BayesianGame
from .measure import Measure, Space, make_map, make_space, sigma_join, sorted_points
from .typespace import NATURE, TypeSpace, minus_i_field

MODEL_KEYS = {"players", "parameter_space", "omega", "fields", "g", "beliefs"}
GAME_KEYS = MODEL_KEYS | {"actions", "payoffs"}


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text, path: str) -> Fraction:
    if not isinstance(text, str):
        raise SemanticError(f"{path}: rational must be a string, got {text!r}", path=path)
    body = text
    if "/" in body:
        num_s, _, den_s = body.partition("/")
    else:
        num_s, den_s = body, "1"
    try:
        num = int(num_s)
        den = int(den_s)
    except ValueError:
        raise SemanticError(f"{path}: malformed rational {text!r}", path=path) from None
    if den <= 0:
        raise SemanticError(f"{path}: denominator must be positive in {text!r}", path=path)
    return Fraction(num, den)


def _check_label(value, path: str) -> str:
    if not isinstance(value, str) or not value:
        raise SemanticError(f"{path}: labels must be nonempty strings, got {value!r}", path=path)
    if "," in value or ":" in value:
        raise SemanticError(f"{path}: label {value!r} may not contain ',' or ':'", path=path)
    return value


def _expect(doc, key: str, kind, path: str):
    if key not in doc:
        raise SchemaError(f"{path}: missing key {key!r}", path=path)
    value = doc[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{path}.{key}: expected {kind.__name__}", path=f"{path}.{key}")
    return value


def _parse_space(obj, path: str) -> Space:
    points = [_check_label(p, f"{path}.points") for p in _expect(obj, "points", list, path)]
    atoms_raw = _expect(obj, "atoms", list, path)
    atoms = []
    for k, atom in enumerate(atoms_raw):
        if not isinstance(atom, list):
            raise SchemaError(f"{path}.atoms[{k}]: expected list", path=f"{path}.atoms[{k}]")
        atoms.append([_check_label(p, f"{path}.atoms[{k}]") for p in atom])
    try:
        return make_space(points, atoms)
    except BeliefKitError as exc:
        raise SemanticError(f"{path}: {exc}", path=path) from None


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at position {exc.pos}: {exc.msg}", position=exc.pos) from None


def _parse_model_doc(doc) -> TypeSpace:
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", path="$")
    extra = set(doc) - GAME_KEYS
    if extra:
        raise SchemaError(f"unknown top-level keys {sorted(extra)}", path="$")
    missing = MODEL_KEYS - set(doc)
    if missing:
        raise SchemaError(f"missing top-level keys {sorted(missing)}", path="$")

    players = [_check_label(p, "$.players") for p in _expect(doc, "players", list, "$")]
    if len(set(players)) != len(players):
        raise SemanticError("$.players: duplicate player ids", path="$.players")
    if NATURE in players:
        raise SemanticError('$.players: "0" is reserved for nature', path="$.players")
    if not players:
        raise SemanticError("$.players: at least one player required", path="$.players")

    s_space = _parse_space(_expect(doc, "parameter_space", dict, "$"), "$.parameter_space")
    omega = [_check_label(w, "$.omega") for w in _expect(doc, "omega", list, "$")]

    fields_doc = _expect(doc, "fields", dict, "$")
    expected_fields = {NATURE, *players}
    if set(fields_doc) != expected_fields:
        raise SchemaError(
            f"$.fields: keys must be {sorted(expected_fields)}, got {sorted(fields_doc)}",
            path="$.fields",
        )
    fields = {}
    for agent, atoms in fields_doc.items():
        fields[agent] = _parse_space({"points": omega, "atoms": atoms}, f"$.fields.{agent}")

    g_doc = _expect(doc, "g", dict, "$")
    if set(g_doc) != set(omega):
        raise SemanticError("$.g: must map every state exactly once", path="$.g")
    for w, s in g_doc.items():
        if s not in s_space.points:
            raise SemanticError(f"$.g.{w}: unknown parameter point {s!r}", path=f"$.g.{w}")
    try:
        g = make_map(fields[NATURE], s_space, dict(g_doc))
    except BeliefKitError as exc:
        raise SemanticError(f"$.g: {exc}", path="$.g") from None

    beliefs_doc = _expect(doc, "beliefs", dict, "$")
    if set(beliefs_doc) != set(players):
        raise SchemaError("$.beliefs: keys must be exactly the player ids", path="$.beliefs")
    beliefs = {}
    for i in players:
        minus = sigma_join([fields[NATURE]] + [fields[j] for j in players if j != i])
        rows = beliefs_doc[i]
        if not isinstance(rows, dict):
            raise SchemaError(f"$.beliefs.{i}: expected object", path=f"$.beliefs.{i}")
        expected_rows = {str(k) for k in range(fields[i].n_atoms)}
        if set(rows) != expected_rows:
            raise SemanticError(
                f"$.beliefs.{i}: need one row per atom index {sorted(expected_rows, key=int)}",
                path=f"$.beliefs.{i}",
            )
        per_atom = []
        for k in range(fields[i].n_atoms):
            row = rows[str(k)]
            path = f"$.beliefs.{i}.{k}"
            if not isinstance(row, dict):
                raise SchemaError(f"{path}: expected object", path=path)
            weights = [Fraction(0)] * minus.n_atoms
            for b_key, value in row.items():
                try:
                    b = int(b_key)
                except ValueError:
                    raise SemanticError(f"{path}: bad atom index {b_key!r}", path=path) from None
                if not 0 <= b < minus.n_atoms:
                    raise SemanticError(
                        f"{path}: atom index {b} out of range for M_-{i} "
                        f"({minus.n_atoms} atoms)",
                        path=path,
                    )
                w = parse_rational(value, f"{path}.{b_key}")
                if w < 0:
                    raise SemanticError(f"{path}.{b_key}: negative weight {value}", path=path)
                weights[b] += w
            total = sum(weights, Fraction(0))
            if total != 1:
                raise SemanticError(
                    f"{path}: belief row sums to {format_rational(total)}, expected 1/1",
                    path=path,
                )
            per_atom.append(Measure(minus, tuple(weights)))
        beliefs[i] = tuple(per_atom)
    return TypeSpace(
        parameter_space=s_space,
        players=tuple(players),
        states=tuple(omega),
        fields=fields,
        g=g,
        beliefs=beliefs,
    )


def parse_model(text: str) -> TypeSpace:
    doc = _load(text)
    if isinstance(doc, dict) and not ({"actions", "payoffs"} - set(doc)):
        raise SchemaError("this is a game file; use parse_game", path="$")
    return _parse_model_doc(doc)


def parse_game(text: str) -> BayesianGame:
    doc = _load(text)
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", path="$")
    for key in ("actions", "payoffs"):
        if key not in doc:
            raise SchemaError(f"missing top-level key {key!r} for a game file", path="$")
    ts = _parse_model_doc(doc)

    actions_doc = _expect(doc, "actions", dict, "$")
    if set(actions_doc) != set(ts.players):
        raise SchemaError("$.actions: keys must be exactly the player ids", path="$.actions")
    actions = {}
    for i in ts.players:
        acts = actions_doc[i]
        if not isinstance(acts, list) or not acts:
            raise SemanticError(f"$.actions.{i}: expected a nonempty list", path=f"$.actions.{i}")
        actions[i] = tuple(_check_label(a, f"$.actions.{i}") for a in acts)
        if len(set(actions[i])) != len(actions[i]):
            raise SemanticError(f"$.actions.{i}: duplicate actions", path=f"$.actions.{i}")

    payoffs_doc = _expect(doc, "payoffs", dict, "$")
    if set(payoffs_doc) != set(ts.parameter_space.points):
        raise SemanticError(
            "$.payoffs: need exactly one table per parameter point", path="$.payoffs"
        )
    profiles = list(itertools.product(*(actions[i] for i in ts.players)))
    payoffs = {}
    for s, table in payoffs_doc.items():
        path = f"$.payoffs.{s}"
        if not isinstance(table, dict):
            raise SchemaError(f"{path}: expected object", path=path)
        expected = {",".join(p) for p in profiles}
        if set(table) != expected:
            missing = sorted(expected - set(table))
            extra = sorted(set(table) - expected)
            detail = []
            if missing:
                detail.append(f"missing profiles {missing}")
            if extra:
                detail.append(f"unknown profiles {extra}")
            raise SemanticError(f"{path}: {'; '.join(detail)}", path=path)
        for profile in profiles:
            key = ",".join(profile)
            vec = table[key]
            if not isinstance(vec, list) or len(vec) != len(ts.players):
                raise SemanticError(
                    f"{path}.{key}: expected one payoff per player", path=f"{path}.{key}"
                )
            payoffs[(s, profile)] = tuple(
                parse_rational(v, f"{path}.{key}[{n}]") for n, v in enumerate(vec)
            )
    return BayesianGame(space=ts, actions=actions, payoffs=payoffs)


def _space_doc(space: Space) -> dict:
    return {
        "points": list(space.points),
        "atoms": [sorted_points(space, a) for a in space.atoms],
    }


def model_doc(ts: TypeSpace) -> dict:
    """The canonical JSON-ready document for a type space."""
    beliefs = {}
    for i in ts.players:
        minus = minus_i_field(ts, i)
        rows = {}
        for k, mu in enumerate(ts.beliefs[i]):
            by_set = dict(zip(mu.base.atoms, mu.weights))
            aligned = [by_set[a] for a in minus.atoms]
            rows[str(k)] = {
                str(b): format_rational(w) for b, w in enumerate(aligned) if w != 0
            }
        beliefs[i] = rows
    return {
        "players": list(ts.players),
        "parameter_space": _space_doc(ts.parameter_space),
        "omega": list(ts.states),
        "fields": {
            agent: [sorted_points(field, a) for a in field.atoms]
            for agent, field in ts.fields.items()
        },
        "g": {s: ts.g(s) for s in ts.states},
        "beliefs": beliefs,
    }


def game_doc(game: BayesianGame) -> dict:
    doc = model_doc(game.space)
    ts = game.space
    doc["actions"] = {i: list(game.actions[i]) for i in ts.players}
    tables = {}
    for s in ts.parameter_space.points:
        table = {}
        for profile in itertools.product(*(game.actions[i] for i in ts.players)):
            table[",".join(profile)] = [
                format_rational(v) for v in game.payoffs[(s, profile)]
            ]
        tables[s] = table
    doc["payoffs"] = tables
    return doc


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def serialize_model(ts: TypeSpace) -> str:
    return canonical_json(model_doc(ts))


def serialize_game(game: BayesianGame) -> str:
    return canonical_json(game_doc(game))


def fixture_path(name: str):
    """Path of a shipped fixture file (case1.json, case1.game.json, ...)."""
    return resources.files(__package__) / "fixtures" / name


def load_fixture_model(name: str) -> TypeSpace:
    return parse_model(fixture_path(name).read_text())


def load_fixture_game(name: str) -> BayesianGame:
    return parse_game(fixture_path(name).read_text())
