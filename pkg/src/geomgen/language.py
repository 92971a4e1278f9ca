"""Formal statement language: predicates, canonical forms, rule and definition files.

A statement is a predicate applied to points (``perp a b c d``).  The predicate
vocabulary is closed; every predicate has a fixed arity and a fixed group of
argument symmetries.  Canonicalization rewrites a statement to the
lexicographically smallest member of its symmetry orbit, so that any two
spellings of the same geometric fact compare equal.
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

# predicate name -> arity
PREDICATES: dict[str, int] = {
    "coll": 3,
    "ncoll": 3,
    "para": 4,
    "npara": 4,
    "perp": 4,
    "cong": 4,
    "midp": 3,
    "circle": 4,
    "cyclic": 4,
    "eqangle": 8,
    "eqratio": 8,
    "eqangle6": 8,
    "eqratio6": 8,
    "simtri": 6,
    "simtri2": 6,
    "simtriStar": 6,
    "contri": 6,
    "contriStar": 6,
    "contri2": 6,
    "sameside": 6,
}

# Predicates that are only ever checked against the numeric scene, never
# derived or stored symbolically.
NUMERIC_GUARDS = frozenset({"ncoll", "npara", "sameside"})

# Predicates whose truth is an angle/length equation (the algebraic systems
# can answer membership queries for them).
EQUATION_PREDICATES = frozenset(
    {"para", "perp", "cong", "eqangle", "eqratio", "eqangle6", "eqratio6"}
)

TRIANGLE_PREDICATES = frozenset(
    {"simtri", "simtri2", "simtriStar", "contri", "contriStar", "contri2"}
)

_POINT_RE = re.compile(r"^[a-z][0-9]*$")
_RULE_TAG_RE = re.compile(r"^K_?(\d+)$")


class ParseError(ValueError):
    """Raised for malformed statements, rule lines, or definition blocks."""


def normalize_point(token: str) -> str:
    name = token.lower()
    if not _POINT_RE.match(name):
        raise ParseError(f"invalid point name {token!r}")
    return name


def _closure(arity: int, generators: list[tuple[int, ...]]) -> tuple[tuple[int, ...], ...]:
    """BFS closure of index permutations under composition."""
    identity = tuple(range(arity))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = tuple(p[i] for i in g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return tuple(sorted(seen))


def _symmetry_groups() -> dict[str, tuple[tuple[int, ...], ...]]:
    groups: dict[str, tuple[tuple[int, ...], ...]] = {}
    s3 = tuple(itertools.permutations(range(3)))
    groups["coll"] = s3
    groups["ncoll"] = s3
    groups["cyclic"] = tuple(itertools.permutations(range(4)))
    groups["circle"] = tuple((0,) + tuple(i + 1 for i in p) for p in s3)
    groups["midp"] = ((0, 1, 2), (0, 2, 1))
    # two point pairs: swap within either pair, swap the pairs
    pair4 = _closure(4, [(1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)])
    for name in ("para", "npara", "perp", "cong"):
        groups[name] = pair4
    # four point pairs p1..p4 encoding  m(p2)-m(p1) = m(p4)-m(p3):
    # reverse any pair, swap sides, transpose inner pairs, negate both sides.
    pair8 = _closure(
        8,
        [
            (1, 0, 2, 3, 4, 5, 6, 7),
            (0, 1, 3, 2, 4, 5, 6, 7),
            (0, 1, 2, 3, 5, 4, 6, 7),
            (0, 1, 2, 3, 4, 5, 7, 6),
            (4, 5, 6, 7, 0, 1, 2, 3),
            (0, 1, 4, 5, 2, 3, 6, 7),
            (2, 3, 0, 1, 6, 7, 4, 5),
        ],
    )
    for name in ("eqangle", "eqratio", "eqangle6", "eqratio6"):
        groups[name] = pair8
    # triangle correspondences: simultaneous vertex permutation + swap triangles
    tri = []
    for p in s3:
        tri.append(tuple(p) + tuple(i + 3 for i in p))
        tri.append(tuple(i + 3 for i in p) + tuple(p))
    tri_group = _closure(6, tri)
    for name in TRIANGLE_PREDICATES:
        groups[name] = tri_group
    # two (point, pair) triples: swap within either pair, swap the triples
    groups["sameside"] = _closure(
        6, [(0, 2, 1, 3, 4, 5), (0, 1, 2, 3, 5, 4), (3, 4, 5, 0, 1, 2)]
    )
    return groups


SYMMETRY_GROUPS = _symmetry_groups()


@dataclass(frozen=True, order=True)
class Statement:
    """A predicate applied to concrete points (or pattern variables)."""

    pred: str
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        arity = PREDICATES.get(self.pred)
        if arity is None:
            raise ParseError(f"unknown predicate {self.pred!r}")
        if len(self.args) != arity:
            raise ParseError(
                f"{self.pred} expects {arity} points, got {len(self.args)}"
            )

    def __str__(self) -> str:
        return format_statement(self)

    @property
    def points(self) -> frozenset[str]:
        return frozenset(self.args)

    def rename(self, mapping: dict[str, str]) -> "Statement":
        return Statement(self.pred, tuple(mapping.get(a, a) for a in self.args))

    def variants(self) -> list[tuple[str, ...]]:
        """All argument tuples equivalent to this one under the symmetry group."""
        group = SYMMETRY_GROUPS[self.pred]
        seen = []
        known = set()
        for perm in group:
            t = tuple(self.args[i] for i in perm)
            if t not in known:
                known.add(t)
                seen.append(t)
        return seen


def canonicalize(stmt: Statement) -> Statement:
    """Lexicographically smallest member of the statement's symmetry orbit."""
    group = SYMMETRY_GROUPS[stmt.pred]
    best = min(tuple(stmt.args[i] for i in perm) for perm in group)
    if best == stmt.args:
        return stmt
    return Statement(stmt.pred, best)


def parse_statement(text: str) -> Statement:
    tokens = text.split()
    if not tokens:
        raise ParseError("empty statement")
    pred = tokens[0]
    if pred not in PREDICATES:
        raise ParseError(f"unknown predicate {pred!r}")
    args = tuple(normalize_point(t) for t in tokens[1:])
    return Statement(pred, args)


def format_statement(stmt: Statement) -> str:
    return " ".join((stmt.pred,) + stmt.args)


# ---------------------------------------------------------------------------
# knowledge rules


@dataclass(frozen=True)
class KnowledgeRule:
    """A horn clause over statement patterns: premises => one conclusion."""

    id: str
    premises: tuple[Statement, ...]
    conclusion: Statement
    code: str = ""
    description: str = ""

    @property
    def variables(self) -> frozenset[str]:
        vs: set[str] = set()
        for p in self.premises:
            vs.update(p.args)
        return frozenset(vs)

    def __str__(self) -> str:
        lhs = ", ".join(format_statement(p) for p in self.premises)
        return f"{self.id}: {lhs} => {format_statement(self.conclusion)}"


def _rule_code(premises: tuple[Statement, ...], conclusion: Statement) -> str:
    return "_".join([p.pred for p in premises] + [conclusion.pred])


def parse_rules(text: str) -> list[KnowledgeRule]:
    """Parse a rule file: one ``[Kn:] premises => conclusion`` per line.

    ``#`` starts a comment; a comment on a rule line is kept as the rule's
    description.  Raises ParseError with a line number on malformed input.
    """
    rules: list[KnowledgeRule] = []
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line, _, comment = raw.partition("#")
        line = line.strip()
        if not line:
            continue
        description = comment.strip()
        rule_id = ""
        head, colon, rest = line.partition(":")
        if colon and _RULE_TAG_RE.match(head.strip()):
            rule_id = "K_" + _RULE_TAG_RE.match(head.strip()).group(1)
            line = rest.strip()
        try:
            lhs, arrow, rhs = line.partition("=>")
            if not arrow:
                raise ParseError("missing '=>'")
            premises = tuple(
                parse_statement(p.strip()) for p in lhs.split(",") if p.strip()
            )
            if not premises:
                raise ParseError("rule has no premises")
            conclusion = parse_statement(rhs.strip())
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if not rule_id:
            rule_id = f"K_{len(rules) + 1}"
        if rule_id in seen_ids:
            raise ParseError(f"line {lineno}: duplicate rule id {rule_id}")
        seen_ids.add(rule_id)
        bound = set()
        for p in premises:
            bound.update(p.args)
        missing = [v for v in conclusion.args if v not in bound]
        if missing:
            raise ParseError(
                f"line {lineno}: conclusion variables {missing} not bound by premises"
            )
        rules.append(
            KnowledgeRule(
                id=rule_id,
                premises=premises,
                conclusion=conclusion,
                code=_rule_code(premises, conclusion),
                description=description,
            )
        )
    # disambiguate duplicate codes in catalog order (…_1, …_2)
    by_code: dict[str, list[int]] = {}
    for i, r in enumerate(rules):
        by_code.setdefault(r.code, []).append(i)
    out = list(rules)
    for code, idxs in by_code.items():
        if len(idxs) > 1:
            for n, i in enumerate(idxs, start=1):
                r = out[i]
                out[i] = KnowledgeRule(
                    id=r.id,
                    premises=r.premises,
                    conclusion=r.conclusion,
                    code=f"{code}_{n}",
                    description=r.description,
                )
    return out


# ---------------------------------------------------------------------------
# constructive definitions

RECIPE_KINDS = frozenset(
    {
        "free",
        "on_line",
        "on_circle",
        "midpoint",
        "reflection",
        "intersection_line_line",
        "intersection_line_circle",
        "intersection_circle_circle",
        "intersection_line_perp",
        "foot_of_perpendicular",
        "line_reflection",
        "parallelogram_point",
        "circumcenter",
        "equidistant_point",
        "parallel_point",
        "perp_point",
        "on_circumcircle",
    }
)

# recipe kinds whose output is fully determined by their arguments (0 dof)
DETERMINED_KINDS = frozenset(
    {
        "midpoint",
        "reflection",
        "intersection_line_line",
        "intersection_line_circle",
        "intersection_circle_circle",
        "intersection_line_perp",
        "foot_of_perpendicular",
        "line_reflection",
        "parallelogram_point",
        "circumcenter",
    }
)

_RECIPE_RE = re.compile(r"^([a-z][0-9]*)\s*=\s*([a-z_0-9]+)\s*\(([^)]*)\)$")


@dataclass(frozen=True)
class Recipe:
    target: str
    kind: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class DefinitionEntry:
    """One constructive definition: new points, their recipes, emitted facts."""

    name: str
    points: tuple[str, ...]  # header arguments, introduced + dependencies
    deps: tuple[str, ...]
    emits: tuple[Statement, ...]
    recipes: tuple[Recipe, ...]
    guards: tuple[Statement, ...] = ()

    @property
    def introduced(self) -> tuple[str, ...]:
        return tuple(p for p in self.points if p not in self.deps)


def _parse_def_block(block: list[tuple[int, str]]) -> DefinitionEntry:
    lineno, header = block[0]
    tokens = header.split()
    name = tokens[0]
    try:
        points = tuple(normalize_point(t) for t in tokens[1:])
    except ParseError as exc:
        raise ParseError(f"line {lineno}: {exc}") from None
    if not points:
        raise ParseError(f"line {lineno}: definition {name!r} introduces no points")
    if len(set(points)) != len(points):
        raise ParseError(f"line {lineno}: repeated point in header of {name!r}")
    deps: tuple[str, ...] = ()
    emits: list[Statement] = []
    recipes: list[Recipe] = []
    guards: list[Statement] = []
    for lineno, line in block[1:]:
        key, colon, body = line.partition(":")
        key = key.strip()
        if not colon or key not in {"deps", "emit", "recipe", "guard"}:
            raise ParseError(f"line {lineno}: expected deps:/emit:/recipe:/guard:")
        body = body.strip()
        try:
            if key == "deps":
                deps = tuple(normalize_point(t) for t in body.split())
            elif key == "emit":
                emits = [parse_statement(s.strip()) for s in body.split(";") if s.strip()]
            elif key == "guard":
                guards = [parse_statement(s.strip()) for s in body.split(";") if s.strip()]
            else:
                for part in body.split(";"):
                    part = part.strip()
                    if not part:
                        continue
                    m = _RECIPE_RE.match(part)
                    if not m:
                        raise ParseError(f"malformed recipe {part!r}")
                    target, kind, argstr = m.groups()
                    if kind not in RECIPE_KINDS:
                        raise ParseError(f"unknown recipe kind {kind!r}")
                    args = tuple(
                        normalize_point(a.strip())
                        for a in argstr.split(",")
                        if a.strip()
                    )
                    recipes.append(Recipe(target=target, kind=kind, args=args))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    entry = DefinitionEntry(
        name=name,
        points=points,
        deps=deps,
        emits=tuple(canonicalize(s) for s in emits),
        recipes=tuple(recipes),
        guards=tuple(guards),
    )
    # validation
    declared = set(points)
    for d in deps:
        if d not in declared:
            raise ParseError(f"definition {name!r}: unknown dependency {d!r}")
    introduced = entry.introduced
    targets = [r.target for r in recipes]
    if sorted(targets) != sorted(introduced):
        raise ParseError(
            f"definition {name!r}: recipes must assign each introduced point "
            f"exactly once (got {targets}, need {list(introduced)})"
        )
    available = set(deps)
    for r in recipes:
        for a in r.args:
            if a not in available:
                raise ParseError(
                    f"definition {name!r}: recipe for {r.target!r} uses "
                    f"{a!r} before it is constructed"
                )
        available.add(r.target)
    for s in list(entry.emits) + list(entry.guards):
        for a in s.args:
            if a not in declared:
                raise ParseError(
                    f"definition {name!r}: statement uses undeclared point {a!r}"
                )
    return entry


def parse_defs(text: str) -> list[DefinitionEntry]:
    """Parse a definitions file: blank-line separated blocks, # comments ignored."""
    blocks: list[list[tuple[int, str]]] = []
    current: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.partition("#")[0].rstrip()
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        current.append((lineno, line.strip()))
    if current:
        blocks.append(current)
    entries = []
    names = set()
    for block in blocks:
        entry = _parse_def_block(block)
        if entry.name in names:
            raise ParseError(f"duplicate definition name {entry.name!r}")
        names.add(entry.name)
        entries.append(entry)
    return entries


@dataclass
class Repository:
    """A parsed rule catalog plus a definitions catalog."""

    rules: list[KnowledgeRule] = field(default_factory=list)
    defs: list[DefinitionEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.rule_by_id = {r.id: r for r in self.rules}
        self.def_by_name = {d.name: d for d in self.defs}

    def rule(self, rule_id: str) -> KnowledgeRule:
        return self.rule_by_id[rule_id]

    def definition(self, name: str) -> DefinitionEntry:
        return self.def_by_name[name]


def load_repository(rules_path, defs_path) -> Repository:
    with open(rules_path, encoding="utf-8") as fh:
        rules = parse_rules(fh.read())
    with open(defs_path, encoding="utf-8") as fh:
        defs = parse_defs(fh.read())
    log.info("loaded %d rules and %d definitions", len(rules), len(defs))
    return Repository(rules=rules, defs=defs)
