"""Instantiated construction sequences (exDefinition sets) and their merging.

A definition entry from the catalog is a pattern; instantiating it against
concrete point names yields an InstantiatedEntry.  An ExDefinitionSet is an
ordered, dependency-closed list of such entries — the constructive skeleton
of one problem.  ``minimal_set`` unions several sets, merging identical
construction prefixes and pruning orphan entries.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

from .language import (
    DETERMINED_KINDS,
    DefinitionEntry,
    Recipe,
    Repository,
    Statement,
    canonicalize,
)


class MergeConflictError(Exception):
    """Two entries would pin the same determined point twice."""


def point_names() -> "itertools.chain[str]":
    """a, b, ..., z, a1, b1, ..., z1, a2, ..."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    return itertools.chain(
        letters, (f"{c}{i}" for i in itertools.count(1) for c in letters)
    )


def _canonical_recipe_args(kind: str, args: tuple[str, ...]) -> tuple[str, ...]:
    """Reorder recipe arguments that are interchangeable, so that equivalent
    constructions compare (and merge) equal."""
    if kind in {"midpoint", "equidistant_point", "circumcenter", "on_circumcircle", "on_line"}:
        return tuple(sorted(args))
    if kind in {"foot_of_perpendicular", "line_reflection"}:
        return (args[0],) + tuple(sorted(args[1:3]))
    if kind == "parallelogram_point":
        lo, hi = sorted((args[0], args[2]))
        return (lo, args[1], hi)
    if kind in {"intersection_line_circle", "intersection_line_perp", "parallel_point", "perp_point"}:
        return tuple(sorted(args[0:2])) + args[2:]
    if kind == "intersection_line_line":
        pairs = sorted([tuple(sorted(args[0:2])), tuple(sorted(args[2:4]))])
        return pairs[0] + pairs[1]
    if kind == "intersection_circle_circle":
        pairs = sorted([tuple(args[0:2]), tuple(args[2:4])])
        return pairs[0] + pairs[1]
    return args


@dataclass(frozen=True)
class InstantiatedEntry:
    """A definition entry applied to concrete points."""

    definition: DefinitionEntry
    mapping: tuple[tuple[str, str], ...]  # header point -> concrete point

    @property
    def name(self) -> str:
        return self.definition.name

    @property
    def map(self) -> dict[str, str]:
        return dict(self.mapping)

    @property
    def args(self) -> tuple[str, ...]:
        m = self.map
        return tuple(m[p] for p in self.definition.points)

    @property
    def introduced(self) -> tuple[str, ...]:
        m = self.map
        return tuple(m[p] for p in self.definition.introduced)

    @property
    def deps(self) -> tuple[str, ...]:
        m = self.map
        return tuple(m[p] for p in self.definition.deps)

    @property
    def emits(self) -> tuple[Statement, ...]:
        m = self.map
        return tuple(canonicalize(s.rename(m)) for s in self.definition.emits)

    @property
    def guards(self) -> tuple[Statement, ...]:
        m = self.map
        return tuple(s.rename(m) for s in self.definition.guards)

    @property
    def recipes(self) -> tuple[Recipe, ...]:
        m = self.map
        out = []
        for r in self.definition.recipes:
            args = _canonical_recipe_args(r.kind, tuple(m[a] for a in r.args))
            out.append(Recipe(target=m[r.target], kind=r.kind, args=args))
        return tuple(out)

    def signature(self) -> tuple:
        """Merge identity: definition name + canonicalized dependency usage."""
        return (self.name, tuple(r.args for r in self.recipes))

    def rename(self, mapping: dict[str, str]) -> "InstantiatedEntry":
        return InstantiatedEntry(
            definition=self.definition,
            mapping=tuple((h, mapping.get(c, c)) for h, c in self.mapping),
        )


def instantiate(
    definition: DefinitionEntry, concrete: dict[str, str] | Sequence[str]
) -> InstantiatedEntry:
    if not isinstance(concrete, dict):
        if len(concrete) != len(definition.points):
            raise ValueError(
                f"{definition.name!r} wants {len(definition.points)} points, "
                f"got {len(concrete)}"
            )
        concrete = dict(zip(definition.points, concrete))
    missing = [p for p in definition.points if p not in concrete]
    if missing:
        raise ValueError(f"instantiation of {definition.name!r} misses {missing}")
    # dependency points may repeat (a circle through its own defining point,
    # say); the introduced points must be genuinely new and distinct
    intro = [concrete[p] for p in definition.introduced]
    deps = {concrete[p] for p in definition.deps}
    if len(set(intro)) != len(intro) or set(intro) & deps:
        raise ValueError(
            f"instantiation of {definition.name!r} reuses an introduced point"
        )
    return InstantiatedEntry(
        definition=definition,
        mapping=tuple((p, concrete[p]) for p in definition.points),
    )


@dataclass
class ExDefinitionSet:
    """Ordered, dependency-closed construction sequence."""

    entries: list[InstantiatedEntry] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        defined: set[str] = set()
        for e in self.entries:
            for d in e.deps:
                if d not in defined:
                    raise ValueError(
                        f"entry {e.name!r} depends on {d!r} before it exists"
                    )
            for p in e.introduced:
                if p in defined:
                    raise ValueError(f"point {p!r} introduced twice")
                defined.add(p)

    @property
    def points(self) -> list[str]:
        out = []
        for e in self.entries:
            out.extend(e.introduced)
        return out

    def all_statements(self) -> list[Statement]:
        seen = set()
        out = []
        for e in self.entries:
            for s in e.emits:
                if s not in seen:
                    seen.add(s)
                    out.append(s)
        return out

    def all_guards(self) -> list[Statement]:
        seen = set()
        out = []
        for e in self.entries:
            for s in e.guards:
                if s not in seen:
                    seen.add(s)
                    out.append(s)
        return out

    def serialize(self) -> list[dict]:
        return [{"def": e.name, "args": list(e.args)} for e in self.entries]

    @staticmethod
    def deserialize(data: list[dict], repo: Repository) -> "ExDefinitionSet":
        entries = []
        for item in data:
            definition = repo.definition(item["def"])
            concrete = dict(zip(definition.points, item["args"]))
            entries.append(instantiate(definition, concrete))
        return ExDefinitionSet(entries=entries)


def _merge_conflicts(entries: list[InstantiatedEntry]) -> None:
    """Detect distinct entries that would construct the same determined point."""
    seen: dict[tuple, str] = {}
    for e in entries:
        for r in e.recipes:
            if r.kind not in DETERMINED_KINDS:
                continue
            key = (r.kind, r.args)
            if key in seen and seen[key] != r.target:
                raise MergeConflictError(
                    f"{r.kind}{r.args} pins both {seen[key]!r} and {r.target!r}"
                )
            seen[key] = r.target


def _prune_orphans(entries: list[InstantiatedEntry]) -> list[InstantiatedEntry]:
    """Drop entries that emit nothing and whose points nothing depends on."""
    kept = list(entries)
    while True:
        used: set[str] = set()
        for e in kept:
            own = set(e.introduced)
            used.update(e.deps)
            used.update(a for r in e.recipes for a in r.args if a not in own)
        nxt = [
            e
            for e in kept
            if e.emits or any(p in used for p in e.introduced)
        ]
        if len(nxt) == len(kept):
            return nxt
        kept = nxt


def canonical_rename(entries: list[InstantiatedEntry]) -> list[InstantiatedEntry]:
    """Greedy-minimal topological order plus sequential point renaming.

    Produces a canonical spelling: two isomorphic construction sequences
    serialize identically afterwards.
    """
    remaining = list(entries)
    ordered: list[InstantiatedEntry] = []
    placed: set[str] = set()
    names = point_names()
    rename: dict[str, str] = {}
    while remaining:
        ready = [e for e in remaining if all(d in placed for d in e.deps)]
        if not ready:
            raise ValueError("construction sequence has unsatisfiable dependencies")
        # tie-break on already-canonical dependency names only, so the order
        # is independent of the merge's internal naming
        pick = min(ready, key=lambda e: (e.name, tuple(rename[d] for d in e.deps)))
        remaining.remove(pick)
        placed.update(pick.introduced)
        for p in pick.introduced:
            rename[p] = next(names)
        ordered.append(pick.rename(rename))
    return ordered


def minimal_set(sets: list[ExDefinitionSet]) -> ExDefinitionSet:
    """Union construction sequences, merging identical prefixes.

    Entries are aligned by (definition name, canonicalized dependency pattern,
    occurrence index); matching entries share their introduced points.  After
    the union, orphan entries are pruned and the result is canonically
    renamed.  Raises MergeConflictError when two unmerged entries would force
    the same determined point.
    """
    merged: list[InstantiatedEntry] = []
    slots_by_sig: dict[tuple, list[int]] = {}
    counter = itertools.count()
    for exd in sets:
        rename: dict[str, str] = {}
        taken: dict[tuple, int] = {}
        for entry in exd.entries:
            entry = entry.rename(rename)
            sig = entry.signature()
            idx = taken.get(sig, 0)
            taken[sig] = idx + 1
            slots = slots_by_sig.setdefault(sig, [])
            if idx < len(slots):
                target = merged[slots[idx]]
                for mine, theirs in zip(entry.introduced, target.introduced):
                    if mine != theirs:
                        rename[mine] = theirs
            else:
                # internal placeholder names cannot collide with real points
                fresh = {p: f"_m{next(counter)}" for p in entry.introduced}
                rename.update(fresh)
                slots.append(len(merged))
                merged.append(entry.rename(fresh))
    _merge_conflicts(merged)
    merged = _prune_orphans(merged)
    return ExDefinitionSet(entries=canonical_rename(merged))
