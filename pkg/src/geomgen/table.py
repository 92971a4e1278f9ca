"""Offline mapping from knowledge rules to the constructions that exercise them.

The table is built by repeated blind sampling: draw a handful of definitions,
close them over their dependency points, canonicalize, run the deduction
engine, and record which catalog rules appear on the proof paths of the
resulting conclusions.  Each such rule gains the sampled construction set as
one way to produce problems that exercise it.  Lookup is then a uniform
random draw among a rule's recorded sets.
"""

from __future__ import annotations

import json
import logging
import math
import os
import random
import tempfile
from dataclasses import asdict, dataclass, field

from .constructions import (
    ExDefinitionSet,
    MergeConflictError,
    instantiate,
    minimal_set,
    point_names,
)
from .engine import ProofState, saturate
from .language import Repository, Statement
from .numeric import DegenerateError, construct_scene, derive_seed
from .proofs import enumerate_conclusions, fact_costs

log = logging.getLogger(__name__)

FORMAT = "k2exd/1"

# probability that a dependency slot reuses an existing point instead of
# introducing a fresh free one
_REUSE_P = 0.6

# relative sampling weights per definition; names missing here weigh 1.
# Tuned so the rule-usage profile of random small scenes is not swamped by
# any single construction family.
_DEF_WEIGHTS = {
    "free": 1,
    "segment": 1,
    "triangle": 2,
    "iso_triangle": 1,
    "right_triangle": 2,
    "midpoint": 1,
    "midline": 0.5,
    "reflect": 1,
    "on_line": 1,
    "on_circle": 1,
    "on_bline": 0.5,
    "equidistant": 0.5,
    "circumcenter": 0.5,
    "on_circum": 1,
    "foot": 3,
    "mirror": 4,
    "parallelogram": 3,
    "chords": 3,
    "parallel": 2,
    "perp_at": 3,
    "line_line_meet": 1,
    "line_circle_meet": 1,
    "circle_circle_meet": 0.5,
    "on_line_perp": 2,
}


class UnknownKP(KeyError):
    """Lookup of a rule id the table has never seen."""


class EmptyEntry(Exception):
    """The rule id is known but holds no construction sets."""


class TableFormatError(ValueError):
    """A table file is malformed or carries an unsupported format tag."""


@dataclass(frozen=True)
class TableBuildConfig:
    """Sampling budget and engine limits for one table build."""

    iterations: int
    n_max: int = 2
    seed: int = 0
    max_rounds: int = 8
    max_facts: int = 600
    scene_attempts: int = 16
    triangle_sharing: bool = True

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")


@dataclass
class MappingTable:
    """Rule id -> construction sets known to exercise that rule."""

    entries: dict[str, list[ExDefinitionSet]] = field(default_factory=dict)
    build_config: TableBuildConfig | None = None
    outcomes: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._seen: dict[str, set[str]] = {
            kp: {_exdef_key(x) for x in sets} for kp, sets in self.entries.items()
        }

    @property
    def stats(self) -> dict[str, int]:
        """Number of stored sets per rule id."""
        return {kp: len(sets) for kp, sets in self.entries.items()}

    def insert(self, kp: str, exd: ExDefinitionSet) -> bool:
        """Store *exd* under *kp* unless an identical set is already there."""
        key = _exdef_key(exd)
        seen = self._seen.setdefault(kp, set())
        if key in seen:
            return False
        seen.add(key)
        self.entries.setdefault(kp, []).append(exd)
        return True

    def _bump(self, outcome: str) -> None:
        self.outcomes[outcome] = self.outcomes.get(outcome, 0) + 1


def _exdef_key(exd: ExDefinitionSet) -> str:
    return json.dumps(exd.serialize(), sort_keys=True)


# ---------------------------------------------------------------------------
# sampling


def _sample_construction(
    repo: Repository, rng: random.Random, n_max: int
) -> ExDefinitionSet:
    """Draw 1..n_max definitions and close them over their dependencies.

    Definitions are drawn with _DEF_WEIGHTS; dependency points reuse an
    already-introduced point with probability _REUSE_P (when one exists) and
    fall back to a fresh free point, so every sampled sequence is
    self-contained.
    """
    names = point_names()
    free = repo.definition("free")
    weights = [_DEF_WEIGHTS.get(d.name, 1) for d in repo.defs]
    entries = []
    pool: list[str] = []
    for _ in range(rng.randint(1, n_max)):
        definition = rng.choices(repo.defs, weights)[0]
        concrete: dict[str, str] = {}
        candidates = list(pool)
        rng.shuffle(candidates)
        for dep in definition.deps:
            if candidates and rng.random() < _REUSE_P:
                concrete[dep] = candidates.pop()
            else:
                base = instantiate(free, [next(names)])
                entries.append(base)
                pool.extend(base.introduced)
                concrete[dep] = base.introduced[0]
        for p in definition.introduced:
            concrete[p] = next(names)
        entry = instantiate(definition, concrete)
        entries.append(entry)
        pool.extend(entry.introduced)
    return ExDefinitionSet(entries=entries)


def _rules_on_paths(state: ProofState) -> set[str]:
    """Catalog rules appearing on the extracted proof of any conclusion."""
    cost, chosen = fact_costs(state)
    catalog = set(state.repo.rule_by_id)
    used: set[str] = set()
    seen: set[Statement] = set()
    stack = list(enumerate_conclusions(state))
    while stack:
        stmt = stack.pop()
        if stmt in seen or stmt not in chosen:
            continue
        seen.add(stmt)
        d = chosen[stmt]
        if d.rule_id in catalog:
            used.add(d.rule_id)
        for ant in d.antecedents:
            fact = state.facts.get(ant)
            if fact is not None and fact.kind == "derived":
                stack.append(ant)
    return used


# ---------------------------------------------------------------------------
# building


def build_table(repo: Repository, config: TableBuildConfig) -> MappingTable:
    """Run the sampling loop and collect rule -> construction mappings.

    Deterministic for a fixed (repo, config): iteration i draws all its
    randomness from a seed derived as hash(config.seed, i), so extending the
    iteration budget only appends work.  Failed iterations (degenerate
    scenes, merge conflicts, engine limits) are skipped and tallied.
    """
    if config.n_max > len(repo.defs):
        raise ValueError("n_max exceeds the definition catalog size")
    table = MappingTable(build_config=config)
    for i in range(config.iterations):
        seed_i = derive_seed(config.seed, i)
        rng = random.Random(seed_i)
        try:
            exd = minimal_set([_sample_construction(repo, rng, config.n_max)])
        except MergeConflictError:
            table._bump("merge_conflict")
            continue
        if not exd.entries:
            table._bump("empty")
            continue
        try:
            scene = construct_scene(exd, seed_i, max_attempts=config.scene_attempts)
        except DegenerateError:
            table._bump("degenerate")
            continue
        state = saturate(
            exd,
            repo,
            scene,
            max_rounds=config.max_rounds,
            max_facts=config.max_facts,
            triangle_sharing=config.triangle_sharing,
        )
        if state.limit is not None:
            table._bump("limited")
            continue
        used = _rules_on_paths(state)
        if not used:
            table._bump("no_rules")
            continue
        table._bump("recorded")
        for kp in used:
            table.insert(kp, exd)
        if (i + 1) % 1000 == 0:
            log.info(
                "table build: %d/%d iterations, %d rules populated",
                i + 1,
                config.iterations,
                len(table.entries),
            )
    log.info(
        "table build done: %d rules, %d sets, outcomes=%s",
        len(table.entries),
        sum(len(v) for v in table.entries.values()),
        table.outcomes,
    )
    return table


def verify_table(
    table: MappingTable,
    repo: Repository,
    fraction: float = 0.05,
    seed: int = 0,
) -> list[tuple[str, int]]:
    """Re-check a random sample of entries; return the (kp, index) failures.

    A sampled entry passes when its construction still produces a scene and
    its rule id still sits on some conclusion's proof path.
    """
    pairs = [
        (kp, idx) for kp, sets in table.entries.items() for idx in range(len(sets))
    ]
    if not pairs:
        return []
    rng = random.Random(derive_seed(seed, "verify"))
    count = max(1, math.ceil(fraction * len(pairs)))
    sharing = table.build_config.triangle_sharing if table.build_config else True
    failures: list[tuple[str, int]] = []
    for kp, idx in sorted(rng.sample(pairs, min(count, len(pairs)))):
        exd = table.entries[kp][idx]
        try:
            scene = construct_scene(exd, derive_seed(seed, kp, idx))
        except DegenerateError:
            failures.append((kp, idx))
            continue
        state = saturate(exd, repo, scene, triangle_sharing=sharing)
        if kp not in _rules_on_paths(state):
            failures.append((kp, idx))
    if failures:
        log.warning("table verification failed for %d entries", len(failures))
    return failures


# ---------------------------------------------------------------------------
# lookup


def sample_exdefs(
    table: MappingTable, kp: str, rng_seed: int
) -> ExDefinitionSet:
    """Uniform draw among the sets stored for *kp*, deterministic per seed."""
    if kp not in table.entries:
        raise UnknownKP(kp)
    sets = table.entries[kp]
    if not sets:
        raise EmptyEntry(kp)
    return random.Random(rng_seed).choice(sets)


# ---------------------------------------------------------------------------
# persistence


def save_table(table: MappingTable, path: str | os.PathLike) -> None:
    """Write line-delimited JSON: one header record, then one record per set."""
    header: dict = {"format": FORMAT}
    if table.build_config is not None:
        header["build_config"] = asdict(table.build_config)
    if table.outcomes:
        header["outcomes"] = dict(sorted(table.outcomes.items()))
    lines = [json.dumps(header, sort_keys=True)]
    for kp in sorted(table.entries):
        for exd in table.entries[kp]:
            lines.append(json.dumps({"kp": kp, "exdef": exd.serialize()}))
    directory = os.path.dirname(os.fspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_table(path: str | os.PathLike, repo: Repository) -> MappingTable:
    """Read a table file written by save_table; validates format and records."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].strip():
        raise TableFormatError(f"{path}: missing header record")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise TableFormatError(f"{path}: malformed header: {exc}") from exc
    if header.get("format") != FORMAT:
        raise TableFormatError(
            f"{path}: unsupported format {header.get('format')!r}, want {FORMAT!r}"
        )
    config = None
    if "build_config" in header:
        config = TableBuildConfig(**header["build_config"])
    table = MappingTable(build_config=config)
    table.outcomes = {k: int(v) for k, v in header.get("outcomes", {}).items()}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            kp = record["kp"]
            exd = ExDefinitionSet.deserialize(record["exdef"], repo)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise TableFormatError(f"{path}: bad record on line {lineno}: {exc}") from exc
        table.insert(kp, exd)
    log.info("loaded table: %d rules, %d sets", len(table.entries), sum(table.stats.values()))
    return table
