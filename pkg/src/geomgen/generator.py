"""Qualified problem generation on top of a mapping table.

A request names knowledge points, a difficulty band, and a seed.  Each
attempt samples one recorded construction per knowledge point, merges
them into a single minimal scene, saturates it, and walks the deepest
conclusions first; a candidate is kept only when its pruned proof
passes all four qualification checks.  The same :func:`check` is used
at generation time and when a stored problem is re-verified.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .constructions import ExDefinitionSet, MergeConflictError, minimal_set
from .engine import ProofState, saturate
from .language import Repository, Statement, canonicalize, format_statement
from .numeric import DegenerateError, NumericScene, construct_scene, derive_seed
from .proofs import (
    BrokenProofError,
    Derivation,
    NotDerivedError,
    enumerate_conclusions,
    fact_costs,
    traceback,
)
from .table import MappingTable, sample_exdefs

EASY = "easy"
MODERATE = "moderate"
DIFFICULT = "difficult"
BANDS = (EASY, MODERATE, DIFFICULT)

_RETRY_BUDGET = 32
_TRACEBACKS_PER_SCENE = 8


def classify_difficulty(step_count: int) -> str:
    """Band for a pruned proof: easy below 10 steps, moderate through 20,
    difficult beyond."""
    if step_count < 1:
        raise ValueError(f"step count must be positive, got {step_count}")
    if step_count < 10:
        return EASY
    if step_count <= 20:
        return MODERATE
    return DIFFICULT


@dataclass(frozen=True)
class GenerationRequest:
    knowledge_points: tuple[str, ...]
    difficulty: str = EASY
    seed: int = 0
    max_candidates: int = 4

    def __post_init__(self) -> None:
        kps = tuple(dict.fromkeys(self.knowledge_points))
        if not kps:
            raise ValueError("a request needs at least one knowledge point")
        object.__setattr__(self, "knowledge_points", kps)
        if self.difficulty not in BANDS:
            raise ValueError(f"unknown difficulty band {self.difficulty!r}")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be positive")


@dataclass(frozen=True)
class CheckVerdict:
    """Outcome of the four qualification constraints for one candidate."""

    shortest: bool
    kp_complete: bool
    clause_complete: bool
    difficulty_match: bool

    @property
    def passed(self) -> bool:
        return (
            self.shortest
            and self.kp_complete
            and self.clause_complete
            and self.difficulty_match
        )

    def failures(self) -> tuple[str, ...]:
        out = []
        if not self.shortest:
            out.append("not_shortest")
        if not self.kp_complete:
            out.append("missing_kp")
        if not self.clause_complete:
            out.append("unused_clause")
        if not self.difficulty_match:
            out.append("wrong_difficulty")
        return tuple(out)


@dataclass(frozen=True)
class QualifiedProblem:
    exd: ExDefinitionSet
    conclusion: Statement
    proof: tuple[Derivation, ...]
    used_rules: tuple[str, ...]
    scene: NumericScene
    request: GenerationRequest
    seed: int  # scene seed; replaying construct_scene(exd, seed) reproduces it

    @property
    def step_count(self) -> int:
        return len(self.proof)

    @property
    def difficulty(self) -> str:
        return classify_difficulty(self.step_count)


@dataclass
class GenerationResult:
    problems: list[QualifiedProblem]
    failures: dict[str, int] = field(default_factory=dict)
    attempts: int = 0


def check(
    candidate: QualifiedProblem, req: GenerationRequest, state: ProofState
) -> CheckVerdict:
    """Run the four qualification constraints against a saturated state.

    The state must be the one the candidate's proof was traced from (or an
    identically rebuilt one): the shortest-proof constraint compares the
    pruned step count with the cost-relaxation minimum over that state's
    derivation record.
    """
    costs, _ = fact_costs(state)
    minimum = costs.get(canonicalize(candidate.conclusion))
    shortest = minimum is not None and len(candidate.proof) == minimum

    used = {d.rule_id for d in candidate.proof}
    kp_complete = set(req.knowledge_points) <= used

    antecedents: set[Statement] = set()
    for step in candidate.proof:
        antecedents.update(step.antecedents)
    mentioned = {p for stmt in antecedents for p in stmt.args}
    clause_complete = True
    for entry in candidate.exd.entries:
        if set(entry.introduced) & mentioned:
            continue
        if any(emit in antecedents for emit in entry.emits):
            continue
        clause_complete = False
        break

    difficulty_match = (
        bool(candidate.proof)
        and classify_difficulty(len(candidate.proof)) == req.difficulty
    )
    return CheckVerdict(shortest, kp_complete, clause_complete, difficulty_match)


@dataclass(frozen=True)
class Reverification:
    """Outcome of independently re-deriving a problem from scratch."""

    replayed: bool  # the stored proof was reproduced step for step
    verdict: CheckVerdict | None
    problem: QualifiedProblem | None


def reverify(
    problem: QualifiedProblem,
    repo: Repository,
    *,
    max_rounds: int = 8,
    max_facts: int = 600,
    triangle_sharing: bool = True,
) -> Reverification:
    """Rebuild a problem's scene from its construction and seed, saturate
    from scratch, re-trace the stored conclusion, and re-run check().

    Generation accepts a candidate only through this same path, so the
    stored proof and the re-derived one coincide bit for bit on replay.
    """
    try:
        scene = construct_scene(problem.exd, problem.seed)
    except DegenerateError:
        return Reverification(False, None, None)
    state = saturate(
        problem.exd,
        repo,
        scene,
        max_rounds=max_rounds,
        max_facts=max_facts,
        triangle_sharing=triangle_sharing,
    )
    if state.limit is not None:
        return Reverification(False, None, None)
    try:
        steps = traceback(state, problem.conclusion)
    except (NotDerivedError, BrokenProofError):
        return Reverification(False, None, None)
    catalog = set(repo.rule_by_id)
    fresh = QualifiedProblem(
        exd=problem.exd,
        conclusion=problem.conclusion,
        proof=tuple(steps),
        used_rules=tuple(sorted({d.rule_id for d in steps} & catalog)),
        scene=scene,
        request=problem.request,
        seed=problem.seed,
    )
    verdict = check(fresh, problem.request, state)
    replayed = [
        (d.rule_id, d.antecedents, d.consequent) for d in steps
    ] == [(d.rule_id, d.antecedents, d.consequent) for d in problem.proof]
    return Reverification(replayed, verdict, fresh if verdict.passed else None)


def _path_rules(
    state: ProofState, chosen: dict[Statement, Derivation], concl: Statement
) -> set[str]:
    """Rule ids on the cheapest derivation path of *concl* (pre-traceback)."""
    out: set[str] = set()
    seen: set[Statement] = set()
    stack = [concl]
    while stack:
        stmt = stack.pop()
        if stmt in seen:
            continue
        seen.add(stmt)
        step = chosen.get(stmt)
        if step is None:
            continue
        out.add(step.rule_id)
        for ant in step.antecedents:
            if state.facts[ant].kind == "derived":
                stack.append(ant)
    return out


def _harvest(
    req: GenerationRequest,
    repo: Repository,
    state: ProofState,
    exd: ExDefinitionSet,
    scene: NumericScene,
    scene_seed: int,
    problems: list[QualifiedProblem],
    failures: Counter,
    limits: dict,
) -> None:
    """Trace and check conclusions of one scene, deepest first.

    A candidate that passes on the shared saturated state (where earlier
    tracebacks may have attached improved derivations) is accepted only
    after :func:`reverify` reproduces it on a state rebuilt from scratch;
    the stored problem is the rebuilt one.
    """
    catalog = set(repo.rule_by_id)
    wanted = set(req.knowledge_points)
    costs, chosen = fact_costs(state)
    traced = 0
    for concl in enumerate_conclusions(state):
        if len(problems) >= req.max_candidates:
            return
        if traced >= _TRACEBACKS_PER_SCENE:
            return
        # cheap pre-filters on the relaxation DAG before paying for a traceback
        if classify_difficulty(costs[concl]) != req.difficulty:
            failures["wrong_difficulty"] += 1
            continue
        if not wanted <= _path_rules(state, chosen, concl):
            failures["missing_kp"] += 1
            continue
        traced += 1
        steps = traceback(state, concl)
        candidate = QualifiedProblem(
            exd=exd,
            conclusion=concl,
            proof=tuple(steps),
            used_rules=tuple(sorted({d.rule_id for d in steps} & catalog)),
            scene=scene,
            request=req,
            seed=scene_seed,
        )
        verdict = check(candidate, req, state)
        if not verdict.passed:
            for name in verdict.failures():
                failures[name] += 1
            continue
        fresh = reverify(candidate, repo, **limits)
        if fresh.problem is not None:
            problems.append(fresh.problem)
        else:
            failures["unstable"] += 1


def generate(
    req: GenerationRequest, table: MappingTable, repo: Repository
) -> GenerationResult:
    """Produce up to ``req.max_candidates`` qualified problems.

    Raises UnknownKP / EmptyEntry when a requested knowledge point has no
    recorded constructions.  Returns normally (possibly with an empty
    problem list) when sampling simply fails to qualify; the per-constraint
    failure counts say why.
    """
    cfg = table.build_config
    limits = {
        "max_rounds": cfg.max_rounds if cfg else 8,
        "max_facts": cfg.max_facts if cfg else 600,
        "triangle_sharing": cfg.triangle_sharing if cfg else True,
    }

    problems: list[QualifiedProblem] = []
    failures: Counter = Counter()
    attempts = 0
    for attempt in range(_RETRY_BUDGET):
        if len(problems) >= req.max_candidates:
            break
        attempts = attempt + 1
        seed_a = derive_seed(req.seed, attempt)
        parts = [
            sample_exdefs(table, kp, derive_seed(seed_a, kp))
            for kp in req.knowledge_points
        ]
        try:
            exd = minimal_set(parts)
        except MergeConflictError:
            failures["merge_conflict"] += 1
            continue
        try:
            scene = construct_scene(exd, seed_a)
        except DegenerateError:
            failures["degenerate"] += 1
            continue
        state = saturate(exd, repo, scene, **limits)
        if state.limit is not None:
            failures["engine_limit"] += 1
            continue
        _harvest(req, repo, state, exd, scene, seed_a, problems, failures, limits)
    return GenerationResult(problems, dict(failures), attempts)


def problem_json(problem: QualifiedProblem) -> dict:
    """JSON-ready mapping with a stable key order."""
    req = problem.request
    return {
        "request": {
            "knowledge_points": list(req.knowledge_points),
            "difficulty": req.difficulty,
            "seed": req.seed,
            "max_candidates": req.max_candidates,
        },
        "exdefs": problem.exd.serialize(),
        "clauses_formal": [format_statement(s) for s in problem.exd.all_statements()],
        "question_formal": format_statement(problem.conclusion),
        "proof_steps": [
            {
                "rule": step.rule_id,
                "antecedents": [format_statement(a) for a in step.antecedents],
                "derived": format_statement(step.consequent),
            }
            for step in problem.proof
        ],
        "used_rules": list(problem.used_rules),
        "step_count": problem.step_count,
        "difficulty": problem.difficulty,
        "seed": problem.seed,
    }
