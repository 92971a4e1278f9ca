"""Forward saturation over a constructed scene.

Rounds of rule matching (each rule from the catalog, plus a dedicated
matcher for triangle similarity/congruence rules) alternate with
algebraic emission (facts that follow linearly from the angle, ratio and
congruence systems) until nothing new appears or a budget runs out.

Every admitted fact must hold numerically in the sampled scene; the
engine is sound relative to that diagram.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field

from .algebra import AngleSystem, CongClosure, RatioSystem
from .constructions import ExDefinitionSet
from .language import (
    EQUATION_PREDICATES,
    NUMERIC_GUARDS,
    TRIANGLE_PREDICATES,
    KnowledgeRule,
    Repository,
    Statement,
    canonicalize,
)
from .numeric import (
    NumericScene,
    angle_gap,
    check_numeric,
    construct_scene,
    direction_angle,
    dist,
)

log = logging.getLogger(__name__)

AR_ID = "AR"
EXPAND_ID = "EXPAND"

_FILTER_TOL = 1e-7
_EMIT_CAP = 64
_TRIANGLE_PAIR_CAP = 200
_CIRCLE_CAP = 16
_ENUM_LIMIT = 2  # max unbound variables enumerated for equation premises

# statements that contribute rows to the angle / ratio systems
_ANGLE_PREDS = ("coll", "para", "perp", "eqangle", "eqangle6")
_RATIO_PREDS = ("cong", "eqratio", "eqratio6", "midp", "circle")

# derivation-improvement search bounds
_IMPROVE_POOL = 24
_IMPROVE_POPS = 4000
_IMPROVE_TESTS = 400


def _pair(p: str, q: str) -> tuple[str, str]:
    return (p, q) if p <= q else (q, p)


def _is_tautology(stmt: Statement) -> bool:
    """True when *stmt* holds by symmetry alone (e.g. ``cong a b a b``).

    Repeated points in a triangle-pair binding can instantiate a premise
    whose two sides are literally the same quantity; such premises carry
    no geometric content and should not appear as proof antecedents.
    """
    if stmt.pred in ("para", "eqangle", "eqangle6"):
        system = AngleSystem()
    elif stmt.pred in ("cong", "eqratio", "eqratio6"):
        system = RatioSystem()
    else:
        return False
    c = canonicalize(stmt)
    if system.residual_vars(c):
        return False
    return system.query(c) is not None


@dataclass(frozen=True)
class Derivation:
    """One way a fact was obtained."""

    index: int
    rule_id: str  # catalog id, AR_ID or EXPAND_ID
    antecedents: tuple[Statement, ...]
    consequent: Statement


@dataclass
class Fact:
    stmt: Statement  # canonical form
    index: int
    kind: str  # "premise" | "guard" | "derived"
    derivations: list[Derivation] = field(default_factory=list)
    _variants: list[tuple[str, ...]] | None = None

    @property
    def variants(self) -> list[tuple[str, ...]]:
        """Argument tuples equivalent to this fact's, cached."""
        if self._variants is None:
            self._variants = self.stmt.variants()
        return self._variants


@dataclass
class ProofState:
    """Everything the saturation produced, plus its inputs."""

    exdefs: ExDefinitionSet
    scene: NumericScene
    repo: Repository
    facts: dict[Statement, Fact]
    premises: tuple[Statement, ...]
    guards: tuple[Statement, ...]
    complete: bool
    limit: str | None
    rounds: int
    # hook kept by the saturator: try to record a cheaper algebraic
    # derivation for a fact, given current per-fact proof costs
    improver: object = field(default=None, repr=False, compare=False)

    def improve_derivation(self, stmt: Statement, costs: dict) -> bool:
        if self.improver is None:
            return False
        return self.improver(stmt, costs)

    def fact(self, stmt: Statement) -> Fact | None:
        return self.facts.get(canonicalize(stmt))

    def has(self, stmt: Statement) -> bool:
        return canonicalize(stmt) in self.facts

    def derived_facts(self) -> list[Fact]:
        return [f for f in self.facts.values() if f.kind == "derived"]


class _Saturator:
    def __init__(
        self,
        exdefs: ExDefinitionSet,
        scene: NumericScene,
        repo: Repository,
        max_rounds: int,
        max_facts: int,
        triangle_sharing: bool = False,
    ) -> None:
        self.exdefs = exdefs
        self.scene = scene
        self.repo = repo
        self.max_rounds = max_rounds
        self.max_facts = max_facts
        self.triangle_sharing = triangle_sharing
        self.pos = scene.positions
        self.points = sorted(self.pos)
        self.facts: dict[Statement, Fact] = {}
        self.by_pred: dict[str, list[Fact]] = {}
        self.angles = AngleSystem()
        self.ratios = RatioSystem()
        self.closure = CongClosure()
        self.limit: str | None = None
        self._fact_counter = 0
        self._deriv_counter = 0
        self._fired: set[tuple] = set()
        self._new_facts = 0
        self.triangle_rules = [
            r for r in repo.rules if r.conclusion.pred in TRIANGLE_PREDICATES
        ]

    # -- fact admission ----------------------------------------------------

    def _attach(self, fact: Fact, rule_id: str, antecedents: tuple[Statement, ...]) -> bool:
        for d in fact.derivations:
            if d.rule_id == rule_id and d.antecedents == antecedents:
                return False
        fact.derivations.append(
            Derivation(self._deriv_counter, rule_id, antecedents, fact.stmt)
        )
        self._deriv_counter += 1
        return True

    def add(
        self,
        stmt: Statement,
        *,
        rule_id: str | None = None,
        antecedents: tuple[Statement, ...] = (),
        kind: str = "derived",
    ) -> Fact | None:
        c = canonicalize(stmt)
        fact = self.facts.get(c)
        if fact is not None:
            if rule_id is not None and fact.kind == "derived":
                self._attach(fact, rule_id, antecedents)
            return fact
        if self.limit is not None:
            return None
        if len(self.facts) >= self.max_facts:
            self.limit = "facts"
            return None
        if kind == "guard" or c.pred in NUMERIC_GUARDS:
            ok = check_numeric(c, self.pos)  # margin applies to guard preds
            kind = "guard" if c.pred in NUMERIC_GUARDS else kind
        else:
            ok = check_numeric(c, self.pos)
        if not ok:
            return None
        fact = Fact(c, self._fact_counter, kind)
        self._fact_counter += 1
        self.facts[c] = fact
        self.by_pred.setdefault(c.pred, []).append(fact)
        if kind == "derived":
            self._attach(fact, rule_id or AR_ID, antecedents)
        self._new_facts += 1
        self._feed_algebra(fact)
        if kind == "derived":
            # premise-kind facts carry their definitional consequences as
            # sibling emissions already
            self._expand(fact)
        return fact

    def _feed_algebra(self, fact: Fact) -> None:
        s = fact.stmt
        pred = s.pred
        if pred in ("coll", "para", "perp", "eqangle", "eqangle6"):
            self.angles.add(s, s)
        if pred in ("cong", "eqratio", "eqratio6", "midp", "circle"):
            self.ratios.add(s, s)
        if pred == "cong":
            a, b, c, d = s.args
            self.closure.union(_pair(a, b), _pair(c, d), s)
        elif pred == "circle":
            o, a, b, c = s.args
            self.closure.union(_pair(o, a), _pair(o, b), s)
            self.closure.union(_pair(o, b), _pair(o, c), s)

    def _expand(self, fact: Fact) -> None:
        """Immediate consequences that are part of a fact's meaning."""
        s = fact.stmt
        out: list[Statement] = []
        if s.pred == "midp":
            m, a, b = s.args
            out = [Statement("coll", (m, a, b)), Statement("cong", (m, a, m, b))]
        elif s.pred in TRIANGLE_PREDICATES:
            a, b, c, p, q, r = s.args
            rotations = (
                (a, b, c, p, q, r),
                (b, c, a, q, r, p),
                (c, a, b, r, p, q),
            )
            for x, y, z, u, v, w in rotations:
                if s.pred in ("simtri", "contri"):
                    out.append(Statement("eqangle6", (x, y, x, z, u, v, u, w)))
                elif s.pred in ("simtri2", "contri2"):
                    out.append(Statement("eqangle6", (x, y, x, z, u, w, u, v)))
                if s.pred in ("simtri", "simtri2", "simtriStar"):
                    out.append(Statement("eqratio6", (x, y, x, z, u, v, u, w)))
                else:
                    out.append(Statement("cong", (x, y, u, v)))
        for stmt in out:
            self.add(stmt, rule_id=EXPAND_ID, antecedents=(s,))

    # -- oracle ------------------------------------------------------------

    def _sorted_sources(self, sources) -> tuple[Statement, ...]:
        return tuple(sorted(sources, key=lambda s: self.facts[s].index))

    @staticmethod
    def _scratch_query(stmt: Statement, basis) -> frozenset | None:
        """Query *stmt* against fresh systems holding only *basis* rows."""
        angles = AngleSystem()
        ratios = RatioSystem()
        for s in basis:
            if s.pred in _ANGLE_PREDS:
                angles.add(s, s)
            if s.pred in _RATIO_PREDS:
                ratios.add(s, s)
        if stmt.pred in ("para", "perp", "eqangle", "eqangle6"):
            return angles.query(stmt)
        if stmt.pred in ("cong", "eqratio", "eqratio6"):
            return ratios.query(stmt)
        return None

    @classmethod
    def _derivable_from(cls, stmt: Statement, sources) -> bool:
        return cls._scratch_query(stmt, sources) is not None

    def _minimize_sources(self, stmt: Statement, sources: frozenset) -> frozenset:
        """Elimination certificates routinely carry bystander rows; drop
        every source the statement can still be re-derived without."""
        if len(sources) <= 1:
            return sources
        kept = self._sorted_sources(sources)
        changed = True
        while changed:
            changed = False
            for i in range(len(kept) - 1, -1, -1):
                cand = kept[:i] + kept[i + 1 :]
                if self._derivable_from(stmt, cand):
                    kept = cand
                    changed = True
                    break
        return frozenset(kept)

    def improve(self, stmt: Statement, costs: dict) -> bool:
        """Look for a cheaper algebraic derivation of an existing fact.

        The certificate recorded at first derivation reflects insertion
        order, not proof economy.  Given the caller's current per-fact
        step costs, search the strictly-cheaper facts for a least-cost
        subset whose rows re-derive the statement, and record the result
        as an extra derivation when it undercuts the standing cost.
        """
        c = canonicalize(stmt)
        fact = self.facts.get(c)
        if fact is None or fact.kind != "derived":
            return False
        cur = costs.get(c)
        if cur is None or cur <= 1:
            return False  # already derived from premises alone
        if c.pred in ("para", "perp", "eqangle", "eqangle6"):
            row_preds: tuple[str, ...] = _ANGLE_PREDS
            system = AngleSystem
        elif c.pred in ("cong", "eqratio", "eqratio6"):
            row_preds = _RATIO_PREDS
            system = RatioSystem
        else:
            return False
        premises = [
            s
            for s, f in self.facts.items()
            if f.kind != "derived" and s.pred in row_preds
        ]
        base = system()
        for s in premises:
            base.add(s, s)
        goal = base.residual_vars(c)
        if not goal:
            srcs = base.query(c)
            if srcs is None:
                return False
            return self._attach(fact, AR_ID, self._sorted_sources(frozenset(srcs)))
        budget = cur - 2  # 1 + summed member costs must undercut cur
        pool = [
            s
            for s, f in self.facts.items()
            if s != c
            and f.kind == "derived"
            and s.pred in row_preds
            and costs.get(s, cur) <= budget
        ]
        pool.sort(key=lambda s: (costs[s], self.facts[s].index))
        del pool[_IMPROVE_POOL:]
        vars_of = {s: base.residual_vars(s) for s in pool}
        pool = [s for s in pool if vars_of[s]]  # premise-implied rows help nobody
        # union of row variables available from position i onward
        suffix: list[frozenset] = [frozenset()] * (len(pool) + 1)
        for i in range(len(pool) - 1, -1, -1):
            suffix[i] = suffix[i + 1] | vars_of[pool[i]]
        # uniform-cost search over index-ordered subsets; a subset is only
        # worth an elimination once its rows touch every goal variable
        found: frozenset | None = None
        ticket = itertools.count()
        heap: list[tuple] = [(0, next(ticket), 0, (), frozenset())]
        pops = 0
        tests = 0
        while heap:
            total, _, start, members, cover = heapq.heappop(heap)
            pops += 1
            if pops > _IMPROVE_POPS or tests > _IMPROVE_TESTS:
                break
            if members and goal <= cover:
                tests += 1
                srcs = self._scratch_query(c, list(members) + premises)
                if srcs is not None:
                    found = srcs
                    break
            for i in range(start, len(pool)):
                s = pool[i]
                t2 = total + costs[s]
                if t2 > budget:
                    continue
                widened = cover | vars_of[s]
                if not goal <= widened | suffix[i + 1]:
                    continue
                heapq.heappush(
                    heap, (t2, next(ticket), i + 1, members + (s,), widened)
                )
        if found is None:
            # search gave out; take one elimination certificate over the
            # whole pool and thin it greedily, costliest member first
            srcs = self._scratch_query(c, pool + premises)
            if srcs is None:
                return False
            kept = sorted(
                srcs,
                key=lambda s: (costs.get(s, 0), self.facts[s].index),
                reverse=True,
            )
            changed = True
            while changed:
                changed = False
                for i in range(len(kept)):
                    cand = kept[:i] + kept[i + 1 :]
                    if self._derivable_from(c, cand):
                        kept = cand
                        changed = True
                        break
            found = frozenset(kept)
        new_cost = 1 + sum(costs.get(s, 0) for s in found)
        if new_cost >= cur:
            return False
        return self._attach(fact, AR_ID, self._sorted_sources(found))

    def oracle(self, stmt: Statement) -> Fact | None:
        """Is *stmt* available: stored, a true numeric guard, or derivable
        by the algebra systems (in which case it becomes a fact)."""
        c = canonicalize(stmt)
        fact = self.facts.get(c)
        if fact is not None:
            return fact
        if c.pred in NUMERIC_GUARDS:
            if check_numeric(c, self.pos):
                return self.add(c, kind="guard")
            return None
        if not check_numeric(c, self.pos):
            return None
        sources: frozenset | None = None
        if c.pred == "cong":
            a, b, x, y = c.args
            if self.closure.same(_pair(a, b), _pair(x, y)):
                sources = frozenset(self.closure.explain(_pair(a, b), _pair(x, y)))
        if sources is None and c.pred in ("para", "perp", "eqangle", "eqangle6"):
            sources = self.angles.query(c)
        if sources is None and c.pred in ("cong", "eqratio", "eqratio6"):
            sources = self.ratios.query(c)
        if sources is None:
            return None
        sources = self._minimize_sources(c, sources)
        return self.add(c, rule_id=AR_ID, antecedents=self._sorted_sources(sources))

    # -- generic rule matching ----------------------------------------------

    def _unify(
        self,
        binding: dict[str, str],
        pattern_args: tuple[str, ...],
        points: tuple[str, ...],
    ) -> dict[str, str] | None:
        nb = binding
        copied = False
        for var, pt in zip(pattern_args, points):
            cur = nb.get(var)
            if cur == pt:
                continue
            if cur is not None:
                return None
            if pt in nb.values():
                return None  # distinct variables name distinct points
            if not copied:
                nb = dict(nb)
                copied = True
            nb[var] = pt
        return nb

    def _pick_premise(
        self, remaining: list[tuple[int, Statement]], binding: dict[str, str]
    ) -> int:
        best = 0
        best_key = None
        for i, (pos_idx, pat) in enumerate(remaining):
            unbound = len({v for v in pat.args if v not in binding})
            guard = 1 if pat.pred in NUMERIC_GUARDS else 0
            key = (guard, unbound, pos_idx)
            if best_key is None or key < best_key:
                best_key = key
                best = i
        return best

    def _candidates(
        self, pattern: Statement, binding: dict[str, str], snap: dict[str, list[Fact]]
    ):
        """Yield (new_binding, fact) pairs satisfying one premise."""
        seen: set[tuple] = set()
        if pattern.pred not in snap:
            snap[pattern.pred] = list(self.by_pred.get(pattern.pred, ()))
        for fact in snap[pattern.pred]:
            for variant_args in fact.variants:
                nb = self._unify(binding, pattern.args, variant_args)
                if nb is not None:
                    key = tuple(sorted(nb.items()))
                    if key not in seen:
                        seen.add(key)
                        yield nb, fact
        unbound = sorted({v for v in pattern.args if v not in binding})
        if (
            pattern.pred in EQUATION_PREDICATES
            and 1 <= len(unbound) <= _ENUM_LIMIT
        ):
            taken = set(binding.values())
            free = [p for p in self.points if p not in taken]
            for combo in itertools.permutations(free, len(unbound)):
                nb = dict(binding)
                nb.update(zip(unbound, combo))
                key = tuple(sorted(nb.items()))
                if key in seen:
                    continue
                stmt = pattern.rename(nb)
                if not check_numeric(stmt, self.pos, tol=_FILTER_TOL):
                    continue
                fact = self.oracle(stmt)
                if fact is not None:
                    seen.add(key)
                    yield nb, fact

    def _search(
        self,
        rule: KnowledgeRule,
        remaining: list[tuple[int, Statement]],
        binding: dict[str, str],
        matched: list[tuple[int, Fact]],
        snap: dict[str, list[Fact]],
    ) -> None:
        if self.limit is not None:
            return
        if not remaining:
            self._emit_rule(rule, binding, matched)
            return
        i = self._pick_premise(remaining, binding)
        pos_idx, pattern = remaining[i]
        rest = remaining[:i] + remaining[i + 1 :]
        unbound = [v for v in pattern.args if v not in binding]
        if not unbound:
            fact = self.oracle(pattern.rename(binding))
            if fact is not None:
                self._search(rule, rest, binding, matched + [(pos_idx, fact)], snap)
            return
        if pattern.pred in NUMERIC_GUARDS:
            return  # guards never bind new points
        for nb, fact in self._candidates(pattern, binding, snap):
            self._search(rule, rest, nb, matched + [(pos_idx, fact)], snap)

    def _emit_rule(
        self, rule: KnowledgeRule, binding: dict[str, str], matched: list[tuple[int, Fact]]
    ) -> None:
        concl = canonicalize(rule.conclusion.rename(binding))
        ants = tuple(f.stmt for _, f in sorted(matched, key=lambda t: t[0]))
        key = (rule.id, ants, concl)
        if key in self._fired:
            return
        self._fired.add(key)
        if concl in self.facts and self.facts[concl].kind != "derived":
            return  # already a premise/guard; nothing to derive
        self.add(concl, rule_id=rule.id, antecedents=ants)

    def _dd_pass(self) -> None:
        for rule in self.repo.rules:
            if self.limit is not None:
                return
            snap: dict[str, list[Fact]] = {}
            self._search(
                rule, list(enumerate(rule.premises)), {}, [], snap
            )
        self._triangle_pass()

    # -- dedicated triangle matcher ------------------------------------------

    def _noncollinear_triples(self) -> list[tuple[str, str, str]]:
        out = []
        for t in itertools.combinations(self.points, 3):
            if check_numeric(Statement("ncoll", t), self.pos):
                out.append(t)
        return out

    def _shape_key(self, t: tuple[str, str, str]) -> tuple[int, int]:
        sides = sorted(
            (
                dist(self.pos[t[0]], self.pos[t[1]]),
                dist(self.pos[t[1]], self.pos[t[2]]),
                dist(self.pos[t[2]], self.pos[t[0]]),
            )
        )
        return (round(sides[0] / sides[2] * 1e6), round(sides[1] / sides[2] * 1e6))

    def _similar_perms(
        self, t1: tuple[str, str, str], t2: tuple[str, str, str]
    ) -> list[tuple[str, str, str]]:
        """Orderings of t2 numerically similar to t1 (fixed order)."""
        out = []
        for perm in itertools.permutations(t2):
            stmt = Statement("simtriStar", t1 + perm)
            if check_numeric(stmt, self.pos, tol=_FILTER_TOL):
                out.append(perm)
        return out

    def _triangle_pass(self) -> None:
        if not self.triangle_rules:
            return
        buckets: dict[tuple[int, int], list[tuple[str, str, str]]] = {}
        for t in self._noncollinear_triples():
            buckets.setdefault(self._shape_key(t), []).append(t)
        ordered = [buckets[key] for key in sorted(buckets)]
        pairs = 0
        # with sharing enabled, triangles may overlap (a medial triangle and
        # its parent, say); disjoint pairs go first so the cap cannot starve
        # them.  Overlap matching floods radius-rich scenes with congruent
        # triangles, hence the opt-in.
        sweeps = (False, True) if self.triangle_sharing else (False,)
        for allow_shared in sweeps:
            for group in ordered:
                for t1, t2 in itertools.combinations(group, 2):
                    if bool(set(t1) & set(t2)) != allow_shared:
                        continue
                    pairs += 1
                    if pairs > _TRIANGLE_PAIR_CAP:
                        return
                    for perm in self._similar_perms(t1, t2):
                        self._triangle_instance(t1, perm)

    def _triangle_instance(self, t1: tuple[str, str, str], t2: tuple[str, str, str]) -> None:
        for rule in self.triangle_rules:
            if self.limit is not None:
                return
            concl_vars = rule.conclusion.args
            for rot in itertools.permutations(range(3)):
                binding = {}
                ok = True
                for vi, pi in zip(concl_vars[:3], rot):
                    binding[vi] = t1[pi]
                for vi, pi in zip(concl_vars[3:], rot):
                    binding[vi] = t2[pi]
                concl = rule.conclusion.rename(binding)
                if not check_numeric(concl, self.pos, tol=_FILTER_TOL):
                    continue
                matched: list[tuple[int, Fact]] = []
                for idx, premise in enumerate(rule.premises):
                    stmt = premise.rename(binding)
                    if _is_tautology(stmt):
                        continue
                    if not check_numeric(stmt, self.pos, tol=_FILTER_TOL):
                        ok = False
                        break
                    fact = self.oracle(stmt)
                    if fact is None:
                        ok = False
                        break
                    matched.append((idx, fact))
                if ok:
                    self._emit_rule(rule, binding, matched)
                    break

    # -- algebraic emission ---------------------------------------------------

    def _mentioned_dir_segs(self) -> list[tuple[str, str]]:
        segs: set[tuple[str, str]] = set()
        for pred in ("coll", "midp"):
            for fact in self.by_pred.get(pred, ()):
                a = fact.stmt.args
                segs.update((_pair(a[0], a[1]), _pair(a[0], a[2]), _pair(a[1], a[2])))
        for pred in ("para", "perp", "eqangle", "eqangle6"):
            for fact in self.by_pred.get(pred, ()):
                a = fact.stmt.args
                segs.update(_pair(a[i], a[i + 1]) for i in range(0, len(a), 2))
        return sorted(segs)

    def _mentioned_len_segs(self) -> list[tuple[str, str]]:
        segs: set[tuple[str, str]] = set()
        for pred in ("cong", "eqratio", "eqratio6"):
            for fact in self.by_pred.get(pred, ()):
                a = fact.stmt.args
                segs.update(_pair(a[i], a[i + 1]) for i in range(0, len(a), 2))
        for fact in self.by_pred.get("midp", ()):
            m, a, b = fact.stmt.args
            segs.update((_pair(m, a), _pair(m, b), _pair(a, b)))
        for fact in self.by_pred.get("circle", ()):
            o, a, b, c = fact.stmt.args
            segs.update((_pair(o, a), _pair(o, b), _pair(o, c)))
        return sorted(segs)

    def _on_same_line(self, rep: tuple[str, str], seg: tuple[str, str]) -> bool:
        for p in seg:
            if p in rep:
                continue
            if not check_numeric(
                Statement("coll", (rep[0], rep[1], p)), self.pos, tol=_FILTER_TOL
            ):
                return False
        return True

    def _line_reps(self, segs: list[tuple[str, str]]) -> list[tuple[str, str]]:
        reps: list[tuple[str, str]] = []
        for seg in segs:
            for rep in reps:
                if self._on_same_line(rep, seg):
                    break
            else:
                reps.append(seg)
        return reps

    def _emit(self, stmt: Statement, sources: frozenset) -> bool:
        if stmt.pred != "circle":
            sources = self._minimize_sources(stmt, sources)
        if len(sources) < 2:
            return False  # single-source rewrites add nothing worth stating
        return (
            self.add(
                stmt, rule_id=AR_ID, antecedents=self._sorted_sources(sources)
            )
            is not None
        )

    def _emit_para_perp(self, reps: list[tuple[str, str]]) -> None:
        angles = {r: direction_angle(self.pos[r[0]], self.pos[r[1]]) for r in reps}
        for r1, r2 in itertools.combinations(reps, 2):
            gap = angle_gap(angles[r1] - angles[r2])
            if gap <= _FILTER_TOL:
                if len({*r1, *r2}) != 4:
                    continue  # parallel through a shared point is one line
                pred = "para"
            elif gap >= math.pi / 2 - _FILTER_TOL:
                pred = "perp"
            else:
                continue
            c = canonicalize(Statement(pred, r1 + r2))
            if c in self.facts:
                continue
            sources = self.angles.query(c)
            if sources is not None:
                self._emit(c, sources)

    def _emit_eqangle(self, reps: list[tuple[str, str]]) -> None:
        angles = {r: direction_angle(self.pos[r[0]], self.pos[r[1]]) for r in reps}
        diffs: list[tuple[float, tuple[str, str], tuple[str, str]]] = []
        for r1, r2 in itertools.permutations(reps, 2):
            diffs.append(((angles[r2] - angles[r1]) % math.pi, r1, r2))
        diffs.sort(key=lambda d: (d[0], d[1], d[2]))
        emitted = 0
        n = len(diffs)
        for i in range(n):
            j = i + 1
            while j < n and diffs[j][0] - diffs[i][0] <= _FILTER_TOL:
                d1, d2 = diffs[i], diffs[j]
                j += 1
                if {d1[1], d1[2]} == {d2[1], d2[2]}:
                    continue
                stmt = Statement("eqangle", d1[1] + d1[2] + d2[1] + d2[2])
                c = canonicalize(stmt)
                if c in self.facts or not check_numeric(c, self.pos):
                    continue
                sources = self.angles.query(c)
                if sources is not None and self._emit(c, sources):
                    emitted += 1
                    if emitted >= _EMIT_CAP:
                        return

    def _emit_cong(self, segs: list[tuple[str, str]]) -> None:
        scale = self.scene.scale
        entries = sorted(
            ((dist(self.pos[s[0]], self.pos[s[1]]), s) for s in segs),
            key=lambda e: (e[0], e[1]),
        )
        emitted = 0
        n = len(entries)
        for i in range(n):
            j = i + 1
            while j < n and entries[j][0] - entries[i][0] <= _FILTER_TOL * scale:
                s1, s2 = entries[i][1], entries[j][1]
                j += 1
                c = canonicalize(Statement("cong", s1 + s2))
                if c in self.facts:
                    continue
                if self.closure.same(s1, s2):
                    sources = frozenset(self.closure.explain(s1, s2))
                else:
                    sources = self.ratios.query(c)
                if sources is not None and self._emit(c, sources):
                    emitted += 1
                    if emitted >= _EMIT_CAP:
                        return

    def _emit_eqratio(self, segs: list[tuple[str, str]]) -> None:
        lengths = {s: dist(self.pos[s[0]], self.pos[s[1]]) for s in segs}
        ratios: list[tuple[float, tuple[str, str], tuple[str, str]]] = []
        for s1, s2 in itertools.permutations(segs, 2):
            r = math.log(lengths[s1] / lengths[s2])
            if abs(r) <= _FILTER_TOL:
                continue  # unit ratios belong to the congruence pass
            ratios.append((r, s1, s2))
        ratios.sort(key=lambda e: (e[0], e[1], e[2]))
        emitted = 0
        n = len(ratios)
        for i in range(n):
            j = i + 1
            while j < n and ratios[j][0] - ratios[i][0] <= _FILTER_TOL:
                e1, e2 = ratios[i], ratios[j]
                j += 1
                if e1[1] == e2[1] or e1[2] == e2[2]:
                    continue
                stmt = Statement("eqratio", e1[1] + e1[2] + e2[1] + e2[2])
                c = canonicalize(stmt)
                if c in self.facts or not check_numeric(c, self.pos):
                    continue
                sources = self.ratios.query(c)
                if sources is not None and self._emit(c, sources):
                    emitted += 1
                    if emitted >= _EMIT_CAP:
                        return

    def _emit_circle(self) -> None:
        emitted = 0
        for cls in self.closure.classes():
            by_center: dict[str, list[str]] = {}
            for p, q in cls:
                by_center.setdefault(p, []).append(q)
                by_center.setdefault(q, []).append(p)
            for o in sorted(by_center):
                others = sorted(set(by_center[o]))
                if len(others) < 3:
                    continue
                for combo in itertools.combinations(others, 3):
                    c = canonicalize(Statement("circle", (o,) + combo))
                    if c in self.facts:
                        continue
                    k = [_pair(o, p) for p in combo]
                    sources = frozenset(
                        self.closure.explain(k[0], k[1])
                        + self.closure.explain(k[1], k[2])
                    )
                    if self._emit(c, sources):
                        emitted += 1
                        if emitted >= _CIRCLE_CAP:
                            return

    def _ar_pass(self) -> None:
        reps = self._line_reps(self._mentioned_dir_segs())
        self._emit_para_perp(reps)
        self._emit_eqangle(reps)
        segs = self._mentioned_len_segs()
        self._emit_cong(segs)
        self._emit_eqratio(segs)
        self._emit_circle()

    # -- main loop -------------------------------------------------------------

    def run(self) -> ProofState:
        premises: list[Statement] = []
        for entry in self.exdefs.entries:
            for stmt in entry.emits:
                fact = self.add(stmt, kind="premise")
                if fact is not None and fact.stmt not in premises:
                    premises.append(fact.stmt)
        guards: list[Statement] = []
        for entry in self.exdefs.entries:
            for stmt in entry.guards:
                fact = self.add(stmt, kind="guard")
                if fact is not None and fact.stmt not in guards:
                    guards.append(fact.stmt)
        rounds = 0
        complete = False
        for rnd in range(self.max_rounds):
            rounds = rnd + 1
            self._new_facts = 0
            self._dd_pass()
            self._ar_pass()
            if self.limit is not None:
                break
            if self._new_facts == 0:
                complete = True
                break
        else:
            self.limit = "rounds"
        if self.limit is not None:
            complete = False
        log.debug(
            "saturation: %d facts, %d rounds, complete=%s",
            len(self.facts),
            rounds,
            complete,
        )
        return ProofState(
            exdefs=self.exdefs,
            scene=self.scene,
            repo=self.repo,
            facts=self.facts,
            premises=tuple(premises),
            guards=tuple(guards),
            complete=complete,
            limit=self.limit,
            rounds=rounds,
            improver=self.improve,
        )


def saturate(
    exdefs: ExDefinitionSet,
    repo: Repository,
    scene: NumericScene | None = None,
    *,
    seed: int = 0,
    max_rounds: int = 20,
    max_facts: int = 5000,
    triangle_sharing: bool = False,
) -> ProofState:
    """Construct (or reuse) a scene for *exdefs* and saturate it."""
    if scene is None:
        scene = construct_scene(exdefs, seed)
    sat = _Saturator(exdefs, scene, repo, max_rounds, max_facts, triangle_sharing)
    return sat.run()
