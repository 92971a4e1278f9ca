"""Proof extraction from a saturated state.

A proof is a sequence of derivation steps ending at the requested fact,
where every step's antecedents are construction premises, numeric
guards, or consequents of earlier steps.  Extraction picks, per fact,
the cheapest known derivation (approximating subproof size), then prunes
steps that a structural replay shows to be unnecessary.
"""

from __future__ import annotations

from .engine import AR_ID, Derivation, ProofState
from .language import Statement, canonicalize, format_statement


class NotDerivedError(Exception):
    """The requested statement is a premise, or was never derived."""


class BrokenProofError(Exception):
    """A proof failed structural replay."""


def fact_costs(
    state: ProofState,
) -> tuple[dict[Statement, int], dict[Statement, Derivation]]:
    """Cheapest derivation per derived fact, by relaxation to fixpoint.

    The cost of a fact is 1 plus the summed costs of its derived
    antecedents (leaves are free); ties pick the earliest derivation.
    Costs strictly exceed those of the chosen antecedents, so following
    the choices can never loop.
    """
    cost: dict[Statement, int] = {}
    chosen: dict[Statement, Derivation] = {}
    derived = state.derived_facts()
    changed = True
    while changed:
        changed = False
        for fact in derived:
            for d in fact.derivations:
                w = 1
                usable = True
                for ant in d.antecedents:
                    af = state.facts.get(ant)
                    if af is None:
                        usable = False
                        break
                    if af.kind != "derived":
                        continue
                    ac = cost.get(ant)
                    if ac is None:
                        usable = False
                        break
                    w += ac
                if not usable:
                    continue
                cur = cost.get(fact.stmt)
                if (
                    cur is None
                    or w < cur
                    or (w == cur and d.index < chosen[fact.stmt].index)
                ):
                    cost[fact.stmt] = w
                    chosen[fact.stmt] = d
                    changed = True
    return cost, chosen


def _replays(
    state: ProofState, steps: list[Derivation], target: Statement
) -> bool:
    available = {s for s, f in state.facts.items() if f.kind != "derived"}
    for d in steps:
        if any(a not in available for a in d.antecedents):
            return False
        available.add(d.consequent)
    return target in available


def prune_steps(
    state: ProofState, steps: list[Derivation], target: Statement
) -> list[Derivation]:
    """Drop steps whose removal keeps the proof replayable."""
    target = canonicalize(target)
    steps = list(steps)
    changed = True
    while changed:
        changed = False
        for i in range(len(steps) - 1, -1, -1):
            cand = steps[:i] + steps[i + 1 :]
            if _replays(state, cand, target):
                steps = cand
                changed = True
                break
    if not _replays(state, steps, target):
        raise BrokenProofError(format_statement(target))
    return steps


def _extract(
    state: ProofState,
    cost: dict[Statement, int],
    chosen: dict[Statement, Derivation],
    target: Statement,
) -> list[Derivation]:
    picked: dict[Statement, Derivation] = {}
    need = [target]
    while need:
        s = need.pop()
        if s in picked:
            continue
        d = chosen[s]
        picked[s] = d
        for ant in d.antecedents:
            if state.facts[ant].kind == "derived" and ant not in picked:
                need.append(ant)
    return sorted(picked.values(), key=lambda d: (cost[d.consequent], d.index))


def traceback(
    state: ProofState,
    conclusion: Statement,
    prune: bool = True,
    improve: bool = True,
) -> list[Derivation]:
    """Proof steps for *conclusion*, in replayable order.

    With *improve*, the algebraic steps on the extracted path are offered
    back to the engine for cost-aware re-derivation (their first recorded
    certificates reflect insertion order, not economy); extraction repeats
    while that keeps paying off.
    """
    c = canonicalize(conclusion)
    fact = state.facts.get(c)
    if fact is None or fact.kind != "derived":
        raise NotDerivedError(format_statement(c))
    cost, chosen = fact_costs(state)
    if c not in cost:
        raise NotDerivedError(format_statement(c))
    steps = _extract(state, cost, chosen, c)
    if improve and state.improver is not None:
        for _ in range(4):
            by_depth = sorted(steps, key=lambda d: -cost[d.consequent])
            hits = [state.improve_derivation(d.consequent, cost) for d in by_depth]
            if not any(hits):
                break
            cost, chosen = fact_costs(state)
            steps = _extract(state, cost, chosen, c)
    if prune:
        steps = prune_steps(state, steps, c)
    elif not _replays(state, steps, c):
        raise BrokenProofError(format_statement(c))
    return steps


def enumerate_conclusions(
    state: ProofState, limit: int | None = None
) -> list[Statement]:
    """Derived facts worth asking about, deepest first.

    Single-source algebraic rewrites are skipped: restating one earlier
    fact in different terms makes a poor goal.
    """
    cost, _ = fact_costs(state)
    out: list[Statement] = []
    for fact in state.derived_facts():
        if fact.stmt not in cost:
            continue
        if all(
            d.rule_id == AR_ID and len(set(d.antecedents)) < 2
            for d in fact.derivations
        ):
            continue
        out.append(fact.stmt)
    out.sort(key=lambda s: (-cost[s], format_statement(s)))
    if limit is not None:
        return out[:limit]
    return out
