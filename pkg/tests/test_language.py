from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from geomgen.language import (
    ParseError,
    Statement,
    canonicalize,
    format_statement,
    parse_defs,
    parse_rules,
    parse_statement,
)


def test_parse_round_trip():
    stmt = parse_statement("eqangle a b c d e f g h")
    assert stmt.pred == "eqangle"
    assert stmt.args == ("a", "b", "c", "d", "e", "f", "g", "h")
    assert format_statement(stmt) == "eqangle a b c d e f g h"


def test_parse_rejects_unknown_predicate():
    with pytest.raises(ParseError):
        parse_statement("frobnicate a b")


def test_parse_rejects_wrong_arity():
    with pytest.raises(ParseError):
        Statement("cong", ("a", "b", "c"))


def test_points_uppercased_on_input():
    assert parse_statement("cong A b C d").args == ("a", "b", "c", "d")


def test_cong_symmetries():
    base = canonicalize(parse_statement("cong c d a b"))
    for text in ("cong a b c d", "cong b a c d", "cong c d b a", "cong d c b a"):
        assert canonicalize(parse_statement(text)) == base


def test_coll_is_order_free():
    assert canonicalize(parse_statement("coll c a b")) == parse_statement("coll a b c")


def test_midp_fixes_the_midpoint_slot():
    assert canonicalize(parse_statement("midp m b a")) == parse_statement("midp m a b")
    assert canonicalize(parse_statement("midp a m b")) != canonicalize(
        parse_statement("midp m a b")
    )


def test_eqangle_swap_sides_and_pairs():
    base = canonicalize(parse_statement("eqangle a b c d e f g h"))
    assert canonicalize(parse_statement("eqangle e f g h a b c d")) == base
    assert canonicalize(parse_statement("eqangle b a c d e f g h")) == base
    # reversing one *pair* (not one segment) is a different relation
    assert canonicalize(parse_statement("eqangle c d a b e f g h")) != base


def test_rename():
    stmt = parse_statement("perp a b c d").rename({"a": "x", "d": "y"})
    assert stmt.args == ("x", "b", "c", "y")


def test_variants_contain_original():
    stmt = parse_statement("para a b c d")
    assert stmt.args in stmt.variants()


_ALPHA = st.sampled_from("abcdefgh")


@given(st.tuples(_ALPHA, _ALPHA, _ALPHA, _ALPHA))
def test_canonicalize_idempotent_and_orbit_stable(args):
    stmt = Statement("cong", args)
    c = canonicalize(stmt)
    assert canonicalize(c) == c
    for variant in stmt.variants():
        assert canonicalize(Statement("cong", variant)) == c


@given(st.permutations(["a", "b", "c", "d"]))
def test_cyclic_canonical_form_is_sorted(args):
    assert canonicalize(Statement("cyclic", tuple(args))).args == ("a", "b", "c", "d")


# ---------------------------------------------------------------------------
# rule and definition parsing


def test_parse_rules_minimal():
    rules = parse_rules("K7: cong o a o b, ncoll o a b => eqangle o a a b a b o b\n")
    assert len(rules) == 1
    rule = rules[0]
    assert rule.id == "K_7"
    assert len(rule.premises) == 2
    assert rule.conclusion.pred == "eqangle"
    assert rule.variables == {"o", "a", "b"}


def test_parse_rules_skips_comments_and_blanks():
    text = "# header\n\nK1: cong a b c d => cong c d a b\n"
    assert len(parse_rules(text)) == 1


def test_parse_rules_rejects_missing_arrow():
    with pytest.raises(ParseError):
        parse_rules("K1: cong a b c d cong c d a b\n")


def test_parse_defs_minimal():
    text = (
        "midpoint x a b\n"
        "deps: a b\n"
        "emit: midp x a b; cong x a x b; coll x a b\n"
        "recipe: x = midpoint(a, b)\n"
    )
    defs = parse_defs(text)
    assert len(defs) == 1
    d = defs[0]
    assert d.name == "midpoint"
    assert d.points == ("x", "a", "b")
    assert d.introduced == ("x",)


def test_repository_contents(repo):
    assert len(repo.rules) == 43
    assert len(repo.defs) == 24
    assert repo.rule("K_25").conclusion.pred == "para"
    assert repo.definition("midpoint").introduced == ("x",)
    with pytest.raises(KeyError):
        repo.rule("K_99")


def test_rule_ids_are_dense(repo):
    assert sorted(r.id for r in repo.rules) == sorted(
        f"K_{i}" for i in range(1, 44)
    )


def test_guard_predicates_never_conclude(repo):
    for rule in repo.rules:
        assert rule.conclusion.pred not in {"ncoll", "npara", "sameside"}
