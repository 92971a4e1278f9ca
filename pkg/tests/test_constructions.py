from __future__ import annotations

import itertools

import pytest

from geomgen.constructions import (
    ExDefinitionSet,
    MergeConflictError,
    canonical_rename,
    instantiate,
    minimal_set,
    point_names,
)
from geomgen.language import parse_statement


def _exd(repo, spec):
    entries = [instantiate(repo.definition(name), args) for name, args in spec]
    return ExDefinitionSet(tuple(entries))


def test_point_names_start_lowercase_alpha():
    names = list(itertools.islice(point_names(), 30))
    assert names[:3] == ["a", "b", "c"]
    assert len(set(names)) == 30


def test_instantiate_triangle(repo):
    entry = instantiate(repo.definition("triangle"), ("a", "b", "c"))
    assert entry.name == "triangle"
    assert entry.introduced == ("a", "b", "c")
    assert entry.deps == ()
    assert parse_statement("ncoll a b c") in entry.guards


def test_instantiate_midpoint_emits_are_canonical(repo):
    entry = instantiate(repo.definition("midpoint"), ("x", "b", "a"))
    assert entry.introduced == ("x",)
    assert entry.deps == ("b", "a")
    assert parse_statement("midp x a b") in entry.emits
    assert parse_statement("coll a b x") in entry.emits


def test_instantiate_arity_mismatch(repo):
    with pytest.raises(ValueError):
        instantiate(repo.definition("midpoint"), ("x", "a"))


def test_set_validates_duplicate_introduction(repo):
    entries = (
        instantiate(repo.definition("triangle"), ("a", "b", "c")),
        instantiate(repo.definition("midpoint"), ("a", "b", "c")),
    )
    with pytest.raises(ValueError):
        ExDefinitionSet(entries)


def test_set_validates_unknown_dependency(repo):
    entries = (instantiate(repo.definition("midpoint"), ("x", "a", "b")),)
    with pytest.raises(ValueError):
        ExDefinitionSet(entries)


def test_all_statements_and_guards(repo):
    exd = _exd(
        repo,
        [("triangle", ("a", "b", "c")), ("midpoint", ("m", "a", "b"))],
    )
    stmts = exd.all_statements()
    assert parse_statement("midp m a b") in stmts
    assert parse_statement("ncoll a b c") in exd.all_guards()
    assert exd.points() == ["a", "b", "c", "m"]


def test_serialize_round_trip(repo):
    exd = _exd(
        repo,
        [
            ("triangle", ("a", "b", "c")),
            ("circumcenter", ("o", "a", "b", "c")),
            ("foot", ("f", "a", "b", "c")),
        ],
    )
    data = exd.serialize()
    assert data[0] == {"def": "triangle", "args": ["a", "b", "c"]}
    back = ExDefinitionSet.deserialize(data, repo)
    assert back.serialize() == data
    assert [e.signature for e in back.entries] == [e.signature for e in exd.entries]


def test_deserialize_rejects_unknown_definition(repo):
    with pytest.raises(KeyError):
        ExDefinitionSet.deserialize([{"def": "hexagram", "args": ["a"]}], repo)


# ---------------------------------------------------------------------------
# canonical union


def test_minimal_set_dedups_shared_structure(repo):
    left = _exd(repo, [("triangle", ("a", "b", "c")), ("midpoint", ("m", "a", "b"))])
    right = _exd(repo, [("triangle", ("a", "b", "c")), ("midpoint", ("n", "a", "c"))])
    merged = minimal_set([left, right])
    assert sum(1 for e in merged.entries if e.name == "triangle") == 1
    assert sum(1 for e in merged.entries if e.name == "midpoint") == 2


def test_minimal_set_identity_is_stable(repo):
    exd = _exd(repo, [("triangle", ("a", "b", "c")), ("foot", ("f", "a", "b", "c"))])
    merged = minimal_set([exd])
    assert merged.serialize() == exd.serialize()


def test_minimal_set_renames_to_dense_alphabet(repo):
    exd = _exd(repo, [("triangle", ("p", "q", "r")), ("midpoint", ("z", "p", "q"))])
    merged = minimal_set([exd])
    assert merged.points() == ["a", "b", "c", "d"]


def test_minimal_set_conflict_on_incompatible_reuse(repo):
    left = _exd(repo, [("triangle", ("a", "b", "c")), ("midpoint", ("m", "a", "b"))])
    right = _exd(repo, [("triangle", ("a", "b", "c")), ("foot", ("m", "a", "b", "c"))])
    with pytest.raises(MergeConflictError):
        minimal_set([left, right])


def test_canonical_rename_preserves_structure(repo):
    entries = [
        instantiate(repo.definition("triangle"), ("x", "y", "z")),
        instantiate(repo.definition("midpoint"), ("w", "x", "y")),
    ]
    renamed = canonical_rename(entries)
    assert [e.name for e in renamed] == ["triangle", "midpoint"]
    assert renamed[1].deps == ("a", "b")
