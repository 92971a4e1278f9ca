"""Exact linear reasoning over angles, ratios and congruences.

Three engines back the algebraic half of the deduction loop:

* ``AngleSystem``    -- line directions modulo a half turn (para/perp/eqangle)
* ``RatioSystem``    -- logarithms of segment lengths (cong/eqratio/midp)
* ``CongClosure``    -- union-find proof forest over segments (cong only)

All three track, for every derivable equation, a set of source facts
sufficient to re-derive it; those sets become proof certificates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable

from .language import Statement

Var = tuple[str, ...]
Row = dict[Var, Fraction]

_ZERO = Fraction(0)


def _seg(p: str, q: str) -> tuple[str, str]:
    return (p, q) if p <= q else (q, p)


def _acc(row: Row, var: Var, coeff: int) -> None:
    c = row.get(var, _ZERO) + coeff
    if c:
        row[var] = c
    else:
        row.pop(var, None)


class LinearTable:
    """Incrementally row-reduced rational linear system with certificates.

    Rows are inserted one at a time; each stored pivot row remembers the
    union of source facts needed to re-derive it.  A query succeeds when
    the requested equation reduces to zero, and returns that union for
    the rows it consumed.
    """

    def __init__(self) -> None:
        self._pivots: dict[Var, tuple[Row, frozenset]] = {}
        self._order: list[Var] = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def _reduce(self, row: Row) -> tuple[Row, set]:
        out = {v: Fraction(c) for v, c in row.items() if c}
        used: set = set()
        # pivot rows never contain pivot variables created before them, so
        # one pass in creation order reaches a fully reduced residual
        for var in self._order:
            coeff = out.get(var)
            if not coeff:
                continue
            prow, psrc = self._pivots[var]
            for v, c in prow.items():
                nv = out.get(v, _ZERO) - coeff * c
                if nv:
                    out[v] = nv
                else:
                    out.pop(v, None)
            used |= psrc
        return out, used

    def insert(self, row: Row, sources: tuple[Hashable, ...]) -> bool:
        """Add one equation; returns True when it increased the rank."""
        out, used = self._reduce(row)
        if not out:
            return False
        pivot = min(out)
        coeff = out[pivot]
        norm = {v: c / coeff for v, c in out.items()}
        self._pivots[pivot] = (norm, frozenset(sources) | frozenset(used))
        self._order.append(pivot)
        return True

    def query(self, row: Row) -> frozenset | None:
        """Certificate sources if the equation is implied, else None."""
        out, used = self._reduce(row)
        if out:
            return None
        return frozenset(used)


class AngleSystem:
    """Directions of undirected lines, as rationals modulo a half turn.

    One variable per unordered point pair; collinearity glues the pairs
    of one line together.  The half-turn variable doubles to zero, which
    collapses it rationally -- the numeric admission gate on every query
    keeps the reasoning anchored to the sampled scene.
    """

    _H: Var = ("half_turn",)

    def __init__(self) -> None:
        self.table = LinearTable()
        self.table.insert({self._H: Fraction(2)}, ())

    @staticmethod
    def _d(p: str, q: str) -> Var:
        return ("d", *_seg(p, q))

    def _rows(self, stmt: Statement) -> list[Row]:
        a = stmt.args
        if stmt.pred == "coll":
            rows = []
            for p, q in ((a[1], a[2]), (a[0], a[2])):
                row: Row = {}
                _acc(row, self._d(a[0], a[1]), 1)
                _acc(row, self._d(p, q), -1)
                rows.append(row)
            return rows
        row = {}
        if stmt.pred == "para":
            _acc(row, self._d(a[0], a[1]), 1)
            _acc(row, self._d(a[2], a[3]), -1)
        elif stmt.pred == "perp":
            _acc(row, self._d(a[0], a[1]), 1)
            _acc(row, self._d(a[2], a[3]), -1)
            _acc(row, self._H, -1)
        elif stmt.pred in ("eqangle", "eqangle6"):
            _acc(row, self._d(a[2], a[3]), 1)
            _acc(row, self._d(a[0], a[1]), -1)
            _acc(row, self._d(a[6], a[7]), -1)
            _acc(row, self._d(a[4], a[5]), 1)
        else:
            raise ValueError(f"angle system cannot encode {stmt.pred!r}")
        return [row]

    def add(self, stmt: Statement, source: Hashable) -> bool:
        grew = False
        for row in self._rows(stmt):
            grew = self.table.insert(row, (source,)) or grew
        return grew

    def query(self, stmt: Statement) -> frozenset | None:
        if stmt.pred not in ("para", "perp", "eqangle", "eqangle6"):
            return None
        (row,) = self._rows(stmt)
        return self.table.query(row)

    def residual_vars(self, stmt: Statement) -> frozenset[Var]:
        """Variables left in the statement's rows after reduction."""
        out: set[Var] = set()
        for row in self._rows(stmt):
            red, _ = self.table._reduce(row)
            out.update(red)
        return frozenset(out)


class RatioSystem:
    """Logarithms of segment lengths as an exact linear system.

    One variable per unordered point pair, plus a constant for log 2 so
    midpoints can relate a half segment to the whole one.
    """

    _G2: Var = ("log_two",)

    def __init__(self) -> None:
        self.table = LinearTable()

    @staticmethod
    def _l(p: str, q: str) -> Var:
        return ("l", *_seg(p, q))

    def _rows(self, stmt: Statement) -> list[Row]:
        a = stmt.args
        rows: list[Row] = []
        if stmt.pred == "cong":
            row: Row = {}
            _acc(row, self._l(a[0], a[1]), 1)
            _acc(row, self._l(a[2], a[3]), -1)
            rows.append(row)
        elif stmt.pred in ("eqratio", "eqratio6"):
            row = {}
            _acc(row, self._l(a[0], a[1]), 1)
            _acc(row, self._l(a[2], a[3]), -1)
            _acc(row, self._l(a[4], a[5]), -1)
            _acc(row, self._l(a[6], a[7]), 1)
            rows.append(row)
        elif stmt.pred == "midp":
            m, x, y = a
            row = {}
            _acc(row, self._l(m, x), 1)
            _acc(row, self._l(m, y), -1)
            rows.append(row)
            row = {}
            _acc(row, self._l(x, y), 1)
            _acc(row, self._l(m, x), -1)
            _acc(row, self._G2, -1)
            rows.append(row)
        elif stmt.pred == "circle":
            o = a[0]
            for p, q in ((a[1], a[2]), (a[2], a[3])):
                row = {}
                _acc(row, self._l(o, p), 1)
                _acc(row, self._l(o, q), -1)
                rows.append(row)
        else:
            raise ValueError(f"ratio system cannot encode {stmt.pred!r}")
        return rows

    def add(self, stmt: Statement, source: Hashable) -> bool:
        grew = False
        for row in self._rows(stmt):
            grew = self.table.insert(row, (source,)) or grew
        return grew

    def query(self, stmt: Statement) -> frozenset | None:
        if stmt.pred not in ("cong", "eqratio", "eqratio6"):
            return None
        (row,) = self._rows(stmt)
        return self.table.query(row)

    def residual_vars(self, stmt: Statement) -> frozenset[Var]:
        """Variables left in the statement's rows after reduction."""
        out: set[Var] = set()
        for row in self._rows(stmt):
            red, _ = self.table._reduce(row)
            out.update(red)
        return frozenset(out)


class CongClosure:
    """Union-find over segments, kept as a proof forest.

    Each union edge is labelled with the fact that justified it, so the
    equality of two segments is explained by the facts along the tree
    path between them.
    """

    def __init__(self) -> None:
        # node -> (neighbour toward the root, labelling fact), None at roots
        self._edge: dict[tuple[str, str], tuple[tuple[str, str], Hashable] | None] = {}

    @staticmethod
    def key(p: str, q: str) -> tuple[str, str]:
        return _seg(p, q)

    def add(self, p: str, q: str) -> tuple[str, str]:
        k = _seg(p, q)
        if k not in self._edge:
            self._edge[k] = None
        return k

    def _root(self, k: tuple[str, str]) -> tuple[str, str]:
        while True:
            e = self._edge[k]
            if e is None:
                return k
            k = e[0]

    def _reroot(self, k: tuple[str, str]) -> None:
        prev: tuple[tuple[str, str], Hashable] | None = None
        node = k
        while True:
            nxt = self._edge[node]
            self._edge[node] = prev
            if nxt is None:
                break
            prev = (node, nxt[1])
            node = nxt[0]

    def union(self, k1: tuple[str, str], k2: tuple[str, str], fact: Hashable) -> bool:
        k1 = self.add(*k1)
        k2 = self.add(*k2)
        if self._root(k1) == self._root(k2):
            return False
        self._reroot(k1)
        self._edge[k1] = (k2, fact)
        return True

    def same(self, k1: tuple[str, str], k2: tuple[str, str]) -> bool:
        if k1 not in self._edge or k2 not in self._edge:
            return False
        return k1 == k2 or self._root(k1) == self._root(k2)

    def explain(self, k1: tuple[str, str], k2: tuple[str, str]) -> list[Hashable]:
        """Facts along the forest path from k1 to k2 (must be connected)."""
        if k1 == k2:
            return []
        up1: list[tuple[tuple[str, str], Hashable | None]] = [(k1, None)]
        node = k1
        while (e := self._edge[node]) is not None:
            up1.append((e[0], e[1]))
            node = e[0]
        depth = {n: i for i, (n, _) in enumerate(up1)}
        path2: list[Hashable] = []
        node = k2
        while node not in depth:
            e = self._edge[node]
            if e is None:
                raise KeyError(f"{k1} and {k2} are not known equal")
            path2.append(e[1])
            node = e[0]
        facts = [f for _, f in up1[1 : depth[node] + 1] if f is not None]
        return facts + path2

    def classes(self) -> list[list[tuple[str, str]]]:
        """Current equivalence classes, deterministically ordered."""
        groups: dict[tuple[str, str], list[tuple[str, str]]] = {}
        for k in self._edge:
            groups.setdefault(self._root(k), []).append(k)
        return [sorted(g) for _, g in sorted(groups.items())]
