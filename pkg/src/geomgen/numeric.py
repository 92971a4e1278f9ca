"""Coordinate backend: recipe executors, scene sampling, numeric truth tests.

A scene assigns float coordinates to every point of an instantiated
construction sequence.  Sampling retries with fresh randomness until all
emitted facts hold to tolerance and all guards hold with a robustness
margin; statements are later admitted into the symbolic engine only if
they also hold in the sampled scene.
"""

from __future__ import annotations

import hashlib
import math
import random
from collections.abc import Mapping
from dataclasses import dataclass

from .language import Statement

Coord = tuple[float, float]

TOLERANCE = 1e-9  # relative tolerance for equality-like relations
GUARD_MARGIN = 1e-6  # robustness margin for open (inequality) relations

_MAX_COORD = 1e4
_MIN_SEP = 1e-6
_COINCIDE_EPS = 1e-7
_TWO_PI = 2.0 * math.pi


class DegenerateError(Exception):
    """Sampling kept violating an entry contract (guard, emit, distinctness)."""


class UnsatisfiableError(DegenerateError):
    """Every attempt failed because a required intersection was empty."""


class _Retry(Exception):
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from the reprs of *parts* (platform independent)."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


# ---------------------------------------------------------------------------
# vector helpers


def _sub(a: Coord, b: Coord) -> Coord:
    return (a[0] - b[0], a[1] - b[1])


def _add(a: Coord, b: Coord) -> Coord:
    return (a[0] + b[0], a[1] + b[1])


def _scale(v: Coord, t: float) -> Coord:
    return (v[0] * t, v[1] * t)


def _dot(u: Coord, v: Coord) -> float:
    return u[0] * v[0] + u[1] * v[1]


def _cross(u: Coord, v: Coord) -> float:
    return u[0] * v[1] - u[1] * v[0]


def _norm(v: Coord) -> float:
    return math.hypot(v[0], v[1])


def dist(a: Coord, b: Coord) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _perp(v: Coord) -> Coord:
    return (-v[1], v[0])


def _midpoint(a: Coord, b: Coord) -> Coord:
    return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


def direction_angle(a: Coord, b: Coord) -> float:
    """Direction of the undirected line a-b, in [0, pi)."""
    return math.atan2(b[1] - a[1], b[0] - a[0]) % math.pi


def angle_gap(x: float) -> float:
    """Distance of x from 0 modulo pi."""
    x %= math.pi
    return min(x, math.pi - x)


# ---------------------------------------------------------------------------
# elementary intersections


def _line_line(a: Coord, b: Coord, c: Coord, d: Coord) -> Coord | None:
    u = _sub(b, a)
    v = _sub(d, c)
    denom = _cross(u, v)
    if abs(denom) <= 1e-14 * (_norm(u) * _norm(v) + 1e-30):
        return None
    t = _cross(_sub(c, a), v) / denom
    return _add(a, _scale(u, t))


def circumcenter(a: Coord, b: Coord, c: Coord) -> Coord | None:
    u = _sub(b, a)
    v = _sub(c, a)
    d = 2.0 * _cross(u, v)
    if abs(d) <= 1e-14 * (_norm(u) * _norm(v) + 1e-30):
        return None
    uu = _dot(u, u)
    vv = _dot(v, v)
    ux = (v[1] * uu - u[1] * vv) / d
    uy = (u[0] * vv - v[0] * uu) / d
    return (a[0] + ux, a[1] + uy)


def _line_circle(a: Coord, b: Coord, o: Coord, r: float) -> list[Coord]:
    d = _sub(b, a)
    f = _sub(a, o)
    qa = _dot(d, d)
    if qa <= 0.0:
        return []
    qb = 2.0 * _dot(f, d)
    qc = _dot(f, f) - r * r
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        if disc > -1e-12 * qa * r * r:
            disc = 0.0
        else:
            return []
    root = math.sqrt(disc)
    return [
        _add(a, _scale(d, (-qb - root) / (2.0 * qa))),
        _add(a, _scale(d, (-qb + root) / (2.0 * qa))),
    ]


def _circle_circle(o: Coord, r1: float, w: Coord, r2: float) -> list[Coord]:
    d = dist(o, w)
    if d <= 0.0:
        return []
    x = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    y2 = r1 * r1 - x * x
    if y2 < 0.0:
        if y2 > -1e-12 * r1 * r1:
            y2 = 0.0
        else:
            return []
    y = math.sqrt(y2)
    ux = ((w[0] - o[0]) / d, (w[1] - o[1]) / d)
    base = _add(o, _scale(ux, x))
    off = _scale(_perp(ux), y)
    return [_sub(base, off), _add(base, off)]


# ---------------------------------------------------------------------------
# recipe executors


def _spread(rng: random.Random) -> float:
    """A random factor bounded away from zero, either sign."""
    return rng.choice((-1.0, 1.0)) * rng.uniform(0.3, 1.5)


def _line_param(rng: random.Random) -> float:
    """A position along a line bounded away from both defining points."""
    return rng.uniform(0.15, 0.85) + rng.choice((-1.0, 0.0, 1.0))


def _local_scale(pos: Mapping[str, Coord]) -> float:
    m = 1.0
    for x, y in pos.values():
        m = max(m, abs(x), abs(y))
    return m


def _pick_branch(
    candidates: list[Coord], pos: Mapping[str, Coord]
) -> Coord | None:
    """Drop candidates that coincide with existing points, take the
    lexicographically smallest survivor."""
    eps = _COINCIDE_EPS * _local_scale(pos)
    fresh = [
        c
        for c in candidates
        if all(dist(c, p) > eps for p in pos.values())
    ]
    if not fresh:
        return None
    return min(fresh)


def _execute(
    kind: str,
    args: tuple[str, ...],
    pos: dict[str, Coord],
    rng: random.Random,
) -> Coord:
    p = [pos[a] for a in args]
    if kind == "free":
        return (rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0))
    if kind == "on_line":
        a, b = p
        if dist(a, b) <= 0.0:
            raise _Retry("zero_base")
        return _add(a, _scale(_sub(b, a), _line_param(rng)))
    if kind == "on_circle":
        o, a = p
        r = dist(o, a)
        if r <= 0.0:
            raise _Retry("zero_base")
        phi = rng.uniform(0.0, _TWO_PI)
        return (o[0] + r * math.cos(phi), o[1] + r * math.sin(phi))
    if kind == "midpoint":
        return _midpoint(p[0], p[1])
    if kind == "reflection":
        a, b = p
        return (2.0 * b[0] - a[0], 2.0 * b[1] - a[1])
    if kind == "equidistant_point":
        if len(p) == 3:
            o = circumcenter(p[0], p[1], p[2])
            if o is None:
                raise _Retry("collinear")
            return o
        a, b = p
        if dist(a, b) <= 0.0:
            raise _Retry("zero_base")
        return _add(_midpoint(a, b), _scale(_perp(_sub(b, a)), _spread(rng)))
    if kind == "circumcenter":
        o = circumcenter(p[0], p[1], p[2])
        if o is None:
            raise _Retry("collinear")
        return o
    if kind == "on_circumcircle":
        o = circumcenter(p[0], p[1], p[2])
        if o is None:
            raise _Retry("collinear")
        r = dist(o, p[0])
        phi = rng.uniform(0.0, _TWO_PI)
        return (o[0] + r * math.cos(phi), o[1] + r * math.sin(phi))
    if kind == "foot_of_perpendicular":
        a, b, c = p
        v = _sub(c, b)
        den = _dot(v, v)
        if den <= 0.0:
            raise _Retry("zero_base")
        t = _dot(_sub(a, b), v) / den
        return _add(b, _scale(v, t))
    if kind == "line_reflection":
        a, b, c = p
        v = _sub(c, b)
        den = _dot(v, v)
        if den <= 0.0:
            raise _Retry("zero_base")
        t = _dot(_sub(a, b), v) / den
        foot = _add(b, _scale(v, t))
        return (2.0 * foot[0] - a[0], 2.0 * foot[1] - a[1])
    if kind == "parallelogram_point":
        a, b, c = p
        return (a[0] + c[0] - b[0], a[1] + c[1] - b[1])
    if kind == "parallel_point":
        a, b, c = p
        if dist(a, b) <= 0.0:
            raise _Retry("zero_base")
        return _add(c, _scale(_sub(b, a), _spread(rng)))
    if kind == "perp_point":
        a, b, c = p
        if dist(a, b) <= 0.0:
            raise _Retry("zero_base")
        return _add(c, _scale(_perp(_sub(b, a)), _spread(rng)))
    if kind == "intersection_line_line":
        x = _line_line(p[0], p[1], p[2], p[3])
        if x is None:
            raise _Retry("parallel")
        return x
    if kind == "intersection_line_perp":
        a, b, c, d = p
        if dist(c, d) <= 0.0:
            raise _Retry("zero_base")
        x = _line_line(a, b, c, _add(c, _perp(_sub(d, c))))
        if x is None:
            raise _Retry("parallel")
        return x
    if kind == "intersection_line_circle":
        a, b, o, c = p
        sols = _line_circle(a, b, o, dist(o, c))
        x = _pick_branch(sols, pos)
        if x is None:
            raise _Retry("empty_intersection")
        return x
    if kind == "intersection_circle_circle":
        o, a, w, b = p
        sols = _circle_circle(o, dist(o, a), w, dist(w, b))
        x = _pick_branch(sols, pos)
        if x is None:
            raise _Retry("empty_intersection")
        return x
    raise ValueError(f"unknown recipe kind {kind!r}")


# ---------------------------------------------------------------------------
# numeric truth tests


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-12)


def _triangle_sides(
    a: Coord, b: Coord, c: Coord
) -> tuple[float, float, float]:
    return (dist(a, b), dist(b, c), dist(c, a))


def _similar(
    t1: tuple[Coord, Coord, Coord],
    t2: tuple[Coord, Coord, Coord],
    tol: float,
) -> int | None:
    """None if not similar under the identity correspondence; otherwise +1
    (same orientation) or -1 (opposite)."""
    s1 = _triangle_sides(*t1)
    s2 = _triangle_sides(*t2)
    if min(s1) <= 0.0 or min(s2) <= 0.0:
        return None
    for i in range(3):
        j = (i + 1) % 3
        if not _close(s1[i] * s2[j], s1[j] * s2[i], tol):
            return None
    c1 = _cross(_sub(t1[1], t1[0]), _sub(t1[2], t1[0]))
    c2 = _cross(_sub(t2[1], t2[0]), _sub(t2[2], t2[0]))
    lim = GUARD_MARGIN * s1[0] * s1[2]
    if abs(c1) <= lim or abs(c2) <= GUARD_MARGIN * s2[0] * s2[2]:
        return None
    return 1 if (c1 > 0) == (c2 > 0) else -1


def _congruent(
    t1: tuple[Coord, Coord, Coord],
    t2: tuple[Coord, Coord, Coord],
    tol: float,
) -> int | None:
    s1 = _triangle_sides(*t1)
    s2 = _triangle_sides(*t2)
    for x, y in zip(s1, s2):
        if not _close(x, y, tol):
            return None
    return _similar(t1, t2, tol)


def check_numeric(
    stmt: Statement,
    positions: Mapping[str, Coord],
    tol: float = TOLERANCE,
    margin: float = GUARD_MARGIN,
) -> bool:
    """Whether *stmt* holds for the given coordinates.

    Equality-like predicates are tested to relative tolerance *tol*;
    the open predicates (ncoll, npara, sameside) must clear *margin*.
    """
    p = [positions[a] for a in stmt.args]
    pred = stmt.pred

    if pred == "coll":
        a, b, c = p
        return abs(_cross(_sub(b, a), _sub(c, a))) <= tol * max(
            dist(a, b) * dist(a, c), 1e-12
        )
    if pred == "ncoll":
        a, b, c = p
        base = dist(a, b) * dist(a, c)
        return base > 0.0 and abs(_cross(_sub(b, a), _sub(c, a))) >= margin * base
    if pred == "para" or pred == "npara":
        u = _sub(p[1], p[0])
        v = _sub(p[3], p[2])
        base = _norm(u) * _norm(v)
        if base <= 0.0:
            return False
        if pred == "para":
            return abs(_cross(u, v)) <= tol * base
        return abs(_cross(u, v)) >= margin * base
    if pred == "perp":
        u = _sub(p[1], p[0])
        v = _sub(p[3], p[2])
        base = _norm(u) * _norm(v)
        return base > 0.0 and abs(_dot(u, v)) <= tol * base
    if pred == "cong":
        return _close(dist(p[0], p[1]), dist(p[2], p[3]), tol)
    if pred == "midp":
        m, a, b = p
        return dist(m, _midpoint(a, b)) <= tol * max(dist(a, b), 1e-12)
    if pred == "circle":
        o, a, b, c = p
        ra, rb, rc = dist(o, a), dist(o, b), dist(o, c)
        return _close(ra, rb, tol) and _close(rb, rc, tol)
    if pred == "cyclic":
        a, b, c, d = p
        o = circumcenter(a, b, c)
        if o is None:
            return False
        return _close(dist(o, d), dist(o, a), tol)
    if pred in ("eqangle", "eqangle6"):
        vecs = [_sub(p[i + 1], p[i]) for i in (0, 2, 4, 6)]
        if any(_norm(v) <= 0.0 for v in vecs):
            return False
        d1 = math.atan2(vecs[1][1], vecs[1][0]) - math.atan2(vecs[0][1], vecs[0][0])
        d2 = math.atan2(vecs[3][1], vecs[3][0]) - math.atan2(vecs[2][1], vecs[2][0])
        return angle_gap(d1 - d2) <= max(tol, 1e-9)
    if pred in ("eqratio", "eqratio6"):
        d1, d2, d3, d4 = (dist(p[i], p[i + 1]) for i in (0, 2, 4, 6))
        if min(d1, d2, d3, d4) <= 0.0:
            return False
        return _close(d1 * d4, d2 * d3, tol)
    if pred in ("simtri", "simtri2", "simtriStar"):
        res = _similar((p[0], p[1], p[2]), (p[3], p[4], p[5]), tol)
        if res is None:
            return False
        if pred == "simtri":
            return res == 1
        if pred == "simtri2":
            return res == -1
        return True
    if pred in ("contri", "contri2", "contriStar"):
        res = _congruent((p[0], p[1], p[2]), (p[3], p[4], p[5]), tol)
        if res is None:
            return False
        if pred == "contri":
            return res == 1
        if pred == "contri2":
            return res == -1
        return True
    if pred == "sameside":
        a, b, c, d, e, f = p
        s1 = _dot(_sub(b, a), _sub(c, a))
        s2 = _dot(_sub(e, d), _sub(f, d))
        lim1 = margin * max(dist(a, b) * dist(a, c), 1e-12)
        lim2 = margin * max(dist(d, e) * dist(d, f), 1e-12)
        return abs(s1) >= lim1 and abs(s2) >= lim2 and (s1 > 0) == (s2 > 0)
    raise ValueError(f"no numeric test for predicate {stmt.pred!r}")


# ---------------------------------------------------------------------------
# scene construction


@dataclass(frozen=True)
class NumericScene:
    """Concrete coordinates for one construction sequence."""

    positions: dict[str, Coord]
    seed: int
    attempt: int
    scale: float

    def check(
        self,
        stmt: Statement,
        tol: float = TOLERANCE,
        margin: float = GUARD_MARGIN,
    ) -> bool:
        return check_numeric(stmt, self.positions, tol=tol, margin=margin)


def construct_scene(exdefs, seed: int, max_attempts: int = 64) -> NumericScene:
    """Sample coordinates for every point of *exdefs* (an ExDefinitionSet).

    Each attempt re-runs all recipes with fresh randomness, then validates
    emitted facts, guards, coordinate bounds and pairwise distinctness.
    Raises DegenerateError when the attempt budget runs out, or
    UnsatisfiableError when every failure was an empty intersection.
    """
    reasons: list[str] = []
    for attempt in range(max_attempts):
        rng = random.Random(derive_seed(seed, attempt))
        pos: dict[str, Coord] = {}
        try:
            for entry in exdefs.entries:
                for recipe in entry.recipes:
                    pos[recipe.target] = _execute(recipe.kind, recipe.args, pos, rng)
                for stmt in entry.emits:
                    if not check_numeric(stmt, pos):
                        raise _Retry(f"emit_failed:{stmt.pred}")
                for stmt in entry.guards:
                    if not check_numeric(stmt, pos):
                        raise _Retry(f"guard_failed:{stmt.pred}")
            names = sorted(pos)
            span = 1.0
            for i, n1 in enumerate(names):
                x, y = pos[n1]
                if abs(x) > _MAX_COORD or abs(y) > _MAX_COORD:
                    raise _Retry("unbounded")
                for n2 in names[i + 1 :]:
                    span = max(span, dist(pos[n1], pos[n2]))
            for i, n1 in enumerate(names):
                for n2 in names[i + 1 :]:
                    if dist(pos[n1], pos[n2]) < _MIN_SEP * span:
                        raise _Retry("coincident")
            return NumericScene(positions=pos, seed=seed, attempt=attempt, scale=span)
        except _Retry as exc:
            reasons.append(exc.reason)
    if reasons and all(r == "empty_intersection" for r in reasons):
        raise UnsatisfiableError(
            f"no real intersection in any of {max_attempts} attempts"
        )
    raise DegenerateError(
        f"gave up after {max_attempts} attempts ({reasons[-1] if reasons else 'none'})"
    )
