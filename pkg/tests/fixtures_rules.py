"""One scene per catalog rule: coordinates satisfying exactly its premises.

Each fixture injects the rule's premise statements directly (no
construction entries), so a single engine round must produce the
conclusion via that rule.  Variable names from the catalog double as
concrete point names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class RuleFixture:
    rule_id: str
    positions: dict[str, tuple[float, float]]
    premises: tuple[str, ...]
    conclusion: str
    guards: tuple[str, ...] = field(default=())


def _dir(deg: float) -> tuple[float, float]:
    rad = math.radians(deg)
    return (math.cos(rad), math.sin(rad))


def _at(base: tuple[float, float], deg: float, dist: float = 1.0) -> tuple[float, float]:
    dx, dy = _dir(deg)
    return (base[0] + dx * dist, base[1] + dy * dist)


def _on_circle(radius: float, deg: float) -> tuple[float, float]:
    return (radius * math.cos(math.radians(deg)), radius * math.sin(math.radians(deg)))


# reference triangle plus congruent / similar partners
_A, _B, _C = (0.0, 0.0), (4.0, 0.0), (1.0, 3.0)
_TRI = {"a": _A, "b": _B, "c": _C}
_MIRROR_CONG = {"p": (6.0, 1.0), "q": (10.0, 1.0), "r": (7.0, -2.0)}
_MIRROR_SIM = {"p": (6.0, 1.0), "q": (12.0, 1.0), "r": (7.5, -3.5)}
_DIRECT_CONG = {"p": (6.0, 1.0), "q": (10.0, 1.0), "r": (7.0, 4.0)}
_DIRECT_SIM = {"p": (6.0, 1.0), "q": (12.0, 1.0), "r": (7.5, 5.5)}

# shared concyclic configurations (circle of radius 5 at the origin)
_CHORD_FOUR = {
    "a": _on_circle(5, 100),
    "b": _on_circle(5, 170),
    "p": _on_circle(5, 280),
    "q": _on_circle(5, 350),
}

_SQRT3 = math.sqrt(3.0)

FIXTURES: tuple[RuleFixture, ...] = (
    RuleFixture(
        "K_1",
        {**_TRI, **_MIRROR_CONG},
        ("eqangle6 a b a c p r p q", "eqangle6 b a b c q r q p", "cong a b p q"),
        "contri2 a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_2",
        {**_TRI, **_MIRROR_SIM},
        ("eqratio6 b a b c q p q r", "eqratio6 c a c b r p r q"),
        "simtriStar a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_3",
        {**_TRI, **_DIRECT_CONG},
        ("cong a b p q", "cong b c q r", "eqangle6 b a b c q p q r"),
        "contriStar a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_4",
        {**_TRI, **_MIRROR_CONG},
        ("eqratio6 b a b c q p q r", "eqratio6 c a c b r p r q", "cong a b p q"),
        "contriStar a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_5",
        {**_TRI, **_DIRECT_SIM},
        ("eqratio6 b a b c q p q r", "eqangle6 b a b c q p q r"),
        "simtriStar a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_6",
        {**_TRI, **_MIRROR_SIM},
        ("eqangle6 a b a c p r p q", "eqangle6 b a b c q r q p"),
        "simtri2 a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_7",
        {"o": (2.0, 3.0), "a": (0.0, 0.0), "b": (4.0, 0.0)},
        ("eqangle6 a o a b b a b o",),
        "cong o a o b",
        guards=("ncoll o a b",),
    ),
    RuleFixture(
        "K_8",
        {"o": (2.0, 3.0), "a": (0.0, 0.0), "b": (4.0, 0.0)},
        ("cong o a o b",),
        "eqangle o a a b a b o b",
        guards=("ncoll o a b",),
    ),
    RuleFixture(
        "K_9",
        {**_TRI, **_MIRROR_CONG},
        ("cong a b p q", "cong b c q r", "cong c a r p"),
        "contriStar a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_10",
        {**_TRI, **_DIRECT_SIM},
        ("eqangle6 a b a c p q p r", "eqangle6 b a b c q p q r"),
        "simtri a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_11",
        {**_TRI, **_DIRECT_CONG},
        ("eqangle6 a b a c p q p r", "eqangle6 b a b c q p q r", "cong a b p q"),
        "contri a b c p q r",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_12",
        {
            "a": (0.0, 0.0),
            "b": (1.0, 0.0),
            "c": (0.0, 1.0),
            "d": _at((0.0, 1.0), 30),
            "e": (0.0, 2.0),
            "f": _at((0.0, 2.0), 60),
            "m": (3.0, 0.0),
            "n": _at((3.0, 0.0), 15),
            "p": (3.0, 1.0),
            "q": _at((3.0, 1.0), 45),
            "r": (3.0, 2.0),
            "u": _at((3.0, 2.0), 75),
        },
        ("eqangle a b c d m n p q", "eqangle c d e f p q r u"),
        "eqangle a b e f m n r u",
    ),
    RuleFixture(
        "K_13",
        {
            "a": (0.0, 0.0),
            "b": _at((0.0, 0.0), 20),
            "c": (0.0, 1.0),
            "d": _at((0.0, 1.0), 110),
            "p": (3.0, 0.0),
            "q": _at((3.0, 0.0), 50),
            "u": (3.0, 1.0),
            "v": _at((3.0, 1.0), 140),
        },
        ("eqangle a b p q c d u v", "perp p q u v"),
        "perp a b c d",
    ),
    RuleFixture(
        "K_14",
        {
            "o": (0.0, 0.0),
            "a": (5.0, 0.0),
            "b": (3.0, 4.0),
            "c": (-4.0, 3.0),
            "x": (5.0, 3.0),
        },
        ("circle o a b c", "eqangle a x a b c a c b"),
        "perp o a a x",
    ),
    RuleFixture(
        "K_15",
        {
            "a": (-4.0, 3.0),
            "b": (4.0, 3.0),
            "p": (0.0, 5.0),
            "q": (0.0, -5.0),
        },
        ("cong a p b p", "cong a q b q", "cyclic a b p q"),
        "perp p a a q",
    ),
    RuleFixture(
        "K_16",
        dict(_CHORD_FOUR),
        ("cyclic a b p q", "eqangle a p a q p a p b"),
        "cong p q a b",
    ),
    RuleFixture(
        "K_17",
        {
            "a": (0.0, 0.0),
            "b": _at((0.0, 0.0), 10),
            "c": (0.0, 2.0),
            "d": _at((0.0, 2.0), 100),
            "e": (4.0, 0.0),
            "f": _at((4.0, 0.0), 40),
            "g": (4.0, 2.0),
            "h": _at((4.0, 2.0), 130),
        },
        ("perp a b c d", "perp e f g h"),
        "eqangle a b e f c d g h",
        guards=("npara a b e f",),
    ),
    RuleFixture(
        "K_18",
        {
            "a": (-3.0, 0.0),
            "b": (3.0, 0.0),
            "p": (0.0, 4.0),
            "q": (0.0, -2.0),
        },
        ("cong a p b p", "cong a q b q"),
        "perp a b p q",
    ),
    RuleFixture(
        "K_19",
        {
            "o": (0.0, 0.0),
            "a": (5.0, 0.0),
            "b": (3.0, 4.0),
            "c": (-4.0, 3.0),
            "x": (5.0, 3.0),
        },
        ("circle o a b c", "perp o a a x"),
        "eqangle a x a b c a c b",
    ),
    RuleFixture(
        "K_20",
        dict(_CHORD_FOUR),
        ("cyclic a b p q",),
        "eqangle p a p b q a q b",
    ),
    RuleFixture(
        "K_21",
        dict(_CHORD_FOUR),
        ("eqangle6 p a p b q a q b",),
        "cyclic a b p q",
        guards=("ncoll p a b",),
    ),
    RuleFixture(
        "K_22",
        {
            "o": (0.0, 0.0),
            "a": (2.0, 0.0),
            "c": (5.0, 0.0),
            "b": (1.2, 1.6),
            "d": (3.0, 4.0),
        },
        ("eqratio o a a c o b b d", "coll o a c", "coll o b d"),
        "para a b c d",
        guards=("ncoll a b c", "sameside a o c b o d"),
    ),
    RuleFixture(
        "K_23",
        {"a": (0.0, 0.0), "b": (2.0, 1.0), "c": (4.0, 2.0)},
        ("para a b a c",),
        "coll a b c",
    ),
    RuleFixture(
        "K_24",
        {
            "o": (0.0, 0.0),
            "a": (2.0, 0.0),
            "c": (5.0, 0.0),
            "b": (1.2, 1.6),
            "d": (3.0, 4.0),
        },
        ("para a b c d", "coll o a c", "coll o b d"),
        "eqratio o a o c o b o d",
        guards=("ncoll o a b",),
    ),
    RuleFixture(
        "K_25",
        {
            "a": (0.0, 0.0),
            "b": (4.0, 0.0),
            "c": (1.0, 3.0),
            "e": (2.0, 0.0),
            "f": (0.5, 1.5),
        },
        ("midp e a b", "midp f a c"),
        "para e f b c",
    ),
    RuleFixture(
        "K_26",
        {
            "a": (0.0, 0.0),
            "b": (1.0, 0.0),
            "c": (0.0, 1.0),
            "d": (2.0, 1.0),
            "e": (0.0, 2.0),
            "f": (4.0, 2.0),
            "m": (5.0, 0.0),
            "n": (8.0, 0.0),
            "p": (5.0, 1.0),
            "q": (11.0, 1.0),
            "r": (5.0, 2.0),
            "u": (17.0, 2.0),
        },
        ("eqratio a b c d m n p q", "eqratio c d e f p q r u"),
        "eqratio a b e f m n r u",
    ),
    RuleFixture(
        "K_27",
        {
            "a": (0.0, 0.0),
            "b": _at((0.0, 0.0), 25),
            "c": (0.0, 2.0),
            "d": _at((0.0, 2.0), 25),
            "p": (4.0, 0.0),
            "q": _at((4.0, 0.0), 70),
        },
        ("eqangle a b p q c d p q",),
        "para a b c d",
    ),
    RuleFixture(
        "K_28",
        {
            "a": (-3.0, 4.0),
            "b": (3.0, 4.0),
            "c": (4.0, -3.0),
            "d": (-4.0, -3.0),
        },
        ("cyclic a b c d", "para a b c d"),
        "eqangle a d c d c d c b",
    ),
    RuleFixture(
        "K_29",
        {
            "a": (0.0, 0.0),
            "b": (6.0, 0.0),
            "c": (1.5, 1.5 * _SQRT3),
            "d": (3.0, _SQRT3),
        },
        ("eqratio6 d b d c a b a c", "coll d b c"),
        "eqangle6 a b a d a d a c",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_30",
        {
            "a": (0.0, 0.0),
            "b": (6.0, 0.0),
            "c": (1.5, 1.5 * _SQRT3),
            "d": (3.0, _SQRT3),
        },
        ("eqangle6 a b a d a d a c", "coll d b c"),
        "eqratio6 d b d c a b a c",
        guards=("ncoll a b c",),
    ),
    RuleFixture(
        "K_31",
        {
            "o": (0.0, 0.0),
            "a": (-5.0, 0.0),
            "b": (3.0, 4.0),
            "c": (5.0, 0.0),
        },
        ("circle o a b c", "coll o a c"),
        "perp a b b c",
    ),
    RuleFixture(
        "K_32",
        {
            "a": (4.0, 0.0),
            "b": (0.0, 0.0),
            "c": (0.0, 6.0),
            "m": (2.0, 3.0),
        },
        ("perp a b b c", "midp m a c"),
        "cong a m b m",
    ),
    RuleFixture(
        "K_33",
        {
            "a": (0.0, 0.0),
            "b": (3.0, 0.0),
            "c": (0.0, 1.0),
            "d": (2.0, 1.0),
            "e": (0.0, 2.0),
            "f": (3.0, 2.0),
            "g": (0.0, 3.0),
            "h": (2.0, 3.0),
        },
        ("eqratio a b c d e f g h", "cong c d g h"),
        "cong a b e f",
    ),
    RuleFixture(
        "K_34",
        {
            "a": (0.0, 0.0),
            "b": (4.0, 0.0),
            "c": (6.0, 3.0),
            "d": (2.0, 3.0),
            "m": (2.0 / 3.0, 1.0),
            "n": (4.0 + 2.0 / 3.0, 1.0),
        },
        ("para a b c d", "coll m a d", "coll n b c", "para m n a b"),
        "eqratio6 m a m d n b n c",
    ),
    RuleFixture(
        "K_35",
        {
            "a": (0.0, 0.0),
            "b": (4.0, 0.0),
            "m": (2.0, 0.0),
            "c": (0.0, 2.0),
            "d": (6.0, 2.0),
            "n": (3.0, 2.0),
        },
        ("midp m a b", "midp n c d"),
        "eqratio m a a b n c c d",
    ),
    RuleFixture(
        "K_36",
        {
            "a": (-3.0, 0.0),
            "b": (3.0, 0.0),
            "m": (0.0, 0.0),
            "o": (0.0, 4.0),
        },
        ("midp m a b", "perp o m a b"),
        "cong o a o b",
    ),
    RuleFixture(
        "K_37",
        {
            "c": (0.0, 0.0),
            "d": (0.0, 3.0),
            "a": (1.0, 1.0),
            "b": (4.0, 1.0),
            "e": (1.0, 5.0),
            "f": (6.0, 5.0),
        },
        ("perp a b c d", "perp c d e f"),
        "para a b e f",
        guards=("ncoll a b e",),
    ),
    RuleFixture(
        "K_38",
        {
            "a": (0.0, 0.0),
            "b": (4.0, 0.0),
            "c": (6.0, 3.0),
            "d": (2.0, 3.0),
            "m": (2.0 / 3.0, 1.0),
            "n": (4.0 + 2.0 / 3.0, 1.0),
        },
        ("para a b c d", "coll m a d", "coll n b c", "eqratio6 m a m d n b n c"),
        "para m n a b",
        guards=("sameside m a d n b c",),
    ),
    RuleFixture(
        "K_39",
        {
            "o": (0.0, 0.0),
            "a": (5.0, 0.0),
            "b": (3.0, 4.0),
            "c": (-4.0, 3.0),
            "d": (0.0, -5.0),
        },
        ("cong o a o b", "cong o b o c", "cong o c o d"),
        "cyclic a b c d",
    ),
    RuleFixture(
        "K_40",
        {
            "o": (0.0, 0.0),
            "a": (-5.0, 0.0),
            "b": (3.0, 4.0),
            "c": (3.0, -4.0),
            "m": (3.0, 0.0),
        },
        ("circle o a b c", "coll m b c", "eqangle a b a c o b o m"),
        "midp m b c",
    ),
    RuleFixture(
        "K_41",
        {
            "o": (0.0, 0.0),
            "a": (-5.0, 0.0),
            "b": (3.0, 4.0),
            "c": (3.0, -4.0),
            "m": (3.0, 0.0),
        },
        ("circle o a b c", "midp m b c"),
        "eqangle a b a c o b o m",
    ),
    RuleFixture(
        "K_42",
        {
            "m": (0.0, 0.0),
            "a": (-2.0, -1.0),
            "b": (2.0, 1.0),
            "c": (1.0, -2.0),
            "d": (-1.0, 2.0),
        },
        ("midp m a b", "midp m c d"),
        "para a c b d",
    ),
    RuleFixture(
        "K_43",
        {
            "m": (0.0, 0.0),
            "a": (-2.0, -1.0),
            "b": (2.0, 1.0),
            "c": (1.0, -2.0),
            "d": (-1.0, 2.0),
        },
        ("midp m a b", "para a c b d", "para a d b c"),
        "midp m c d",
    ),
)
