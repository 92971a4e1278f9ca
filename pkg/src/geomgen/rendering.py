"""Rendering of qualified problems to prose and to SVG diagrams.

Text comes from a template file (``kind.name = template`` lines, with
``${i}`` positional placeholders); one clause is rendered per
construction entry, in construction order, so no sentence mentions a
point before the sentence that introduces it.  Diagrams walk the same
entries and emit labelled points, segments, circles, tick marks and
right-angle marks, affinely mapped onto a fixed canvas.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .constructions import ExDefinitionSet
from .generator import QualifiedProblem
from .language import SYMMETRY_GROUPS, Repository, Statement
from .numeric import NumericScene

log = logging.getLogger(__name__)

_PLACEHOLDER = re.compile(r"\$\{(\d+)\}")
_KINDS = ("pred", "question", "def")


class MissingTemplate(KeyError):
    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name


class TemplateError(ValueError):
    """Raised by load_templates; ``problems`` lists every defect found."""

    def __init__(self, problems: list[str]) -> None:
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class TemplateSet:
    by_predicate: dict[str, str]
    by_definition: dict[str, str]
    question_templates: dict[str, str]
    locale: str = "en"


def _arity(pred: str) -> int:
    return len(SYMMETRY_GROUPS[pred][0])


def load_templates(path, repo: Repository, locale: str = "en") -> TemplateSet:
    """Parse and validate a template file against a repository.

    Defects (duplicate keys, placeholder indices beyond the arity,
    predicates or definitions left without a template) are collected and
    raised together as one TemplateError.
    """
    tables: dict[str, dict[str, str]] = {k: {} for k in _KINDS}
    problems: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, template = line.partition("=")
            if not sep:
                problems.append(f"line {lineno}: expected 'kind.name = template'")
                continue
            key = key.strip()
            template = template.strip()
            kind, dot, name = key.partition(".")
            if kind not in _KINDS or not dot or not name:
                problems.append(f"line {lineno}: unknown key {key!r}")
                continue
            if name in tables[kind]:
                problems.append(f"line {lineno}: duplicate key {key!r}")
                continue
            tables[kind][name] = template

    def check_placeholders(kind: str, name: str, template: str, arity: int) -> None:
        for match in _PLACEHOLDER.finditer(template):
            if int(match.group(1)) >= arity:
                problems.append(
                    f"{kind}.{name}: placeholder ${{{match.group(1)}}} "
                    f"exceeds arity {arity}"
                )

    for pred in sorted(SYMMETRY_GROUPS):
        for kind in ("pred", "question"):
            if pred not in tables[kind]:
                problems.append(f"uncovered predicate: {kind}.{pred}")
            else:
                check_placeholders(kind, pred, tables[kind][pred], _arity(pred))
    for definition in repo.defs:
        if definition.name not in tables["def"]:
            problems.append(f"uncovered definition: def.{definition.name}")
        else:
            check_placeholders(
                "def",
                definition.name,
                tables["def"][definition.name],
                len(definition.points),
            )
    if problems:
        raise TemplateError(problems)
    log.info(
        "loaded %d predicate, %d question, %d definition templates",
        len(tables["pred"]),
        len(tables["question"]),
        len(tables["def"]),
    )
    return TemplateSet(
        by_predicate=tables["pred"],
        by_definition=tables["def"],
        question_templates=tables["question"],
        locale=locale,
    )


def _fill(template: str, args: tuple[str, ...]) -> str:
    return _PLACEHOLDER.sub(lambda m: args[int(m.group(1))].upper(), template)


def _sentence(text: str) -> str:
    text = text[0].upper() + text[1:]
    if not text.endswith("."):
        text += "."
    return text


def render_statement(stmt: Statement, templates: TemplateSet) -> str:
    """Prose phrase for one canonical statement (no capitalisation)."""
    try:
        template = templates.by_predicate[stmt.pred]
    except KeyError:
        raise MissingTemplate(f"pred.{stmt.pred}") from None
    return _fill(template, stmt.args)


@dataclass(frozen=True)
class TextualProblem:
    clauses: tuple[str, ...]
    question: str
    answer: tuple[str, ...]

    def as_text(self) -> str:
        lines = list(self.clauses)
        lines.append(self.question)
        lines.append("")
        lines.append("Proof:")
        for i, sentence in enumerate(self.answer, start=1):
            lines.append(f"{i}. {sentence}")
        return "\n".join(lines) + "\n"


def render_text(problem: QualifiedProblem, templates: TemplateSet) -> TextualProblem:
    clauses = []
    for entry in problem.exd.entries:
        try:
            template = templates.by_definition[entry.name]
        except KeyError:
            raise MissingTemplate(f"def.{entry.name}") from None
        clauses.append(_sentence(_fill(template, entry.args)))

    concl = problem.conclusion
    try:
        question = _fill(templates.question_templates[concl.pred], concl.args)
    except KeyError:
        raise MissingTemplate(f"question.{concl.pred}") from None

    answer = []
    for step in problem.proof:
        ants = ", ".join(render_statement(a, templates) for a in step.antecedents)
        derived = render_statement(step.consequent, templates)
        answer.append(_sentence(f"{ants} ⟹ {derived}  [{step.rule_id}]"))
    return TextualProblem(tuple(clauses), _sentence(question), tuple(answer))


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True)
class DiagramElement:
    """One drawable, anchored in scene coordinates.

    kinds: point (one anchor, labelled) / segment (two anchors) /
    circle (centre anchor + radius) / tick (half-segment anchors) /
    right_angle (corner plus one point on each ray).
    """

    kind: str
    anchors: tuple[tuple[float, float], ...]
    label: str = ""
    radius: float = 0.0


@dataclass(frozen=True)
class DiagramSpec:
    elements: tuple[DiagramElement, ...]
    width: float = 400.0
    height: float = 400.0
    margin: float = 0.10  # fraction of each canvas dimension kept clear


_STROKE = "#1a1a1a"
_POINT_RADIUS = 2.5
_TICK_HALF = 4.0
_ANGLE_MARK = 7.0
_LABEL_OFFSET = 11.0
_LABEL_CLEARANCE = 8.0
_FONT_SIZE = 13


def _span(points: list[tuple[float, float]]) -> tuple[tuple[float, float], tuple[float, float]]:
    """The two mutually farthest points — the drawn extent of a collinear set."""
    best = (points[0], points[1])
    best_d = -1.0
    for i, p in enumerate(points):
        for q in points[i + 1 :]:
            d = (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2
            if d > best_d:
                best_d = d
                best = (p, q)
    return best


def _circumcenter(
    a: tuple[float, float], b: tuple[float, float], c: tuple[float, float]
) -> tuple[float, float]:
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    ux = (
        (a[0] ** 2 + a[1] ** 2) * (b[1] - c[1])
        + (b[0] ** 2 + b[1] ** 2) * (c[1] - a[1])
        + (c[0] ** 2 + c[1] ** 2) * (a[1] - b[1])
    ) / d
    uy = (
        (a[0] ** 2 + a[1] ** 2) * (c[0] - b[0])
        + (b[0] ** 2 + b[1] ** 2) * (a[0] - c[0])
        + (c[0] ** 2 + c[1] ** 2) * (b[0] - a[0])
    ) / d
    return (ux, uy)


class _Board:
    """Accumulates deduplicated diagram elements in construction order."""

    def __init__(self, scene: NumericScene) -> None:
        self.pos = scene.positions
        self.elements: list[DiagramElement] = []
        self._segments: set[frozenset[str]] = set()
        self._circles: set[tuple] = set()

    def point(self, name: str) -> None:
        self.elements.append(DiagramElement("point", (self.pos[name],), label=name))

    def segment(self, a: str, b: str) -> None:
        key = frozenset((a, b))
        if a == b or key in self._segments:
            return
        self._segments.add(key)
        self.elements.append(DiagramElement("segment", (self.pos[a], self.pos[b])))

    def line(self, *names: str) -> None:
        """One segment spanning a known-collinear point set."""
        p, q = _span([self.pos[n] for n in dict.fromkeys(names)])
        self.elements.append(DiagramElement("segment", (p, q)))

    def circle(self, centre: tuple[float, float], radius: float) -> None:
        key = (round(centre[0], 6), round(centre[1], 6), round(radius, 6))
        if key in self._circles:
            return
        self._circles.add(key)
        self.elements.append(DiagramElement("circle", (centre,), radius=radius))

    def tick(self, a: str, b: str) -> None:
        self.elements.append(DiagramElement("tick", (self.pos[a], self.pos[b])))

    def right_angle(self, corner: str, ray1: str, ray2: str) -> None:
        self.elements.append(
            DiagramElement(
                "right_angle", (self.pos[corner], self.pos[ray1], self.pos[ray2])
            )
        )


def build_diagram(
    exd: ExDefinitionSet,
    scene: NumericScene,
    width: float = 400.0,
    height: float = 400.0,
) -> DiagramSpec:
    """Walk the construction and collect drawables, entry by entry."""
    board = _Board(scene)
    pos = scene.positions
    for entry in exd.entries:
        args = entry.args
        for name in entry.introduced:
            board.point(name)
        kind = entry.name
        if kind == "segment":
            board.segment(args[0], args[1])
        elif kind in ("triangle", "iso_triangle", "right_triangle"):
            a, b, c = args
            board.segment(a, b)
            board.segment(b, c)
            board.segment(c, a)
            if kind == "iso_triangle":
                board.tick(a, b)
                board.tick(a, c)
            elif kind == "right_triangle":
                board.right_angle(b, a, c)
        elif kind == "midpoint":
            x, a, b = args
            board.line(a, b, x)
            board.tick(x, a)
            board.tick(x, b)
        elif kind == "midline":
            x, y, a, b, c = args
            board.segment(a, b)
            board.segment(a, c)
            board.segment(b, c)
            board.segment(x, y)
            board.tick(x, a)
            board.tick(x, b)
            board.tick(y, a)
            board.tick(y, c)
        elif kind == "on_line":
            board.line(args[1], args[2], args[0])
        elif kind == "on_circle":
            x, o, a = args
            board.circle(pos[o], math.dist(pos[o], pos[a]))
        elif kind == "on_bline":
            x, a, b = args
            board.segment(a, b)
            board.segment(x, a)
            board.segment(x, b)
            board.tick(x, a)
            board.tick(x, b)
        elif kind == "equidistant":
            x, a, b, c = args
            for other in (a, b, c):
                board.segment(x, other)
                board.tick(x, other)
        elif kind == "circumcenter":
            x, a, *_ = args
            board.circle(pos[x], math.dist(pos[x], pos[a]))
        elif kind == "on_circum":
            _, a, b, c = args
            centre = _circumcenter(pos[a], pos[b], pos[c])
            board.circle(centre, math.dist(centre, pos[a]))
        elif kind == "reflect":
            x, a, b = args
            board.line(a, b, x)
            board.tick(b, a)
            board.tick(b, x)
        elif kind == "foot":
            x, a, b, c = args
            board.line(b, c, x)
            board.segment(a, x)
            far = b if math.dist(pos[x], pos[b]) >= math.dist(pos[x], pos[c]) else c
            board.right_angle(x, a, far)
        elif kind == "mirror":
            x, p, a, b = args
            board.segment(a, b)
            board.segment(p, x)
        elif kind == "parallel":
            x, a, b, c = args
            board.segment(a, b)
            board.segment(c, x)
        elif kind == "parallelogram":
            x, a, b, c = args
            board.segment(a, b)
            board.segment(b, c)
            board.segment(c, x)
            board.segment(x, a)
        elif kind == "chords":
            x, a, b, c, d = args
            centre = _circumcenter(pos[a], pos[b], pos[c])
            board.circle(centre, math.dist(centre, pos[a]))
            board.line(a, b, x)
            board.line(c, d, x)
        elif kind == "perp_at":
            x, a, b, c = args
            board.segment(a, b)
            board.segment(c, x)
        elif kind == "line_line_meet":
            x, a, b, c, d = args
            board.line(a, b, x)
            board.line(c, d, x)
        elif kind == "line_circle_meet":
            x, a, b, o, c = args
            board.line(a, b, x)
            board.circle(pos[o], math.dist(pos[o], pos[c]))
        elif kind == "circle_circle_meet":
            x, o, a, w, b = args
            board.circle(pos[o], math.dist(pos[o], pos[a]))
            board.circle(pos[w], math.dist(pos[w], pos[b]))
        elif kind == "on_line_perp":
            x, a, b, c, d = args
            board.line(a, b, x)
            board.segment(x, c)
            board.segment(c, d)
            board.right_angle(c, x, d)
    return DiagramSpec(elements=tuple(board.elements), width=width, height=height)


def _bbox(spec: DiagramSpec) -> tuple[float, float, float, float]:
    xs: list[float] = []
    ys: list[float] = []
    for el in spec.elements:
        for x, y in el.anchors:
            if el.kind == "circle":
                xs.extend((x - el.radius, x + el.radius))
                ys.extend((y - el.radius, y + el.radius))
            else:
                xs.append(x)
                ys.append(y)
    return min(xs), min(ys), max(xs), max(ys)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def to_svg(spec: DiagramSpec) -> str:
    """Deterministic SVG 1.1 text, one element per line.

    Scene coordinates are mapped with a uniform scale (aspect preserved,
    y flipped so "up" stays up) into the canvas minus its margin; tick
    marks, right-angle marks and label offsets are sized in canvas pixels.
    """
    x0, y0, x1, y1 = _bbox(spec)
    width, height = spec.width, spec.height
    inner_w = width * (1.0 - 2.0 * spec.margin)
    inner_h = height * (1.0 - 2.0 * spec.margin)
    bw = max(x1 - x0, 1e-12)
    bh = max(y1 - y0, 1e-12)
    scale = min(inner_w / bw, inner_h / bh)
    pad_x = (width - bw * scale) / 2.0
    pad_y = (height - bh * scale) / 2.0

    def cmap(p: tuple[float, float]) -> tuple[float, float]:
        return (pad_x + (p[0] - x0) * scale, height - (pad_y + (p[1] - y0) * scale))

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    ]

    # labels are placed radially away from the diagram centre, then nudged
    # apart (later label moves) until no pair sits closer than the clearance
    points = [el for el in spec.elements if el.kind == "point"]
    if points:
        cx = sum(cmap(el.anchors[0])[0] for el in points) / len(points)
        cy = sum(cmap(el.anchors[0])[1] for el in points) / len(points)
    else:
        cx = cy = 0.0
    labels: list[tuple[str, float, float, float, float]] = []
    for el in points:
        px, py = cmap(el.anchors[0])
        dx, dy = px - cx, py - cy
        norm = math.hypot(dx, dy)
        if norm < 1e-9:
            dx, dy = 0.7071, -0.7071
        else:
            dx, dy = dx / norm, dy / norm
        labels.append((el.label.upper(), px + dx * _LABEL_OFFSET, py + dy * _LABEL_OFFSET, dx, dy))
    for j in range(len(labels)):
        name, lx, ly, dx, dy = labels[j]
        for _ in range(4):
            if all(
                math.hypot(lx - ox, ly - oy) >= _LABEL_CLEARANCE
                for _, ox, oy, _, _ in labels[:j]
            ):
                break
            lx += dx * _LABEL_CLEARANCE
            ly += dy * _LABEL_CLEARANCE
        lx = min(max(lx, 4.0), spec.width - 4.0)
        ly = min(max(ly, 10.0), spec.height - 3.0)
        labels[j] = (name, lx, ly, dx, dy)
    label_iter = iter(labels)

    for el in spec.elements:
        if el.kind == "point":
            px, py = cmap(el.anchors[0])
            name, lx, ly, _, _ = next(label_iter)
            lines.append(
                f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(_POINT_RADIUS)}" '
                f'fill="{_STROKE}"/>'
            )
            lines.append(
                f'<text x="{_fmt(lx)}" y="{_fmt(ly)}" font-size="{_FONT_SIZE}" '
                f'font-family="serif" font-style="italic" text-anchor="middle" '
                f'fill="{_STROKE}">{escape(name)}</text>'
            )
        elif el.kind == "segment":
            (ax, ay), (bx, by) = (cmap(el.anchors[0]), cmap(el.anchors[1]))
            lines.append(
                f'<line x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                f'stroke="{_STROKE}" stroke-width="1.2"/>'
            )
        elif el.kind == "circle":
            ox, oy = cmap(el.anchors[0])
            lines.append(
                f'<circle cx="{_fmt(ox)}" cy="{_fmt(oy)}" r="{_fmt(el.radius * scale)}" '
                f'fill="none" stroke="{_STROKE}" stroke-width="1.2"/>'
            )
        elif el.kind == "tick":
            (ax, ay), (bx, by) = (cmap(el.anchors[0]), cmap(el.anchors[1]))
            mx, my = (ax + bx) / 2.0, (ay + by) / 2.0
            norm = math.hypot(bx - ax, by - ay)
            if norm < 1e-9:
                continue
            nx, ny = -(by - ay) / norm, (bx - ax) / norm
            lines.append(
                f'<line x1="{_fmt(mx - nx * _TICK_HALF)}" y1="{_fmt(my - ny * _TICK_HALF)}" '
                f'x2="{_fmt(mx + nx * _TICK_HALF)}" y2="{_fmt(my + ny * _TICK_HALF)}" '
                f'stroke="{_STROKE}" stroke-width="1.2" class="tick"/>'
            )
        elif el.kind == "right_angle":
            q = cmap(el.anchors[0])
            one = cmap(el.anchors[1])
            two = cmap(el.anchors[2])
            u = (one[0] - q[0], one[1] - q[1])
            v = (two[0] - q[0], two[1] - q[1])
            un = math.hypot(*u)
            vn = math.hypot(*v)
            if un < 1e-9 or vn < 1e-9:
                continue
            u = (u[0] / un * _ANGLE_MARK, u[1] / un * _ANGLE_MARK)
            v = (v[0] / vn * _ANGLE_MARK, v[1] / vn * _ANGLE_MARK)
            pts = (
                (q[0] + u[0], q[1] + u[1]),
                (q[0] + u[0] + v[0], q[1] + u[1] + v[1]),
                (q[0] + v[0], q[1] + v[1]),
            )
            path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
            lines.append(
                f'<polyline points="{path}" fill="none" stroke="{_STROKE}" '
                f'stroke-width="1.0" class="right-angle"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_diagram(problem: QualifiedProblem) -> str:
    return to_svg(build_diagram(problem.exd, problem.scene))
