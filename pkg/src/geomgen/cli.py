"""Command-line interface: table building, generation, evaluation, render.

Four subcommands share a data root (packaged files by default, or the
GEOMGEN_DATA_DIR environment variable): ``build-table`` samples random
constructions and records which rules their saturations use;
``generate`` turns a knowledge-point request into problem.json/.txt/.svg
files; ``eval`` runs generation over a record file and re-verifies every
accepted problem; ``render`` re-renders text and diagram from a stored
problem.json.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from collections import Counter
from importlib import resources
from pathlib import Path

from .constructions import ExDefinitionSet
from .generator import (
    BANDS,
    GenerationRequest,
    QualifiedProblem,
    generate,
    problem_json,
    reverify,
)
from .language import Repository, load_repository, parse_statement
from .numeric import construct_scene, derive_seed
from .proofs import Derivation
from .rendering import load_templates, render_diagram, render_text
from .table import EmptyEntry, TableBuildConfig, UnknownKP, build_table, load_table, save_table

log = logging.getLogger(__name__)

_SOURCES = ("jgex231", "geoqa", "custom")


class DatasetError(ValueError):
    """A record file defect, reported with its line number."""


def _data_dir() -> Path:
    env = os.environ.get("GEOMGEN_DATA_DIR")
    if env:
        return Path(env)
    return Path(str(resources.files(__package__).joinpath("data")))


def _load_repo(args: argparse.Namespace) -> Repository:
    root = _data_dir()
    rules = args.rules or str(root / "rules.sdeg")
    defs = args.defs or str(root / "defs.sdeg")
    return load_repository(rules, defs)


def _load_template_set(args: argparse.Namespace, repo: Repository):
    path = getattr(args, "templates", None) or str(_data_dir() / "templates.en.txt")
    return load_templates(path, repo)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _engine_limits(table) -> dict:
    cfg = table.build_config
    return {
        "max_rounds": cfg.max_rounds if cfg else 8,
        "max_facts": cfg.max_facts if cfg else 600,
        "triangle_sharing": cfg.triangle_sharing if cfg else True,
    }


def _kp_sort_key(kp: str):
    head, _, tail = kp.partition("_")
    return (head, int(tail)) if tail.isdigit() else (kp, 0)


# ---------------------------------------------------------------------------
# subcommands


def cmd_build_table(args: argparse.Namespace) -> int:
    repo = _load_repo(args)
    config = TableBuildConfig(iterations=args.iterations, n_max=args.nmax, seed=args.seed)
    table = build_table(repo, config)
    save_table(table, args.out)
    populated = {
        kp: len(sets)
        for kp, sets in sorted(table.entries.items(), key=lambda kv: _kp_sort_key(kv[0]))
        if sets
    }
    print(
        f"wrote {args.out}: {sum(populated.values())} construction sets "
        f"across {len(populated)} knowledge points"
    )
    for kp, count in populated.items():
        print(f"  {kp:<5} {count}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    repo = _load_repo(args)
    table = load_table(args.table, repo)
    templates = _load_template_set(args, repo)
    kps = tuple(part for part in (s.strip() for s in args.kps.split(",")) if part)
    try:
        req = GenerationRequest(
            kps, args.difficulty, seed=args.seed, max_candidates=args.count
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        result = generate(req, table, repo)
    except (UnknownKP, EmptyEntry) as exc:
        print(
            f"error: no recorded constructions for knowledge point {exc.args[0]}",
            file=sys.stderr,
        )
        return 1
    out_root = Path(args.out_dir)
    for i, problem in enumerate(result.problems, start=1):
        pdir = out_root / f"problem_{i:02d}"
        _atomic_write(
            pdir / "problem.json",
            json.dumps(problem_json(problem), indent=2, ensure_ascii=False) + "\n",
        )
        _atomic_write(pdir / "problem.txt", render_text(problem, templates).as_text())
        _atomic_write(pdir / "problem.svg", render_diagram(problem))
    print(f"qualified: {len(result.problems)} (attempts: {result.attempts})")
    for name, count in sorted(result.failures.items()):
        print(f"  {name}: {count}")
    return 0


def read_records(path, repo: Repository) -> list[dict]:
    """Parse a line-delimited record file, validating every field."""
    records: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            where = f"{path}: line {lineno}"
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{where}: invalid JSON ({exc.msg})") from None
            if not isinstance(rec, dict):
                raise DatasetError(f"{where}: expected an object")
            for name in ("id", "knowledge_points", "source"):
                if name not in rec:
                    raise DatasetError(f"{where}: missing field {name!r}")
            kps = rec["knowledge_points"]
            if not isinstance(kps, list) or not kps:
                raise DatasetError(
                    f"{where}: knowledge_points must be a non-empty list"
                )
            unknown = [kp for kp in kps if kp not in repo.rule_by_id]
            if unknown:
                raise DatasetError(f"{where}: unknown knowledge point {unknown[0]}")
            if rec["source"] not in _SOURCES:
                raise DatasetError(
                    f"{where}: source must be one of {', '.join(_SOURCES)}"
                )
            if rec.get("difficulty") is not None and rec["difficulty"] not in BANDS:
                raise DatasetError(f"{where}: unknown difficulty {rec['difficulty']!r}")
            records.append(rec)
    return records


def cmd_eval(args: argparse.Namespace) -> int:
    repo = _load_repo(args)
    table = load_table(args.table, repo)
    limits = _engine_limits(table)
    records = read_records(args.dataset, repo)
    started = time.time()

    rows = []
    tallies: Counter = Counter()
    accepted = 0
    for rec in records:
        req = GenerationRequest(
            tuple(rec["knowledge_points"]),
            rec.get("difficulty") or "easy",
            seed=derive_seed(args.seed, rec["id"]),
        )
        try:
            result = generate(req, table, repo)
        except (UnknownKP, EmptyEntry) as exc:
            rows.append(
                {
                    "id": rec["id"],
                    "source": rec["source"],
                    "requested_kps": list(req.knowledge_points),
                    "difficulty": req.difficulty,
                    "qualified_count": 0,
                    "failures": {"no_constructions_for": exc.args[0]},
                }
            )
            continue
        for problem in result.problems:
            rev = reverify(problem, repo, **limits)
            accepted += 1
            tallies["NS"] += bool(rev.replayed)
            verdict = rev.verdict
            tallies["CC"] += bool(verdict and verdict.clause_complete)
            tallies["CKP"] += bool(verdict and verdict.kp_complete)
            tallies["CD"] += bool(verdict and verdict.difficulty_match)
        rows.append(
            {
                "id": rec["id"],
                "source": rec["source"],
                "requested_kps": list(req.knowledge_points),
                "difficulty": req.difficulty,
                "qualified_count": len(result.problems),
                "failures": dict(sorted(result.failures.items())),
            }
        )

    def rate(name: str) -> float | None:
        return tallies[name] / accepted if accepted else None

    report = {
        "records": rows,
        "metrics": {
            "NS": rate("NS"),
            "CC": rate("CC"),
            "CKP": rate("CKP"),
            "CD": rate("CD"),
            "accepted_problems": accepted,
        },
        "human_metrics": {
            name: "requires human evaluation" for name in ("GF", "LC", "DC", "CS")
        },
        "runtime": {
            "seconds": round(time.time() - started, 3),
            "records": len(records),
        },
    }
    _atomic_write(Path(args.report), json.dumps(report, indent=2) + "\n")
    print(f"evaluated {len(records)} records: {accepted} accepted problems")
    for name in ("NS", "CC", "CKP", "CD"):
        value = rate(name)
        print(f"  {name}: {'null' if value is None else format(value, '.2f')}")
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    repo = _load_repo(args)
    templates = _load_template_set(args, repo)
    path = Path(args.problem)
    data = json.loads(path.read_text(encoding="utf-8"))
    exd = ExDefinitionSet.deserialize(data["exdefs"], repo)
    scene = construct_scene(exd, data["seed"])
    proof = tuple(
        Derivation(
            i,
            step["rule"],
            tuple(parse_statement(a) for a in step["antecedents"]),
            parse_statement(step["derived"]),
        )
        for i, step in enumerate(data["proof_steps"])
    )
    reqd = data["request"]
    req = GenerationRequest(
        tuple(reqd["knowledge_points"]),
        reqd["difficulty"],
        seed=reqd["seed"],
        max_candidates=reqd["max_candidates"],
    )
    problem = QualifiedProblem(
        exd=exd,
        conclusion=parse_statement(data["question_formal"]),
        proof=proof,
        used_rules=tuple(data["used_rules"]),
        scene=scene,
        request=req,
        seed=data["seed"],
    )
    out_dir = Path(args.out_dir) if args.out_dir else path.parent
    _atomic_write(out_dir / "problem.txt", render_text(problem, templates).as_text())
    _atomic_write(out_dir / "problem.svg", render_diagram(problem))
    print(f"rendered {out_dir / 'problem.txt'} and {out_dir / 'problem.svg'}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_repo_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--defs", help="definitions catalog (default: packaged)")
    sub.add_argument("--rules", help="rule catalog (default: packaged)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomgen",
        description="Generate plane-geometry proof problems from knowledge points.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "build-table",
        help="sample constructions and record which rules their proofs use",
    )
    _add_repo_flags(p)
    p.add_argument("--out", required=True, help="output table (line-delimited JSON)")
    p.add_argument("--iterations", type=_positive, required=True)
    p.add_argument("--nmax", type=_positive, default=2, help="definitions per sample")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_build_table)

    p = sub.add_parser("generate", help="generate qualified problems from a request")
    _add_repo_flags(p)
    p.add_argument("--table", required=True)
    p.add_argument("--kps", required=True, help="comma-separated ids, e.g. K_7,K_25")
    p.add_argument("--difficulty", choices=BANDS, default="easy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive, default=4, help="max problems to keep")
    p.add_argument("--templates", help="template file (default: packaged)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="run generation over a record file and report")
    _add_repo_flags(p)
    p.add_argument("--dataset", required=True, help="records.jsonl")
    p.add_argument("--table", required=True)
    p.add_argument("--report", required=True, help="output report JSON")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="re-render text and SVG from a problem.json")
    _add_repo_flags(p)
    p.add_argument("--problem", required=True)
    p.add_argument("--templates", help="template file (default: packaged)")
    p.add_argument("--out-dir", help="default: alongside the problem file")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
