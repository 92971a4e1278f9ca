from __future__ import annotations

from pathlib import Path

import pytest

from geomgen.language import load_repository
from geomgen.rendering import load_templates
from geomgen.table import TableBuildConfig, build_table

DATA = Path(__file__).resolve().parents[1] / "src" / "geomgen" / "data"


@pytest.fixture(scope="session")
def repo():
    return load_repository(DATA / "rules.sdeg", DATA / "defs.sdeg")


@pytest.fixture(scope="session")
def templates(repo):
    return load_templates(DATA / "templates.en.txt", repo)


@pytest.fixture(scope="session")
def small_table(repo):
    """A quick table build shared by generator/rendering/cli tests."""
    return build_table(repo, TableBuildConfig(iterations=120, n_max=2, seed=0))
