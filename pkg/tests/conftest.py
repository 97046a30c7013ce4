from __future__ import annotations

from pathlib import Path

import pytest

from arbopack import parse_mixed_graph

DATA = Path(__file__).parent / "data"


def load_instance(name: str):
    return parse_mixed_graph((DATA / name).read_text())


@pytest.fixture(scope="session")
def two_root():
    """Canonical two-root mixed instance: 9 vertices, 6 edges, 5 arcs."""
    return load_instance("two_root_mixed.mg")


@pytest.fixture(scope="session")
def infeasible3():
    """Two roots joined through one middle vertex; infeasible."""
    return load_instance("three_vertex_infeasible.mg")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA
