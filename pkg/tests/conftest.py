"""Pytest configuration for the repository.

This conftest adjusts `sys.path` so tests import the packages from `src/`
rather than an installed copy, and provides a few shared fixtures.
"""
from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
TESTS = ROOT / "tests"

# 1. Remove repo root from sys.path if present
sys.path = [p for p in sys.path if p not in ("", str(ROOT))]

# 2. Force src/ to be first (tests/ too, for the oracles helper)
sys.path.insert(0, str(SRC))
sys.path.insert(1, str(TESTS))

from backdoorforge.presets import make_two_equation_sem  # noqa: E402
from backdoorforge.sem import LinearSem  # noqa: E402


@pytest.fixture
def two_equation_sem() -> LinearSem:
    """Two-equation SEM with a single confounding direction."""
    return make_two_equation_sem()


@pytest.fixture
def textbook_sem() -> LinearSem:
    """W -> X <- Z -> Y, X -> Y: {Z} is the only valid adjustment set."""
    from backdoorforge.models import GraphSpec, Node

    g = GraphSpec(
        nodes=(Node("W", "W"), Node("X", "X"), Node("Y", "Y"), Node("Z", "Z")),
        edges=(("W", "X"), ("Z", "X"), ("Z", "Y"), ("X", "Y")),
    )
    coeffs = {("W", "X"): 1.0, ("Z", "X"): 1.0, ("Z", "Y"): 1.0, ("X", "Y"): 0.5}
    return LinearSem(graph=g, coeffs=coeffs, noise_vars={i: 1.0 for i in g.ids})
