from __future__ import annotations

import pytest

from reflexguard.boxes import polyhedron_from_boxes

CUBE = [((0, 0, 0), (1, 1, 1))]
FIGURE2 = [((0, 0, 0), (2, 1, 1)), ((0, 0, 1), (1, 2, 2))]
L_PRISM = [((0, 0, 0), (2, 1, 1)), ((0, 0, 1), (1, 1, 2))]
TOWER3 = [((0, 0, 0), (3, 1, 1)), ((0, 0, 1), (2, 1, 2)), ((0, 0, 2), (1, 1, 3))]
RING = [((0, 0, 0), (3, 1, 1)), ((0, 2, 0), (3, 3, 1)), ((0, 0, 1), (1, 3, 2)), ((2, 0, 1), (3, 3, 2))]
# a unit cube with one octant removed: reflex edges in all three directions
NOTCHED = [((0, 0, 0), (2, 2, 1)), ((0, 0, 1), (2, 1, 2)), ((0, 1, 1), (1, 2, 2))]


@pytest.fixture
def poly():
    return polyhedron_from_boxes


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
