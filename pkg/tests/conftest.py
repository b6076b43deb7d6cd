from __future__ import annotations

import pytest

from bigramsey import codings
from bigramsey.acceptance import devlin_colorings


@pytest.fixture(scope="session")
def devlin40():
    c = codings.build_devlin(40, seed=0)
    return c, codings.emit_structure(c)


@pytest.fixture(scope="session")
def devlin_cols():
    """(depth, emitted structure, [gamma_1, gamma_2, gamma_3]) at the stabilized depth."""
    return devlin_colorings(3)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
