"""Every jump set built anywhere in the suite is checked against the slicing inequality."""

import pytest

import pweikonal
import pweikonal.render as render_mod
import pweikonal.solution as sol

SLICING = {"jump_sets": 0, "checked": 0, "violations": []}
_orig = sol.jump_sets


def _checked_jump_sets(v):
    out = _orig(v)
    SLICING["jump_sets"] += 1
    for J in out:
        for axis in (1, 2):
            proj, length = sol.slicing_count(J, axis)
            SLICING["checked"] += 1
            if proj > length:
                SLICING["violations"].append((J.component, axis, proj, length))
                raise AssertionError(f"slicing inequality violated on J{J.component}, axis {axis}")
    return out


sol.jump_sets = _checked_jump_sets
render_mod.jump_sets = _checked_jump_sets
pweikonal.jump_sets = _checked_jump_sets


@pytest.fixture
def slicing_registry():
    return SLICING


ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
    if SLICING["checked"]:
        verdict = "PASS" if not SLICING["violations"] else "FAIL"
        terminalreporter.write_line(
            f"{verdict} slicing registry: {SLICING['jump_sets']} jump set computations, "
            f"{SLICING['checked']} projections checked, {len(SLICING['violations'])} violations")


def pytest_collection_modifyitems(items):
    # acceptance last, so the slicing registry has seen the whole suite by criterion 6
    items.sort(key=lambda it: it.module.__name__.endswith("test_acceptance"))
