import os
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
ROOT = TESTS.parent
sys.path.insert(0, str(TESTS))

from kbscript import parse_file  # noqa: E402


@pytest.fixture(scope="session")
def sudoku_program():
    return parse_file(ROOT / "programs" / "sudoku.kbp")


@pytest.fixture(scope="session")
def sudoku_theory(sudoku_program):
    return sudoku_program.resolve("sudoku::sudokuTheory")


@pytest.fixture
def empty_grid(sudoku_program):
    from kbscript import Structure

    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    s = Structure(voc, "grid")
    for sort in ("Row", "Col", "Num", "Block"):
        s.set_domain(sort, range(1, 10))
    return s


def pytest_configure(config):
    os.environ.setdefault("PYTHONHASHSEED", "0")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
