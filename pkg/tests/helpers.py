"""Small shared helpers for the test modules."""

from pathlib import Path

from kbscript import Structure, parse_program

ROOT = Path(__file__).resolve().parent.parent
PROGRAMS = ROOT / "programs"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def program(text: str):
    return parse_program(text, file="<test>")


def sudoku_structure(voc, digits: str, n: int = 9) -> Structure:
    """Puzzle structure from a row-major digit string, 0 for empty cells."""
    s = Structure(voc, "puzzle")
    for sort in ("Row", "Col", "Num", "Block"):
        s.set_domain(sort, range(1, n + 1))
    sud = voc.symbol("Sudoku", 2)
    for i, ch in enumerate(digits):
        if ch != "0":
            s.make_true(sud, (i // n + 1, i % n + 1, int(ch)))
    return s


def grid_string(s, n: int = 9) -> str:
    sud = s.vocabulary.symbol("Sudoku", 2)
    out = []
    for r in range(1, n + 1):
        for c in range(1, n + 1):
            v = s.value(sud, (r, c))
            out.append("0" if v is None else str(v))
    return "".join(out)


def parse_grid(text: str) -> str:
    """Digits of a rendered grid (``.`` for unknown) in row-major order."""
    out = []
    for line in text.splitlines():
        cells = [tok for tok in line.split() if tok not in ("|",) and not set(tok) <= set("-+")]
        if not cells:
            continue
        out.extend("0" if tok == "." else tok for tok in cells)
    return "".join(out)
