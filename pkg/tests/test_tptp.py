import pytest

from kbscript import check_tptp, export_tptp, parse_file
from kbscript.errors import ExportUnsupportedError
from kbscript.tptp import TPTPSyntaxError
from helpers import FIXTURES, program

PAIRS = sorted(p.stem for p in (FIXTURES / "tptp").glob("*.kbp"))


def export_pair(name):
    prog = parse_file(FIXTURES / "tptp" / f"{name}.kbp")
    return export_tptp(prog.resolve("T1"), prog.resolve("T2"))


def test_five_pairs_present():
    assert PAIRS == ["pair1", "pair2", "pair3", "pair4", "pair5"]


@pytest.mark.parametrize("name", PAIRS)
def test_golden(name):
    text = export_pair(name)
    assert text == (FIXTURES / "tptp" / f"{name}.p").read_text()
    assert check_tptp(text) >= 1


def test_forall_exists_shape():
    p = program("""
    vocabulary V { type T P(T) }
    theory A : V { ! x : P(x). }
    theory B : V { ? x : P(x). }
    """)
    text = export_tptp(p.resolve("A"), p.resolve("B"))
    fofs = [l for l in text.splitlines() if l.startswith("fof(")]
    assert [l.split(",")[1].strip() for l in fofs] == ["axiom", "conjecture"]
    assert check_tptp(text) == 2


def test_aggregate_unsupported():
    p = program("""
    vocabulary V { type T P(T) }
    theory A : V { #{ x : P(x) } >= 1. }
    theory B : V { }
    """)
    with pytest.raises(ExportUnsupportedError):
        export_tptp(p.resolve("A"), p.resolve("B"))


def test_definition_unsupported():
    p = program("""
    vocabulary V { type T P(T) Q(T) }
    theory A : V { { ! x : P(x) <- Q(x). } }
    theory B : V { }
    """)
    with pytest.raises(ExportUnsupportedError):
        export_tptp(p.resolve("B"), p.resolve("A"))


def test_sudoku_exports_with_arithmetic_flag(sudoku_theory):
    empty = program("vocabulary V { } theory E : V { }")
    # the conjecture theory may use a different vocabulary; only its sentences matter
    text = export_tptp(sudoku_theory, empty.resolve("E"))
    header = [l for l in text.splitlines() if l.startswith("%")]
    assert any("arith" in l and "uninterpreted" in l for l in header)
    assert "fof(goal, conjecture, $true)." in text
    assert check_tptp(text) > 4


@pytest.mark.parametrize("bad", [
    "fof(a, axiom, p",
    "fof(a, lemma_x, p).",
    "fof(a, axiom, ! [X] : p(Y)).",
    "fof(a, axiom, (p & )).",
    "cnf(a, axiom, p).",
    "fof(a, axiom, (p | q & r)).",
])
def test_checker_rejects(bad):
    with pytest.raises(TPTPSyntaxError):
        check_tptp(bad)


def test_checker_accepts_comments_and_connectives():
    text = "% c\nfof(a, axiom, ! [X, Y] : ((p(X) <=> ~q(Y)) | (X = Y & X != f(Y)))).\n"
    assert check_tptp(text) == 1
