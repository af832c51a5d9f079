import itertools

import pytest

from kbscript import (
    INCONSISTENT, SolverOptions, apply_definition, entails, eval_definition, model_check,
    model_expand, parse_formula, propagate, query, render_structure,
)
from kbscript.errors import NotTwoValuedError, OpenSymbolUnknownError, ShapeError
from helpers import grid_string, parse_grid, program, sudoku_structure


def shift_grid():
    return "".join(str(((r - 1) * 3 + (r - 1) // 3 + (c - 1)) % 9 + 1)
                   for r in range(1, 10) for c in range(1, 10))


def is_valid_sudoku(digits):
    g = [[int(digits[r * 9 + c]) for c in range(9)] for r in range(9)]
    full = set(range(1, 10))
    rows = all(set(row) == full for row in g)
    cols = all({g[r][c] for r in range(9)} == full for c in range(9))
    blocks = all({g[br + i][bc + j] for i in range(3) for j in range(3)} == full
                 for br in (0, 3, 6) for bc in (0, 3, 6))
    return rows and cols and blocks


PROP = """
vocabulary V { p q }
theory Or : V { p | q. ~(p & q). }
theory Bad : V { p. ~p. }
theory Imp : V { p => q. }
theory Weak : V { p | q. }
theory Empty : V { }
structure S : V { }
structure PTrue : V { p = true q = false }
"""


@pytest.fixture(scope="module")
def prop():
    return program(PROP)


def test_two_models_of_exclusive_or(prop):
    models = model_expand(prop.resolve("Or"), prop.resolve("S"), SolverOptions(nrmodels=0))
    assert len(models) == 2
    v = prop.resolve("V")
    p, q = v.symbol("p", 0), v.symbol("q", 0)
    assert sorted((m.truth(p, ()), m.truth(q, ())) for m in models) == [(False, True), (True, False)]


def test_unsat_gives_no_models(prop):
    assert model_expand(prop.resolve("Bad"), prop.resolve("S"), SolverOptions(nrmodels=0)) == []


def test_nrmodels_limits_output(prop):
    assert len(model_expand(prop.resolve("Or"), prop.resolve("S"))) == 1


def test_input_not_modified(prop):
    s = prop.resolve("S")
    before = s.clone()
    model_expand(prop.resolve("Or"), s, SolverOptions(nrmodels=0))
    assert s == before


def test_filled_grid_has_one_model(sudoku_program, sudoku_theory):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    digits = shift_grid()
    assert is_valid_sudoku(digits)
    s = sudoku_structure(voc, digits)
    models = model_expand(sudoku_theory, s, SolverOptions(nrmodels=0))
    assert len(models) == 1
    assert grid_string(models[0]) == digits


def _two_valued_grid(voc, digits):
    s = sudoku_structure(voc, digits)
    ib = voc.symbol("InBlock", 3)
    s.materialize(ib, lambda b, r, c: b == ((r - 1) // 3) * 3 + ((c - 1) // 3) + 1)
    return s


def test_model_check_shift_pattern(sudoku_program, sudoku_theory):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    assert model_check(sudoku_theory, _two_valued_grid(voc, shift_grid()))


def test_model_check_swapped_cells(sudoku_program, sudoku_theory):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    d = list(shift_grid())
    d[0], d[1] = d[1], d[0]
    d = "".join(d)
    assert not is_valid_sudoku(d)
    assert not model_check(sudoku_theory, _two_valued_grid(voc, d))


def test_model_check_empty_theory(prop):
    s = prop.resolve("PTrue")
    assert model_check(prop.resolve("Empty"), s)


def test_model_check_needs_two_valued(prop):
    with pytest.raises(NotTwoValuedError):
        model_check(prop.resolve("Or"), prop.resolve("S"))


def test_propagate_implication(prop):
    v = prop.resolve("V")
    s = prop.resolve("S").clone()
    s.make_true(v.symbol("p", 0), ())
    for mode in ("approx", "exact"):
        out = propagate(prop.resolve("Imp"), s, SolverOptions(propagation=mode))
        assert out.truth(v.symbol("q", 0), ()) is True
    assert s.truth(v.symbol("q", 0), ()) is None


def test_propagate_no_unit_consequence(prop):
    s = prop.resolve("S")
    out = propagate(prop.resolve("Weak"), s)
    assert out == s


def test_propagate_inconsistent(prop):
    out = propagate(prop.resolve("Bad"), prop.resolve("S"))
    assert out is INCONSISTENT
    assert not out


def test_propagate_forces_last_cell_of_row(sudoku_program, sudoku_theory):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    row = shift_grid()[:9]
    s = sudoku_structure(voc, row[:8] + "0" * 73)
    out = propagate(sudoku_theory, s, SolverOptions(propagation="exact"))
    assert out.value(voc.symbol("Sudoku", 2), (1, 9)) == int(row[8])


def test_propagate_never_loses_facts(sudoku_program, sudoku_theory):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    s = sudoku_structure(voc, shift_grid()[:20] + "0" * 61)
    out = propagate(sudoku_theory, s)
    sud = voc.symbol("Sudoku", 2)
    assert s.interp(sud).ct <= out.interp(sud).ct
    assert s.interp(sud).cf <= out.interp(sud).cf


REACH = """
vocabulary V { type N isa nat Edge(N,N) Reach(N,N) }
theory D : V {
  { ! x y : Reach(x,y) <- Edge(x,y).
    ! x y : Reach(x,y) <- ? z : Reach(x,z) & Edge(z,y). }
}
structure S : V { N = {1..3} Edge = {1,2; 2,3} }
structure E : V { N = {1..3} Edge = { } }
structure U : V { N = {1..3} Edge<ct> = {1,2} Edge<cf> = { } }
"""


def test_reach_fixpoint():
    p = program(REACH)
    d = p.resolve("D").definitions[0]
    stats = {}
    out = eval_definition(d, p.resolve("S"), stats)
    reach = p.resolve("V").symbol("Reach", 2)
    assert out[reach] == {(1, 2), (2, 3), (1, 3)}
    assert stats["iterations"] == [2]


def test_reach_empty_edge():
    p = program(REACH)
    out = eval_definition(p.resolve("D").definitions[0], p.resolve("E"))
    assert out[p.resolve("V").symbol("Reach", 2)] == set()


def test_open_symbol_must_be_two_valued():
    p = program(REACH)
    with pytest.raises(OpenSymbolUnknownError):
        eval_definition(p.resolve("D").definitions[0], p.resolve("U"))


def test_apply_definition_is_two_valued():
    p = program(REACH)
    out = apply_definition(p.resolve("D").definitions[0], p.resolve("S"))
    assert out.is_two_valued()


def test_in_block_as_definition(sudoku_program, empty_grid):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    p = program("""
    vocabulary W { type Row isa nat type Col isa nat type Block isa nat InBlock(Block,Row,Col) }
    theory D : W { { ! r c b : InBlock(b,r,c) <- b = ((r-1)/3)*3 + ((c-1)/3) + 1. } }
    structure S : W { Row = {1..9} Col = {1..9} Block = {1..9} }
    """)
    out = eval_definition(p.resolve("D").definitions[0], p.resolve("S"))
    (tuples,) = out.values()
    expected = {(b, r, c) for b, r, c in itertools.product(range(1, 10), repeat=3)
                if b == ((r - 1) // 3) * 3 + ((c - 1) // 3) + 1}
    assert tuples == expected and len(tuples) == 81


def test_query_reflexive_equality():
    p = program("vocabulary V { type T isa nat } structure S : V { T = {1..2} }")
    voc = p.resolve("V")
    res = query(parse_formula("x = x", voc, free_sorts={"x": voc.sort("T")}), p.resolve("S"))
    assert res.rows == [(1,), (2,)]


def test_query_in_block(sudoku_program):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    s = _two_valued_grid(voc, shift_grid())
    res = query(parse_formula("InBlock(1,r,c)", voc), s)
    assert res.variables == ("r", "c")
    assert res.rows == [(r, c) for r in range(1, 4) for c in range(1, 4)]


def test_query_every_row_has_five(sudoku_program):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    s = _two_valued_grid(voc, shift_grid())
    res = query(parse_formula("? c : Sudoku(r,c) = 5", voc), s)
    assert res.rows == [(r,) for r in range(1, 10)]


def test_query_needs_two_valued(empty_grid):
    with pytest.raises(NotTwoValuedError):
        query(parse_formula("? c : Sudoku(r,c) = 5", empty_grid.vocabulary), empty_grid)


ENT = """
vocabulary V { type T P(T) }
theory All : V { ! x : P(x). }
theory Some : V { ? x : P(x). }
theory Nothing : V { }
structure S : V { T = {a} }
"""


def test_entailed():
    p = program(ENT)
    verdict, model = entails(p.resolve("All"), p.resolve("Some"), p.resolve("S"))
    assert verdict == "entailed" and model is None


def test_counterexample():
    p = program(ENT)
    verdict, model = entails(p.resolve("Nothing"), p.resolve("All"), p.resolve("S"))
    assert verdict == "counterexample"
    assert model.truth(p.resolve("V").symbol("P", 1), ("a",)) is False
    assert model_check(p.resolve("Nothing"), model)
    assert not model_check(p.resolve("All"), model)


SHIDOKU = """
vocabulary V {
  type Row isa nat type Col isa nat type Num isa nat type Block isa nat
  Sudoku(Row,Col) : Num
  InBlock(Block,Row,Col)
}
theory Latin : V {
  ! r n : ?1 c : Sudoku(r,c) = n.
  ! c n : ?1 r : Sudoku(r,c) = n.
  ! r c b : InBlock(b,r,c) <=> b = ((r-1)/2)*2 + ((c-1)/2) + 1.
}
theory Blocks : V { ! b n : ?1 r c : InBlock(b,r,c) & Sudoku(r,c) = n. }
structure S : V { Row = {1..4} Col = {1..4} Num = {1..4} Block = {1..4} }
"""


def latin_square_counts():
    """(latin squares, of which also block-valid) for order 4."""
    perms = list(itertools.permutations(range(1, 5)))
    latin = sudoku = 0
    for rows in itertools.product(perms, repeat=4):
        if any(len({rows[r][c] for r in range(4)}) != 4 for c in range(4)):
            continue
        latin += 1
        sudoku += all(len({rows[br + i][bc + j] for i in (0, 1) for j in (0, 1)}) == 4
                      for br in (0, 2) for bc in (0, 2))
    return latin, sudoku


def test_shidoku_regression():
    latin, valid = latin_square_counts()
    assert (latin, valid) == (576, 288)
    p = program(SHIDOKU)
    t1, t2 = p.resolve("Latin"), p.resolve("Blocks")
    verdict, model = entails(t1, t2, p.resolve("S"))
    # half of the 4x4 latin squares violate a block, so a counterexample exists
    assert verdict == "counterexample"
    assert model_check(t1, model)
    assert not model_check(t2, model)


def test_render_empty_grid(empty_grid):
    text = render_structure(empty_grid, "grid", empty_grid.vocabulary.symbol("Sudoku", 2), 9, 9)
    lines = text.splitlines()
    assert len(lines) == 11
    assert lines[0] == ". . . | . . . | . . ."
    assert lines[3] == "------+-------+------"
    assert parse_grid(text) == "0" * 81


def test_render_known_cell(empty_grid):
    sud = empty_grid.vocabulary.symbol("Sudoku", 2)
    empty_grid.make_true(sud, (1, 1, 5))
    text = render_structure(empty_grid, "grid", sud, 9, 9)
    assert text.splitlines()[0].startswith("5 . .")


def test_render_round_trips_digits(sudoku_program):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    digits = shift_grid()[:40] + "0" * 41
    s = sudoku_structure(voc, digits)
    assert parse_grid(render_structure(s, "grid", voc.symbol("Sudoku", 2), 9, 9)) == digits


def test_render_shape_errors(empty_grid):
    voc = empty_grid.vocabulary
    with pytest.raises(ShapeError):
        render_structure(empty_grid, "grid", voc.symbol("InBlock", 3), 9, 9)
    with pytest.raises(ShapeError):
        render_structure(empty_grid, "grid", voc.symbol("Sudoku", 2), 10, 9)
    with pytest.raises(ShapeError):
        render_structure(empty_grid, "pie")


def test_render_text_is_structure_block(prop):
    assert render_structure(prop.resolve("PTrue")).startswith("structure PTrue : V {")
