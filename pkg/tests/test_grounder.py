import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kbscript import ground
from kbscript.parser import parse_term
from kbscript.errors import DivisionByZero, RangeError, UnboundedSortError
from kbscript.grounder import eval_ground_term, ground_aggregate, int_div, int_mod
from kbscript.logic import Cmp
from kbscript.solver import solve
from helpers import program

PAB = """
vocabulary V { type T P(T) }
theory A : V { ! x : P(x). }
structure S : V { T = {a; b} }
"""


def test_forall_gives_unit_clauses():
    p = program(PAB)
    gt = ground(p.resolve("A"), p.resolve("S"))
    assert len(gt.table) == 2
    assert sorted(gt.clauses) == [[1], [2]]


def test_known_atom_is_fixed():
    p = program(PAB.replace("T = {a; b}", "T = {a; b} P<ct> = {a} P<cf> = { }"))
    gt = ground(p.resolve("A"), p.resolve("S"))
    a = gt.table.id(p.resolve("V").symbol("P", 1), ("a",))
    b = gt.table.id(p.resolve("V").symbol("P", 1), ("b",))
    assert gt.clauses == [[b]]
    assert a in gt.fixed_true


def test_sudoku_grounding_shape(sudoku_theory, empty_grid):
    gt = ground(sudoku_theory, empty_grid)
    sud = empty_grid.vocabulary.symbol("Sudoku", 2)
    graph = [i for i in gt.table if gt.table.atom(i)[0] is sud]
    assert len(graph) == 729 == 9 ** 3
    # 81 per ?1 sentence, plus one output group per cell for the function
    groups = {tuple(g) for g in gt.exactly_one}
    assert len(gt.exactly_one) == 3 * 81 + 81
    assert len(groups) == len(gt.exactly_one)
    assert all(len(g) == 9 for g in gt.exactly_one)


def test_unbounded_sort_raises():
    p = program("vocabulary V { type T P(T) } theory A : V { ! x : P(x). } structure S : V { }")
    with pytest.raises(UnboundedSortError):
        ground(p.resolve("A"), p.resolve("S"))


@pytest.mark.parametrize("r,c,block", [(1, 1, 1), (9, 9, 9), (4, 7, 6), (5, 5, 5), (3, 4, 2)])
def test_block_formula(sudoku_program, empty_grid, r, c, block):
    voc = sudoku_program.resolve("sudoku::sudokuVoc")
    sorts = {"r": voc.sort("Row"), "c": voc.sort("Col")}
    t = parse_term("((r-1)/3)*3 + ((c-1)/3) + 1", voc, sorts)
    assert eval_ground_term(t, {"r": r, "c": c}, empty_grid) == block


def test_division_by_zero(empty_grid):
    voc = empty_grid.vocabulary
    with pytest.raises(DivisionByZero):
        eval_ground_term(parse_term("1/0", voc), {}, empty_grid)


def test_range_error(empty_grid):
    voc = empty_grid.vocabulary
    with pytest.raises(RangeError):
        eval_ground_term(parse_term("100 - 1", voc), {}, empty_grid)


def test_division_by_zero_while_grounding():
    p = program("""
    vocabulary V { type T isa nat P(T) }
    theory A : V { ! x[T] : P(x / (x - 1)). }
    structure S : V { T = {0..2} }
    """)
    with pytest.raises(DivisionByZero):
        ground(p.resolve("A"), p.resolve("S"))


@given(st.integers(-50, 50), st.integers(-50, 50).filter(lambda b: b != 0))
def test_truncating_division(a, b):
    q, r = int_div(a, b), int_mod(a, b)
    assert a == b * q + r
    assert abs(r) < abs(b)
    assert r == 0 or (r > 0) == (a > 0)
    assert q == int(a / b)


AGG = """
vocabulary V { type T isa nat type N P(T) Q(N) }
structure S : V { T = {1..2} N = {a; b} }
"""
AGG_ONLY = """
vocabulary U {{ type T isa nat type N {sym} }}
structure S : U {{ T = {{1..2}} N = {{a; b}} }}
theory A : U {{ {text}. }}
"""


def agg_models(formula_text):
    sym = "Q(N)" if "Q(" in formula_text else "P(T)"
    p = program(AGG_ONLY.format(sym=sym, text=formula_text))
    gt = ground(p.resolve("A"), p.resolve("S"))
    models = solve(gt)
    syms = [gt.table.atom(i) for i in gt.table]
    return gt, sorted(tuple(sorted(str(syms[i - 1][1][0]) for i in gt.table if m[i] > 0)) for m in models)


def test_card_lower_bound_one_is_a_clause():
    gt, models = agg_models("#{ x[N] : Q(x) } >= 1")
    assert gt.aggregates == []
    atom_clauses = [c for c in gt.clauses if all(abs(l) <= len(gt.table) for l in c)]
    assert atom_clauses == [[1, 2]]
    assert models == [("a",), ("a", "b"), ("b",)]


def test_sum_bound_zero():
    p = program(AGG + "theory A : V { }")
    voc = p.resolve("V")
    from kbscript import parse_formula

    f = parse_formula("sum{ x[T] : P(x) : x } =< 0", voc)
    assert isinstance(f, Cmp)
    lit, gt = ground_aggregate(f.left, f.op, 0, {}, p.resolve("A"), p.resolve("S"))
    (agg,) = gt.aggregates
    assert sorted(agg.weights) == [1, 2]
    assert agg.head == lit
    _, models = agg_models("sum{ x[T] : P(x) : x } =< 0")
    assert models == [()]


def test_card_equal_to_domain_size():
    gt, models = agg_models("#{ x[N] : Q(x) } = 2")
    assert models == [("a", "b")]


@pytest.mark.parametrize("text,expected", [
    ("min{ x[T] : P(x) : x } = 2", [("2",)]),
    ("max{ x[T] : P(x) : x } >= 2", [("1", "2"), ("2",)]),
    ("max{ x[T] : P(x) : x } < 1", [()]),
    ("#{ x[T] : P(x) } ~= 1", [(), ("1", "2")]),
])
def test_aggregate_models_match_enumeration(text, expected):
    _, models = agg_models(text)
    assert models == sorted(expected)


def test_ground_models_biject_with_completions():
    p = program("""
    vocabulary V { type T isa nat F(T) : T P(T) }
    theory A : V { ! x : P(x) <=> F(x) = x. ?1 x : P(x). }
    structure S : V { T = {1..3} }
    """)
    gt = ground(p.resolve("A"), p.resolve("S"))
    models = solve(gt)
    # brute force over all functions T -> T
    count = 0
    for vals in itertools.product([1, 2, 3], repeat=3):
        fixed = [x for x, v in zip([1, 2, 3], vals) if v == x]
        count += len(fixed) == 1
    assert len(models) == count == 12
