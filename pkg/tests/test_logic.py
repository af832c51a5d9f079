import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kbscript import parse_formula, parse_program
from kbscript.errors import ParseError
from kbscript.logic import (
    INT, NAT, And, Exists, ExistsOne, Forall, Implies, Not, Or, Predicate, Sort, Vocabulary,
    check_formula, check_well_formed, desugar, elem_key, free_variables, stratify, walk,
)
from oracles import World, holds

VOC = """
vocabulary V {
  type Row isa nat
  type Col isa nat
  type Num isa nat
  type Block isa nat
  type Name
  Sudoku(Row,Col) : Num
  InBlock(Block,Row,Col)
  P(Name)
  Q(Name)
}
"""


@pytest.fixture(scope="module")
def voc():
    return parse_program(VOC).vocabularies[0]


def test_builtin_sorts():
    assert NAT.parent is INT
    assert NAT.is_subsort_of(INT)
    assert not INT.is_subsort_of(NAT)


def test_user_sorts_inherit_numeric(voc):
    assert voc.sort("Row").numeric
    assert not voc.sort("Name").numeric


def test_element_order_ints_before_names():
    elems = ["b", 3, "a", -1, 10]
    assert sorted(elems, key=elem_key) == [-1, 3, 10, "a", "b"]


def test_duplicate_symbol_rejected():
    with pytest.raises(ParseError):
        parse_program("vocabulary V { type T P(T) P(T) }")


def test_extends_resolves_symbols():
    prog = parse_program("""
    vocabulary A { type T P(T) }
    vocabulary B { extern vocabulary A Q(T) }
    """)
    b = prog.vocabularies[1]
    assert b.symbol("P", 1) is not None
    assert b.sort("T") is not None


def test_sudoku_theory_well_formed(sudoku_theory):
    assert check_well_formed(sudoku_theory) == []


def test_unknown_symbol_diagnostic(voc):
    diags = check_formula(parse_formula_unchecked("! x[Name] : Undeclared(x)", voc), voc)
    assert len(diags) == 1
    assert "unknown symbol" in diags[0].message


def parse_formula_unchecked(text, voc):
    from kbscript.parser import Parser
    from kbscript.lexer import Lexer, TokenStream

    return Parser().formula_from_tokens(TokenStream(Lexer(text, "<t>")), voc)


def test_sort_mismatch_diagnostic(voc):
    f = parse_formula_unchecked("! b[Block] c[Col] : InBlock(b,c,c)", voc)
    diags = check_formula(f, voc)
    assert len(diags) == 1
    assert "argument 2 of InBlock/3 expects sort Row, got Col" in diags[0].message
    swapped = parse_formula_unchecked("! r[Row] b[Block] c[Col] : InBlock(r,b,c)", voc)
    assert len(check_formula(swapped, voc)) == 2


def test_free_variables(voc):
    f = parse_formula("Sudoku(r,c) = n", voc)
    assert [v.name for v in free_variables(f)] == ["r", "c", "n"]
    g = parse_formula("! r n : ?1 c : Sudoku(r,c) = n", voc)
    assert free_variables(g) == []
    h = parse_formula("? c : InBlock(b,r,c)", voc)
    assert [v.name for v in free_variables(h)] == ["b", "r"]


def test_free_variable_sorts_are_inferred(voc):
    f = parse_formula("Sudoku(r,c) = n", voc)
    assert {v.name: v.sort.name for v in free_variables(f)} == {"r": "Row", "c": "Col", "n": "Num"}


def test_desugar_implication(voc):
    f = parse_formula('P("a") => Q("a")', voc)
    d = desugar(f)
    assert isinstance(d, Or)
    assert isinstance(d.args[0], Not)


def test_desugar_removes_exists_one(voc):
    f = parse_formula("?1 x[Name] : P(x)", voc)
    d = desugar(f)
    assert not any(isinstance(n, (ExistsOne, Implies)) for n in walk(d))
    assert isinstance(d, Exists)


def _name_world(p_true, q_true=()):
    return World({"Name": ["a", "b"]}, {"P": set(p_true), "Q": set(q_true)}, {})


def test_exists_one_models_match_desugaring(voc):
    f = parse_formula("?1 x[Name] : P(x)", voc)
    d = desugar(f)
    models_f, models_d = [], []
    for bits in itertools.product([False, True], repeat=2):
        ts = {(e,) for e, b in zip(["a", "b"], bits) if b}
        w = _name_world(ts)
        if holds(f, w, {}):
            models_f.append(ts)
        if holds(d, w, {}):
            models_d.append(ts)
    assert models_f == models_d == [{("b",)}, {("a",)}]


FORMULAS = [
    "?1 x[Name] : P(x) & ~Q(x)",
    "! x[Name] : P(x) <=> (?1 y[Name] : Q(y) | x = y)",
    "(P(\"a\") => Q(\"b\")) <=> ~(? x[Name] : P(x) => Q(x))",
    "?1 x[Name] y[Name] : P(x) & Q(y)",
]


@pytest.mark.parametrize("text", FORMULAS)
def test_desugar_idempotent_and_equivalent(voc, text):
    f = parse_formula(text, voc)
    d = desugar(f)
    assert desugar(d) == d
    for pbits in itertools.product([False, True], repeat=4):
        p = {(e,) for e, b in zip(["a", "b"], pbits[:2]) if b}
        q = {(e,) for e, b in zip(["a", "b"], pbits[2:]) if b}
        w = _name_world(p, q)
        assert holds(f, w, {}) == holds(d, w, {})


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(FORMULAS), min_size=1, max_size=3),
       st.sets(st.sampled_from(["a", "b"])), st.sets(st.sampled_from(["a", "b"])))
def test_desugar_preserves_truth_of_conjunctions(voc, texts, p, q):
    f = And(tuple(parse_formula(t, voc) for t in texts))
    w = _name_world({(x,) for x in p}, {(x,) for x in q})
    assert holds(f, w, {}) == holds(desugar(f), w, {})


def test_stratify_orders_negation():
    prog = parse_program("""
    vocabulary V { type T isa nat  E(T,T) R(T,T) S(T) }
    theory D : V {
      { ! x y : R(x,y) <- E(x,y).
        ! x y z : R(x,z) <- R(x,y) & E(y,z).
        ! x : S(x) <- ~R(x,x). }
    }
    """)
    t = prog.theories[0]
    strata, diags = stratify(t)
    assert diags == []
    names = {s.name: lvl for s, lvl in strata.items()}
    assert names["S"] > names["R"]


def test_recursion_through_negation_rejected():
    with pytest.raises(ParseError) as e:
        parse_program("""
        vocabulary V { type T isa nat  A(T) B(T) }
        theory D : V { { ! x : A(x) <- ~B(x).  ! x : B(x) <- ~A(x). } }
        """)
    assert "negation" in str(e.value)


def test_vocabulary_api_without_parser():
    v = Vocabulary("W")
    t = Sort("T")
    v.add_sort(t)
    p = Predicate("P", (t,))
    v.add_symbol(p)
    assert v.symbol("P", 1) is p
    assert v.sort("T") is t
    assert [s.name for s in v.all_sorts()] == ["T"]


def test_forall_node_shape(voc):
    f = parse_formula("! r c b : InBlock(b,r,c) <=> b = ((r-1)/3)*3 + ((c-1)/3) + 1", voc)
    assert isinstance(f, Forall)
    assert [v.sort.name for v in f.vars] == ["Row", "Col", "Block"]
