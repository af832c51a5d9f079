import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kbscript import Structure, format_structure
from kbscript.errors import ConflictError, ParseError, DomainError, OracleError, StructureError, UnboundedSortError
from helpers import program

SMALL = """
vocabulary V {
  type T isa nat
  type Color
  P(T)
  F(T) : T
  partial G(T) : T
  C : Color
}
structure S : V {
  T = {1..3}
  Color = {red; green; "light blue"}
  P<ct> = {1}
  P<cf> = {3}
  F = {1->2; 2->3; 3->1}
  G<ct> = {1->1}
  G<cf> = { }
  C = red
}
"""


def block(sudoku_program, name):
    return sudoku_program.resolve(name)


def sud(s):
    return s.vocabulary.symbol("Sudoku", 2)


def test_empty_grid_all_unknown(empty_grid):
    assert len(empty_grid.unknown_tuples(sud(empty_grid))) == 729
    assert not empty_grid.is_two_valued()


def test_make_true_function_fills_cf(empty_grid):
    s = empty_grid
    f = sud(s)
    s.make_true(f, (3, 4, 7))
    i = s.interp(f)
    assert i.ct == {(3, 4, 7)}
    assert i.cf == {(3, 4, k) for k in range(1, 10) if k != 7}
    assert s.value(f, (3, 4)) == 7
    # no propagation into the rest of the row
    assert s.truth(f, (3, 5, 7)) is None
    assert len(s.unknown_tuples(f)) == 720


def test_make_true_conflicts(empty_grid):
    s = empty_grid
    f = sud(s)
    s.make_true(f, (3, 4, 7))
    with pytest.raises(ConflictError):
        s.make_true(f, (3, 4, 5))
    with pytest.raises(ConflictError):
        s.make_false(f, (3, 4, 7))
    s.make_true(f, (3, 4, 7))  # idempotent


def test_make_unknown_clears_only_that_tuple(empty_grid):
    s = empty_grid
    f = sud(s)
    s.make_true(f, (3, 4, 7))
    s.make_unknown(f, (3, 4, 7))
    assert s.truth(f, (3, 4, 7)) is None
    assert s.truth(f, (3, 4, 1)) is False


def test_out_of_space_tuple(empty_grid):
    with pytest.raises(DomainError):
        empty_grid.make_true(sud(empty_grid), (10, 1, 1))


def test_materialize_in_block(empty_grid):
    s = empty_grid
    ib = s.vocabulary.symbol("InBlock", 3)
    s.materialize(ib, lambda b, r, c: b == ((r - 1) // 3) * 3 + ((c - 1) // 3) + 1)
    i = s.interp(ib)
    assert len(i.ct) == 81 and len(i.cf) == 648
    assert s.is_two_valued([ib])
    with pytest.raises(StructureError):
        s.make_false(ib, (1, 1, 1))


def test_materialize_error_names_tuple(empty_grid):
    ib = empty_grid.vocabulary.symbol("InBlock", 3)

    def oracle(b, r, c):
        if (b, r, c) == (2, 5, 6):
            raise ValueError("boom")
        return False

    with pytest.raises(OracleError) as e:
        empty_grid.materialize(ib, oracle)
    assert "(2,5,6)" in str(e.value)


def test_materialize_rejects_non_boolean(empty_grid):
    ib = empty_grid.vocabulary.symbol("InBlock", 3)
    with pytest.raises(OracleError):
        empty_grid.materialize(ib, lambda b, r, c: 1)


def test_parse_and_print_round_trip():
    p = program(SMALL)
    s = p.resolve("S")
    text = format_structure(s)
    assert 'Color = {green, "light blue", red}' in text
    assert "F = { 1->2; 2->3; 3->1 }" in text
    assert "P<ct> = { 1 }" in text and "P<cf> = { 3 }" in text
    assert "C = red" in text
    again = program(SMALL.split("structure")[0] + text).resolve("S")
    assert again == s
    assert format_structure(again) == text


def test_parse_rejects_inconsistent_structure():
    with pytest.raises(ParseError, match="both certainly true and certainly false"):
        program("vocabulary V { type T isa nat P(T) } structure S : V { T = {1..2} P<ct> = {1} P<cf> = {1} }")


def test_clone_is_independent():
    s = program(SMALL).resolve("S")
    c = s.clone()
    p = s.vocabulary.symbol("P", 1)
    c.make_true(p, (2,))
    assert s.truth(p, (2,)) is None
    assert c.truth(p, (2,)) is True


def test_subsort_domain_union():
    p = program("""
    vocabulary V { type A type B isa A type C isa A }
    structure S : V { B = {x; y} C = {y; z} }
    """)
    s = p.resolve("S")
    assert s.domain(s.vocabulary.sort("A")) == ("x", "y", "z")


def test_unbounded_sort():
    s = Structure(program("vocabulary V { type T P(T) }").vocabularies[0])
    with pytest.raises(UnboundedSortError):
        s.domain(s.vocabulary.sort("T"))


def test_negative_in_nat_rejected():
    s = Structure(program("vocabulary V { type T isa nat }").vocabularies[0])
    with pytest.raises(DomainError):
        s.set_domain("T", [-1, 0])


ops = st.lists(st.tuples(st.sampled_from(["true", "false", "unknown"]),
                         st.integers(1, 3), st.integers(1, 3)), max_size=25)


@settings(max_examples=80, deadline=None)
@given(ops)
def test_invariants_hold_under_any_operation_sequence(seq):
    s = program(SMALL).resolve("S").clone()
    f = s.vocabulary.symbol("G", 1)
    for op, a, v in seq:
        try:
            getattr(s, "make_" + op)(f, (a, v))
        except ConflictError:
            pass
        s.validate()
        i = s.interp(f)
        assert not (i.ct & i.cf)
        assert len({t[0] for t in i.ct}) == len(i.ct)
