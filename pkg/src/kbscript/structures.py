"""Finite, possibly three-valued structures over a vocabulary.

Every symbol is interpreted by two disjoint tuple sets: ``ct`` (certainly
true) and ``cf`` (certainly false).  Functions are stored as their graph, so
a tuple of a function symbol is ``args + (value,)``.  The unknown set is
always derived, never stored.
"""

from __future__ import annotations

import itertools
import re

from .errors import ConflictError, DomainError, OracleError, StructureError, UnboundedSortError
from .logic import NAT, Function, Predicate, Sort, Vocabulary, elem_key, tuple_key


class Interp:
    __slots__ = ("ct", "cf")

    def __init__(self, ct=(), cf=()):
        self.ct = set(ct)
        self.cf = set(cf)

    def copy(self) -> Interp:
        return Interp(self.ct, self.cf)

    def __eq__(self, other) -> bool:
        return isinstance(other, Interp) and self.ct == other.ct and self.cf == other.cf

    def __repr__(self) -> str:
        return f"Interp(ct={sorted(self.ct, key=tuple_key)}, cf={sorted(self.cf, key=tuple_key)})"


class Structure:
    def __init__(self, vocabulary: Vocabulary, name: str = "S", path: tuple[str, ...] | None = None):
        self.vocabulary = vocabulary
        self.name = name
        self.path = path or (name,)
        self.domains: dict[str, tuple] = {}
        self.interps: dict = {}
        self.frozen: set = set()
        # (symbol, procedure path) pairs waiting for the script runtime
        self.procedural: list = []
        self._domset_cache: dict[str, frozenset] = {}

    def __repr__(self) -> str:
        return f"Structure({'::'.join(self.path)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return (self.vocabulary.path == other.vocabulary.path and self.domains == other.domains
                and self.procedural == other.procedural
                and all(self.interp(s) == other.interp(s) for s in self.vocabulary.all_symbols()))

    __hash__ = None

    # -- domains -----------------------------------------------------------

    def set_domain(self, sort: Sort | str, elements) -> None:
        if isinstance(sort, str):
            found = self.vocabulary.sort(sort)
            if found is None:
                raise DomainError(f"unknown sort {sort}")
            sort = found
        elems = []
        for e in elements:
            if isinstance(e, bool) or not isinstance(e, (int, str)):
                raise DomainError(f"invalid domain element {e!r} for sort {sort}")
            if sort.numeric and not isinstance(e, int):
                raise DomainError(f"sort {sort} is numeric; got {e!r}")
            if sort.is_subsort_of(NAT) and isinstance(e, int) and e < 0:
                raise DomainError(f"sort {sort} is a subsort of nat; got {e}")
            elems.append(e)
        self.domains[sort.name] = tuple(sorted(set(elems), key=elem_key))
        self._domset_cache.clear()

    def has_domain(self, sort: Sort) -> bool:
        try:
            self.domain(sort)
            return True
        except UnboundedSortError:
            return False

    def domain(self, sort: Sort) -> tuple:
        if sort.name in self.domains:
            return self.domains[sort.name]
        subs = [s for s in self.vocabulary.all_sorts() if s.parent == sort]
        parts = [self.domain(s) for s in subs if self.has_domain(s)]
        if not parts:
            raise UnboundedSortError(f"sort {sort} has no finite domain in structure {self.name}")
        return tuple(sorted(set().union(*parts), key=elem_key))

    def domset(self, sort: Sort) -> frozenset:
        s = self._domset_cache.get(sort.name)
        if s is None:
            s = self._domset_cache[sort.name] = frozenset(self.domain(sort))
        return s

    # -- symbols -----------------------------------------------------------

    def symbol(self, name: str, arity: int | None = None):
        cands = [s for s in self.vocabulary.all_symbols()
                 if s.name == name and (arity is None or s.arity == arity)]
        if len(cands) != 1:
            raise StructureError(f"no unique symbol named {name} in vocabulary {self.vocabulary.name}")
        return cands[0]

    def interp(self, sym) -> Interp:
        i = self.interps.get(sym)
        if i is None:
            if self.vocabulary.symbol(sym.name, sym.arity) != sym:
                raise StructureError(f"symbol {sym} is not in vocabulary {self.vocabulary.name}")
            i = self.interps[sym] = Interp()
        return i

    def tuple_space(self, sym):
        return itertools.product(*(self.domain(s) for s in sym.graph_sorts))

    def space_size(self, sym) -> int:
        n = 1
        for s in sym.graph_sorts:
            n *= len(self.domain(s))
        return n

    def in_space(self, sym, tup) -> bool:
        sorts = sym.graph_sorts
        return len(tup) == len(sorts) and all(e in self.domset(s) for e, s in zip(tup, sorts))

    def _check(self, sym, tup) -> tuple:
        tup = tuple(tup)
        if not self.in_space(sym, tup):
            raise DomainError(f"tuple {format_tuple(sym, tup)} is outside the tuple space of {sym}")
        if sym in self.frozen:
            raise StructureError(f"{sym} is interpreted by a procedure and cannot be changed")
        return tup

    def make_true(self, sym, tup) -> Structure:
        tup = self._check(sym, tup)
        i = self.interp(sym)
        if tup in i.ct:
            return self
        if tup in i.cf:
            raise ConflictError(f"{sym.name}({format_tuple(sym, tup)}) is certainly false")
        if isinstance(sym, Function):
            args, out = tup[:-1], tup[-1]
            others = [args + (v,) for v in self.domain(sym.out) if v != out]
            for t in others:
                if t in i.ct:
                    raise ConflictError(f"{sym.name}({format_tuple(sym, t)}) already holds")
            i.ct.add(tup)
            i.cf.update(others)
        else:
            i.ct.add(tup)
        return self

    def make_false(self, sym, tup) -> Structure:
        tup = self._check(sym, tup)
        i = self.interp(sym)
        if tup in i.ct:
            raise ConflictError(f"{sym.name}({format_tuple(sym, tup)}) is certainly true")
        i.cf.add(tup)
        return self

    def make_unknown(self, sym, tup) -> Structure:
        tup = self._check(sym, tup)
        i = self.interp(sym)
        i.ct.discard(tup)
        i.cf.discard(tup)
        return self

    def truth(self, sym, tup):
        """True, False or None (unknown)."""
        i = self.interps.get(sym)
        if i is None:
            return None
        if tup in i.ct:
            return True
        if tup in i.cf:
            return False
        return None

    def value(self, sym: Function, args):
        """Output of a function on ``args`` if certainly known, else None."""
        i = self.interps.get(sym)
        if i is None:
            return None
        args = tuple(args)
        for v in self.domain(sym.out):
            if args + (v,) in i.ct:
                return v
        return None

    def unknown_tuples(self, sym) -> set:
        i = self.interp(sym)
        return {t for t in self.tuple_space(sym) if t not in i.ct and t not in i.cf}

    def is_two_valued(self, symbols=None) -> bool:
        for sym in symbols if symbols is not None else self.vocabulary.all_symbols():
            i = self.interp(sym)
            if len(i.ct) + len(i.cf) != self.space_size(sym):
                return False
        return True

    def materialize(self, sym, oracle) -> Structure:
        """Interpret ``sym`` by calling ``oracle(*args)`` on every tuple.

        Predicates expect a boolean back; functions expect a domain element.
        """
        if isinstance(sym, Function):
            inputs = itertools.product(*(self.domain(s) for s in sym.sorts))
            out_dom = self.domset(sym.out)
        else:
            inputs = self.tuple_space(sym)
        ct, cf = set(), set()
        for args in inputs:
            try:
                r = oracle(*args)
            except Exception as e:
                raise OracleError(f"procedure for {sym} failed on ({format_elems(args)}): {e}") from e
            if isinstance(sym, Function):
                if isinstance(r, bool) or r not in out_dom:
                    raise OracleError(f"procedure for {sym} returned {r!r} on ({format_elems(args)}),"
                                      f" not an element of {sym.out}")
                for v in self.domain(sym.out):
                    (ct if v == r else cf).add(args + (v,))
            else:
                if not isinstance(r, bool):
                    raise OracleError(f"procedure for {sym} returned non-boolean {r!r} on ({format_elems(args)})")
                (ct if r else cf).add(args)
        self.interps[sym] = Interp(ct, cf)
        self.frozen.add(sym)
        return self

    def clone(self, name: str | None = None) -> Structure:
        s = Structure(self.vocabulary, name or self.name, self.path if name is None else None)
        s.domains = dict(self.domains)
        s.interps = {k: v.copy() for k, v in self.interps.items()}
        s.frozen = set(self.frozen)
        s.procedural = list(self.procedural)
        return s

    def validate(self) -> None:
        """Raise StructureError if any representation invariant is broken."""
        for sort in self.vocabulary.all_sorts():
            if sort.name in self.domains and sort.parent is not None and self.has_domain(sort.parent):
                if not set(self.domains[sort.name]) <= set(self.domain(sort.parent)):
                    raise StructureError(f"domain of {sort} is not contained in domain of {sort.parent}")
        for sym, i in self.interps.items():
            if i.ct & i.cf:
                raise StructureError(f"{sym}: tuples both certainly true and certainly false")
            for t in i.ct | i.cf:
                if not self.in_space(sym, t):
                    raise StructureError(f"{sym}: tuple {t} outside tuple space")
            if isinstance(sym, Function):
                seen = set()
                for t in i.ct:
                    if t[:-1] in seen:
                        raise StructureError(f"{sym}: two values for input {t[:-1]}")
                    seen.add(t[:-1])


# --------------------------------------------------------------------------
# text format

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED = {"true", "false", "procedure"}


def format_elem(e) -> str:
    if isinstance(e, int):
        return str(e)
    if _IDENT.match(e) and e not in _RESERVED:
        return e
    return '"' + e.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_elems(t) -> str:
    return ",".join(format_elem(e) for e in t)


def format_tuple(sym, t) -> str:
    if isinstance(sym, Function):
        args = format_elems(t[:-1]) if len(t) > 1 else "()"
        return f"{args}->{format_elem(t[-1])}"
    return format_elems(t) if t else "()"


def format_domain(elems) -> str:
    if len(elems) >= 2 and all(isinstance(e, int) for e in elems) and \
            list(elems) == list(range(elems[0], elems[-1] + 1)):
        return f"{{{elems[0]}..{elems[-1]}}}"
    return "{" + ", ".join(format_elem(e) for e in elems) + "}"


def _format_set(sym, tuples) -> str:
    if not tuples:
        return "{ }"
    return "{ " + "; ".join(format_tuple(sym, t) for t in sorted(tuples, key=tuple_key)) + " }"


def format_structure(s: Structure, indent: str = "  ") -> str:
    """Canonical, byte-stable text of a structure block."""
    lines = [f"structure {s.name} : {'::'.join(s.vocabulary.path)} {{"]
    for sort in s.vocabulary.all_sorts():
        if sort.name in s.domains:
            lines.append(f"{indent}{sort.name} = {format_domain(s.domains[sort.name])}")
    pending = {sym: path for sym, path in s.procedural}
    for sym in s.vocabulary.all_symbols():
        if sym in pending:
            lines.append(f"{indent}{sym.name} = procedure {'::'.join(pending[sym])}")
            continue
        i = s.interps.get(sym, Interp())
        try:
            two_valued = len(i.ct) + len(i.cf) == s.space_size(sym)
        except UnboundedSortError:
            two_valued = False
        if two_valued and sym.arity == 0 and isinstance(sym, Predicate):
            lines.append(f"{indent}{sym.name} = {'true' if i.ct else 'false'}")
        elif two_valued and sym.arity == 0 and len(i.ct) == 1:
            (t,) = i.ct
            lines.append(f"{indent}{sym.name} = {format_elem(t[0])}")
        elif two_valued:
            lines.append(f"{indent}{sym.name} = {_format_set(sym, i.ct)}")
        else:
            lines.append(f"{indent}{sym.name}<ct> = {_format_set(sym, i.ct)}")
            lines.append(f"{indent}{sym.name}<cf> = {_format_set(sym, i.cf)}")
    lines.append("}")
    return "\n".join(lines)
