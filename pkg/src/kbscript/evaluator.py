"""Direct evaluation of formulas and terms in a two-valued structure.

Shares the grounder's conventions: a function applied outside its argument
domains (or where a partial function has no value) is undefined, and an
atom or comparison containing an undefined term is false.
"""

from __future__ import annotations

import itertools

from .errors import GroundingError, NotTwoValuedError
from .grounder import aggregate_value, arith, compare
from .logic import (
    Agg, And, App, Arith, Atom, Cmp, Const, Equiv, Exists, ExistsOne, Forall, Function, Implies,
    Not, Or, Truth, Unresolved, Var,
)
from .structures import Structure, format_elems


class Undefined(Exception):
    pass


class Evaluator:
    def __init__(self, s: Structure, overlay: dict | None = None):
        self.s = s
        # symbol -> set of true tuples, overriding the structure
        self.overlay = overlay if overlay is not None else {}

    def holds(self, sym, tup) -> bool:
        if isinstance(sym, Unresolved):
            raise GroundingError(f"unknown symbol {sym}")
        if not self.s.in_space(sym, tup):
            return False
        ov = self.overlay.get(sym)
        if ov is not None:
            return tup in ov
        t = self.s.truth(sym, tup)
        if t is None:
            raise NotTwoValuedError(f"{sym.name}({format_elems(tup)}) is unknown")
        return t

    def fvalue(self, sym: Function, args: tuple):
        if isinstance(sym, Unresolved):
            raise GroundingError(f"unknown symbol {sym}")
        if not all(a in self.s.domset(x) for a, x in zip(args, sym.sorts)):
            raise Undefined()
        found = None
        for v in self.s.domain(sym.out):
            if self.holds(sym, args + (v,)):
                found = v
                break
        if found is None:
            raise Undefined()
        return found

    def term(self, t, env):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return t.value
        if isinstance(t, App):
            return self.fvalue(t.symbol, tuple(self.term(a, env) for a in t.args))
        if isinstance(t, Arith):
            return arith(t.op, [self.term(a, env) for a in t.args])
        if isinstance(t, Agg):
            weights = []
            for b in self.bindings(t.vars, env):
                if not self.formula(t.cond, b):
                    continue
                if t.weight is None:
                    weights.append(1)
                    continue
                try:
                    w = self.term(t.weight, b)
                except Undefined:
                    continue
                if not isinstance(w, int):
                    raise GroundingError(f"aggregate weight {w!r} is not an integer")
                weights.append(w)
            return aggregate_value(t.kind, weights)
        raise TypeError(t)

    def bindings(self, vs, env):
        names = [v.name for v in vs]
        for combo in itertools.product(*(self.s.domain(v.sort) for v in vs)):
            b = dict(env)
            b.update(zip(names, combo))
            yield b

    def formula(self, f, env) -> bool:
        if isinstance(f, Truth):
            return f.value
        if isinstance(f, Atom):
            try:
                args = tuple(self.term(a, env) for a in f.args)
            except Undefined:
                return False
            return self.holds(f.pred, args)
        if isinstance(f, Cmp):
            try:
                left, right = self.term(f.left, env), self.term(f.right, env)
            except Undefined:
                return False
            return compare(f.op, left, right)
        if isinstance(f, Not):
            return not self.formula(f.arg, env)
        if isinstance(f, And):
            return all(self.formula(a, env) for a in f.args)
        if isinstance(f, Or):
            return any(self.formula(a, env) for a in f.args)
        if isinstance(f, Implies):
            return not self.formula(f.left, env) or self.formula(f.right, env)
        if isinstance(f, Equiv):
            return self.formula(f.left, env) == self.formula(f.right, env)
        if isinstance(f, Forall):
            return all(self.formula(f.body, b) for b in self.bindings(f.vars, env))
        if isinstance(f, Exists):
            return any(self.formula(f.body, b) for b in self.bindings(f.vars, env))
        if isinstance(f, ExistsOne):
            n = 0
            for b in self.bindings(f.vars, env):
                if self.formula(f.body, b):
                    n += 1
                    if n > 1:
                        return False
            return n == 1
        raise TypeError(f)
