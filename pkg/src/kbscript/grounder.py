"""Grounding: compile a theory plus a finite structure into propositional form.

Every ground atom of the theory's vocabulary gets an id in an AtomTable
(functions through their graph atoms ``f(args) = v``).  Sentences are
instantiated top-down; subformulas whose truth is fixed by the structure
collapse to constants on the way, everything else becomes a literal.
Compound subformulas get an auxiliary variable tied to its inputs by a full
equivalence (a *gate*), so auxiliary values are always determined by the
atoms and models correspond one-to-one with assignments to atom ids.

Terms built from functions with unknown values are unnested: a ground term
evaluates to a list of ``(guard, value)`` cases where ``guard`` is a
literal (or True) saying that this case is the actual value.
"""

from __future__ import annotations

import collections
import itertools
from dataclasses import dataclass, field

from .errors import DivisionByZero, GroundingError, RangeError, UnboundedSortError
from .logic import (
    Agg, And, App, Arith, Atom, Cmp, Const, Equiv, Exists, ExistsOne, Forall, Function,
    Implies, Not, Or, Predicate, Rule, Theory, Truth, Unresolved, Var, stratify, symbols_in,
)
from .structures import Structure, format_tuple

INF = float("inf")


def int_div(a: int, b: int) -> int:
    """Integer division truncating toward zero."""
    if b == 0:
        raise DivisionByZero("division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def int_mod(a: int, b: int) -> int:
    """Remainder matching truncating division (sign follows the dividend)."""
    if b == 0:
        raise DivisionByZero("modulo by zero")
    return a - b * int_div(a, b)


def compare(op: str, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "~=":
        return a != b
    if isinstance(a, str) or isinstance(b, str):
        raise GroundingError(f"cannot order non-numeric values {a!r} and {b!r}")
    if op == "<":
        return a < b
    if op == "=<":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ValueError(op)


FLIP = {"=": "=", "~=": "~=", "<": ">", ">": "<", "=<": ">=", ">=": "=<"}


def arith(op: str, vals):
    for v in vals:
        if not isinstance(v, int) or isinstance(v, bool):
            raise GroundingError(f"arithmetic on non-integer value {v!r}")
    if op == "+":
        return vals[0] + vals[1]
    if op == "-":
        return vals[0] - vals[1]
    if op == "*":
        return vals[0] * vals[1]
    if op == "/":
        return int_div(vals[0], vals[1])
    if op == "%":
        return int_mod(vals[0], vals[1])
    if op == "abs":
        return abs(vals[0])
    if op == "neg":
        return -vals[0]
    raise ValueError(op)


def aggregate_value(kind: str, weights):
    if kind == "card":
        return len(weights)
    if kind == "sum":
        return sum(weights)
    if kind == "min":
        return min(weights, default=INF)
    return max(weights, default=-INF)


class AtomTable:
    """Bijection between ground atoms ``(symbol, tuple)`` and ids 1..n."""

    def __init__(self):
        self._ids: dict = {}
        self._atoms: list = [None]

    def add(self, sym, tup) -> int:
        key = (sym, tup)
        i = self._ids.get(key)
        if i is None:
            i = self._ids[key] = len(self._atoms)
            self._atoms.append(key)
        return i

    def id(self, sym, tup) -> int | None:
        return self._ids.get((sym, tup))

    def atom(self, i: int):
        return self._atoms[i]

    def __len__(self) -> int:
        return len(self._atoms) - 1

    def __iter__(self):
        return iter(range(1, len(self._atoms)))

    def describe(self, i: int) -> str:
        sym, tup = self._atoms[i]
        if isinstance(sym, Function):
            return f"{sym.name}({format_tuple(sym, tup)})"
        return f"{sym.name}({format_tuple(sym, tup)})" if tup else sym.name


@dataclass
class GroundAggregate:
    """``head <=> kind{lits : weights} op bound`` where entries already known
    to hold contribute ``fixed`` weights."""

    head: int
    kind: str
    op: str
    bound: object
    lits: list
    weights: list
    fixed: list = field(default_factory=list)

    def holds(self, true_weights) -> bool:
        return compare(self.op, aggregate_value(self.kind, list(self.fixed) + list(true_weights)), self.bound)


@dataclass
class GroundRule:
    head: int
    body: int | bool
    stratum: int


class GroundTheory:
    def __init__(self, table: AtomTable):
        self.table = table
        self.nvars = len(table)
        self.clauses: list[list[int]] = []
        self.at_most_one: list[list[int]] = []
        self.exactly_one: list[list[int]] = []
        self.aggregates: list[GroundAggregate] = []
        self.gates: dict[int, tuple] = {}
        self.rules: list[GroundRule] = []
        self.defined: dict[int, int] = {}  # defined atom id -> stratum
        self.fixed_true: set[int] = set()
        self.fixed_false: set[int] = set()

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    @property
    def unsat(self) -> bool:
        return any(not c for c in self.clauses) or bool(self.fixed_true & self.fixed_false)

    # -- definitions -------------------------------------------------------

    def definitions_hold(self, value, stats: dict | None = None) -> bool:
        """Check that defined atoms equal the least fixpoint of their rules,
        stratum by stratum, given ``value(var) -> bool`` for all variables."""
        by_stratum: dict[int, list[GroundRule]] = {}
        for r in self.rules:
            by_stratum.setdefault(r.stratum, []).append(r)
        heads_by_stratum: dict[int, list[int]] = {}
        for h, st in self.defined.items():
            heads_by_stratum.setdefault(st, []).append(h)
        for st in sorted(heads_by_stratum):
            cur = {h: False for h in heads_by_stratum[st]}
            rules = by_stratum.get(st, [])
            rounds = 0
            changed = True
            while changed:
                changed = False
                rounds += 1
                memo: dict = {}
                for r in rules:
                    if cur[r.head]:
                        continue
                    if self._eval(r.body, cur, value, memo):
                        cur[r.head] = True
                        changed = True
            if stats is not None:
                stats.setdefault("rounds", []).append(rounds)
            if any(cur[h] != value(h) for h in cur):
                return False
        return True

    def _eval(self, lit, cur, value, memo) -> bool:
        if lit is True or lit is False:
            return lit
        v = abs(lit)
        if v in cur:
            b = cur[v]
        elif v in self.gates:
            b = memo.get(v)
            if b is None:
                b = memo[v] = self._eval_gate(v, cur, value, memo)
        else:
            b = value(v)
        return b if lit > 0 else not b

    def _eval_gate(self, v, cur, value, memo) -> bool:
        kind, ins = self.gates[v]
        if kind == "and":
            return all(self._eval(i, cur, value, memo) for i in ins)
        if kind == "or":
            return any(self._eval(i, cur, value, memo) for i in ins)
        if kind == "eq":
            return self._eval(ins[0], cur, value, memo) == self._eval(ins[1], cur, value, memo)
        agg = self.aggregates[ins]
        return agg.holds([w for l, w in zip(agg.lits, agg.weights) if self._eval(l, cur, value, memo)])

    # -- debug dump --------------------------------------------------------

    def dump(self) -> str:
        """DIMACS-like text: clauses plus commented sections for the rest."""
        out = [f"p cnf {self.nvars} {len(self.clauses)}"]
        for i in self.table:
            tag = " true" if i in self.fixed_true else " false" if i in self.fixed_false else ""
            out.append(f"c atom {i} {self.table.describe(i)}{tag}")
        for c in self.clauses:
            out.append(" ".join(map(str, c + [0])))
        for g in self.exactly_one:
            out.append("c exactly-one " + " ".join(map(str, g)))
        for g in self.at_most_one:
            out.append("c at-most-one " + " ".join(map(str, g)))
        for v, (kind, ins) in sorted(self.gates.items()):
            if kind != "agg":
                out.append(f"c gate {v} {kind} " + " ".join(map(str, ins)))
        for a in self.aggregates:
            entries = " ".join(f"{l}*{w}" for l, w in zip(a.lits, a.weights))
            fixed = " ".join(map(str, a.fixed))
            out.append(f"c aggregate {a.head} <=> {a.kind} {a.op} {a.bound} : {entries} | fixed {fixed}")
        for r in self.rules:
            out.append(f"c rule stratum {r.stratum} {r.head} <- {r.body}")
        return "\n".join(out) + "\n"


# --------------------------------------------------------------------------


class _Undefined(Exception):
    """A function applied outside its domain or where it has no value."""


class Grounder:
    def __init__(self, theory: Theory, structure: Structure):
        self.theory = theory
        self.s = structure
        self.table = AtomTable()
        self.defined_syms = set(theory.defined_symbols())
        self.symbols = theory.vocabulary.all_symbols()
        for sym in self.symbols:
            if sym in self.s.frozen or not any(p[0] == sym for p in self.s.procedural):
                continue
            raise GroundingError(f"{sym} is interpreted by a procedure that was not materialized")
        for sym in self.symbols:
            for tup in self.s.tuple_space(sym):
                self.table.add(sym, tup)
        self.g = GroundTheory(self.table)
        self.derived: dict[int, bool] = {}
        self._memo: dict = {}

    # -- atoms ---------------------------------------------------------

    def atom_lit(self, sym, tup):
        """Literal (or bool) for a ground atom; False outside the tuple space."""
        if isinstance(sym, Unresolved):
            raise GroundingError(f"unknown symbol {sym}")
        i = self.table.id(sym, tup)
        if i is None:
            return False
        if sym in self.defined_syms:
            return i
        t = self.s.truth(sym, tup)
        if t is not None:
            return t
        d = self.derived.get(i)
        return i if d is None else d

    # -- gates ---------------------------------------------------------

    def mk_and(self, lits):
        lits = sorted(set(lits), key=abs)
        if not lits:
            return True
        if len(lits) == 1:
            return lits[0]
        if any(-l in lits for l in lits):
            return False
        key = ("and", tuple(lits))
        v = self._memo.get(key)
        if v is None:
            v = self._memo[key] = self.g.new_var()
            self.g.gates[v] = ("and", tuple(lits))
            for l in lits:
                self.g.clauses.append([-v, l])
            self.g.clauses.append([v] + [-l for l in lits])
        return v

    def mk_or(self, lits):
        lits = sorted(set(lits), key=abs)
        if not lits:
            return False
        if len(lits) == 1:
            return lits[0]
        if any(-l in lits for l in lits):
            return True
        key = ("or", tuple(lits))
        v = self._memo.get(key)
        if v is None:
            v = self._memo[key] = self.g.new_var()
            self.g.gates[v] = ("or", tuple(lits))
            for l in lits:
                self.g.clauses.append([v, -l])
            self.g.clauses.append([-v] + list(lits))
        return v

    def mk_equiv(self, a, b):
        if isinstance(a, bool):
            return b if a else neg(b)
        if isinstance(b, bool):
            return a if b else neg(a)
        if a == b:
            return True
        if a == -b:
            return False
        key = ("eq", min(a, b, key=abs), max(a, b, key=abs))
        v = self._memo.get(key)
        if v is None:
            v = self._memo[key] = self.g.new_var()
            self.g.gates[v] = ("eq", (a, b))
            self.g.clauses += [[-v, -a, b], [-v, a, -b], [v, a, b], [v, -a, -b]]
        return v

    def mk_agg(self, kind, op, bound, entries):
        """Literal for ``kind{entries} op bound``; entries are (guard, weight)."""
        lits, weights, fixed = [], [], []
        for guard, w in entries:
            if guard is True:
                fixed.append(w)
            elif guard is not False:
                lits.append(guard)
                weights.append(w)
        if not lits:
            return compare(op, aggregate_value(kind, fixed), bound)
        if kind == "card":
            simple = self._card_shortcut(op, bound - len(fixed), lits)
            if simple is not None:
                return simple
        key = ("agg", kind, op, bound, tuple(lits), tuple(weights), tuple(sorted(fixed)))
        v = self._memo.get(key)
        if v is None:
            v = self._memo[key] = self.g.new_var()
            self.g.gates[v] = ("agg", len(self.g.aggregates))
            self.g.aggregates.append(GroundAggregate(v, kind, op, bound, lits, weights, fixed))
        return v

    def _card_shortcut(self, op, k, lits):
        """Rewrite card comparisons against bounds 0/1 (after fixed entries)
        into plain and/or; returns None when a native aggregate is needed."""
        n = len(lits)
        # normalize to lower/upper bound form on the count c in [0, n]
        if op == ">":
            op, k = ">=", k + 1
        elif op == "<":
            op, k = "=<", k - 1
        if op == ">=":
            if k <= 0:
                return True
            if k > n:
                return False
            if k == 1:
                return self.mk_or(lits)
            if k == n:
                return self.mk_and(lits)
        elif op == "=<":
            if k < 0:
                return False
            if k >= n:
                return True
            if k == 0:
                return self.mk_and([-l for l in lits])
            if k == n - 1:
                return self.mk_or([-l for l in lits])
        elif op in ("=", "~="):
            if k < 0 or k > n:
                return op == "~="
            if k == 0 or k == n:
                f = self.mk_and([-l for l in lits]) if k == 0 else self.mk_and(lits)
                return f if op == "=" else neg(f)
        return None

    # -- terms ---------------------------------------------------------

    def term_cases(self, t, env) -> list:
        """All possible values of ``t`` as (guard, value) pairs."""
        if isinstance(t, Var):
            return [(True, env[t.name])]
        if isinstance(t, Const):
            return [(True, t.value)]
        if isinstance(t, App):
            if isinstance(t.symbol, Unresolved):
                raise GroundingError(f"unknown symbol {t.symbol}")
            out = []
            for guard, args in self._product([self.term_cases(a, env) for a in t.args]):
                for g2, v in self.app_cases(t.symbol, args):
                    g = self._and2(guard, g2)
                    if g is not False:
                        out.append((g, v))
            return out
        if isinstance(t, Arith):
            out = []
            for guard, vals in self._product([self.term_cases(a, env) for a in t.args]):
                out.append((guard, arith(t.op, list(vals))))
            return out
        if isinstance(t, Agg):
            entries = self.agg_entries(t, env)
            if any(not isinstance(g, bool) for g, _ in entries):
                raise GroundingError("aggregates over unknown facts may only be compared with a term"
                                     " (e.g. card{x : P(x)} >= 2)")
            return [(True, aggregate_value(t.kind, [w for g, w in entries if g is True]))]
        raise TypeError(t)

    def app_cases(self, sym: Function, args: tuple) -> list:
        args = tuple(args)
        if not all(a in self.s.domset(s) for a, s in zip(args, sym.sorts)):
            return []
        if sym not in self.defined_syms:
            v = self.s.value(sym, args)
            if v is not None:
                return [(True, v)]
        out = []
        for v in self.s.domain(sym.out):
            l = self.atom_lit(sym, args + (v,))
            if l is True:
                return [(True, v)]
            if l is not False:
                out.append((l, v))
        return out

    def _and2(self, a, b):
        if a is True:
            return b
        if b is True:
            return a
        if a is False or b is False:
            return False
        return self.mk_and([a, b])

    def _product(self, case_lists):
        if all(len(c) == 1 and c[0][0] is True for c in case_lists):
            yield True, tuple(c[0][1] for c in case_lists)
            return
        for combo in itertools.product(*case_lists):
            guard = True
            for g, _ in combo:
                guard = self._and2(guard, g)
                if guard is False:
                    break
            if guard is not False:
                yield guard, tuple(v for _, v in combo)

    def agg_entries(self, t: Agg, env) -> list:
        entries = []
        for b in self.bindings(t.vars, env):
            cond = self.formula(t.cond, b)
            if cond is False:
                continue
            if t.weight is None:
                entries.append((cond, 1))
                continue
            for g, w in self.term_cases(t.weight, b):
                if not isinstance(w, int):
                    raise GroundingError(f"aggregate weight {w!r} is not an integer")
                guard = self._and2(cond, g)
                if guard is not False:
                    entries.append((guard, w))
        return entries

    def bindings(self, vs, env):
        doms = []
        for v in vs:
            if v.sort is None:
                raise GroundingError(f"variable {v.name} has no sort")
            doms.append(self.s.domain(v.sort))
        names = [v.name for v in vs]
        for combo in itertools.product(*doms):
            b = dict(env)
            b.update(zip(names, combo))
            yield b

    # -- formulas --------------------------------------------------------

    def formula(self, f, env):
        """Ground ``f`` under ``env`` to True, False or a literal."""
        if isinstance(f, Truth):
            return f.value
        if isinstance(f, Atom):
            out = []
            for guard, args in self._product([self.term_cases(a, env) for a in f.args]):
                l = self.atom_lit(f.pred, args)
                l = self._and2(guard, l)
                if l is True:
                    return True
                if l is not False:
                    out.append(l)
            return self.mk_or(out)
        if isinstance(f, Cmp):
            return self.comparison(f, env)
        if isinstance(f, Not):
            return neg(self.formula(f.arg, env))
        if isinstance(f, And):
            lits = []
            for a in f.args:
                l = self.formula(a, env)
                if l is False:
                    return False
                if l is not True:
                    lits.append(l)
            return self.mk_and(lits)
        if isinstance(f, Or):
            lits = []
            for a in f.args:
                l = self.formula(a, env)
                if l is True:
                    return True
                if l is not False:
                    lits.append(l)
            return self.mk_or(lits)
        if isinstance(f, Implies):
            a = self.formula(f.left, env)
            if a is False:
                return True
            b = self.formula(f.right, env)
            if a is True:
                return b
            if b is True:
                return True
            return self.mk_or([-a] if b is False else [-a, b])
        if isinstance(f, Equiv):
            return self.mk_equiv(self.formula(f.left, env), self.formula(f.right, env))
        if isinstance(f, (Forall, Exists)):
            universal = isinstance(f, Forall)
            lits = []
            for b in self.bindings(f.vars, env):
                l = self.formula(f.body, b)
                if l is (not universal):
                    return l
                if l is not universal:
                    lits.append(l)
            return self.mk_and(lits) if universal else self.mk_or(lits)
        if isinstance(f, ExistsOne):
            entries = []
            for b in self.bindings(f.vars, env):
                l = self.formula(f.body, b)
                if l is not False:
                    entries.append((l, 1))
            return self.mk_agg("card", "=", 1, entries)
        raise TypeError(f)

    def comparison(self, f: Cmp, env):
        op = f.op
        left, right = f.left, f.right
        if isinstance(right, Agg) and not isinstance(left, Agg):
            left, right, op = right, left, FLIP[op]
        if isinstance(left, Agg):
            entries = self.agg_entries(left, env)
            if isinstance(right, Agg):
                raise GroundingError("comparing two aggregates is not supported")
            out = []
            for guard, bound in self.term_cases(right, env):
                l = self._and2(guard, self.mk_agg(left.kind, op, bound, entries))
                if l is True:
                    return True
                if l is not False:
                    out.append(l)
            return self.mk_or(out)
        lcases = self.term_cases(left, env)
        rcases = self.term_cases(right, env)
        # fast path: f(args) = known value is just the graph literal
        if op == "=" and len(rcases) == 1 and rcases[0][0] is True:
            r = rcases[0][1]
            out = [g for g, v in lcases if v == r]
            if any(g is True for g in out):
                return True
            return self.mk_or(out)
        out = []
        for lg, lv in lcases:
            for rg, rv in rcases:
                if compare(op, lv, rv):
                    g = self._and2(lg, rg)
                    if g is True:
                        return True
                    if g is not False:
                        out.append(g)
        return self.mk_or(out)

    # -- top level -------------------------------------------------------

    def add_clause(self, lits) -> None:
        if any(l is True for l in lits):
            return
        c = sorted({l for l in lits if not isinstance(l, bool)}, key=abs)
        if any(-l in c for l in c):
            return
        self.g.clauses.append(c)
        if len(c) == 1:
            self._unit(c[0])

    def _unit(self, lit) -> None:
        v = abs(lit)
        if v <= len(self.table):
            sym, _ = self.table.atom(v)
            if sym not in self.defined_syms:
                self.derived[v] = lit > 0

    def assert_formula(self, f, env) -> None:
        if isinstance(f, Truth):
            if not f.value:
                self.g.clauses.append([])
        elif isinstance(f, Forall):
            for b in self.bindings(f.vars, env):
                self.assert_formula(f.body, b)
        elif isinstance(f, And):
            for a in f.args:
                self.assert_formula(a, env)
        elif isinstance(f, Or):
            self.add_clause([self.formula(a, env) for a in f.args])
        elif isinstance(f, Implies):
            self.add_clause([neg(self.formula(f.left, env)), self.formula(f.right, env)])
        elif isinstance(f, Exists):
            self.add_clause([self.formula(f.body, b) for b in self.bindings(f.vars, env)])
        elif isinstance(f, ExistsOne):
            lits = [self.formula(f.body, b) for b in self.bindings(f.vars, env)]
            self.exactly_one([l for l in lits if l is not False], sum(1 for l in lits if l is True))
        else:
            lit = self.formula(f, env)
            # an asserted or/and gate (e.g. a card >= 1 shortcut) is a plain clause/units
            gate = self.g.gates.get(lit) if isinstance(lit, int) and lit > 0 else None
            if gate is not None and gate[0] == "or":
                self.add_clause(list(gate[1]))
            elif gate is not None and gate[0] == "and":
                for l in gate[1]:
                    self.add_clause([l])
            else:
                self.add_clause([lit])

    def exactly_one(self, lits, ntrue: int) -> None:
        lits = [l for l in lits if not isinstance(l, bool)]
        counts = collections.Counter(lits)
        if any(c > 1 for c in counts.values()):
            # a repeated literal would count twice, so it must be false
            for l, c in counts.items():
                if c > 1:
                    self.add_clause([neg(l)])
            lits = [l for l in counts if counts[l] == 1]
        if ntrue > 1:
            self.g.clauses.append([])
        elif ntrue == 1:
            for l in lits:
                self.add_clause([neg(l)])
        elif not lits:
            self.g.clauses.append([])
        elif len(lits) == 1:
            self.add_clause(lits)
        else:
            self.g.exactly_one.append(sorted(lits, key=abs))

    def function_constraints(self) -> None:
        for sym in self.symbols:
            if not isinstance(sym, Function):
                continue
            outs = self.s.domain(sym.out)
            for args in itertools.product(*(self.s.domain(x) for x in sym.sorts)):
                lits, ntrue = [], 0
                for v in outs:
                    l = self.atom_lit(sym, args + (v,))
                    if l is True:
                        ntrue += 1
                    elif l is not False:
                        lits.append(l)
                if sym.partial:
                    if ntrue > 1:
                        self.g.clauses.append([])
                    elif ntrue == 1:
                        for l in lits:
                            self.add_clause([-l])
                    elif len(lits) > 1:
                        self.g.at_most_one.append(lits)
                else:
                    self.exactly_one(lits, ntrue)

    def fixed_facts(self) -> None:
        for i in self.table:
            sym, tup = self.table.atom(i)
            t = self.s.truth(sym, tup)
            if t is True:
                self.g.fixed_true.add(i)
            elif t is False:
                self.g.fixed_false.add(i)

    def definitions(self) -> None:
        strata, diags = stratify(self.theory)
        if diags:
            raise GroundingError(diags[0].message)
        bodies: dict[int, list] = {}
        for d in self.theory.definitions:
            for r in d.rules:
                self._ground_rule(r, strata[r.head_symbol], bodies)
        for sym in self.theory.defined_symbols():
            for tup in self.s.tuple_space(sym):
                h = self.table.id(sym, tup)
                self.g.defined[h] = strata[sym]
                bs = bodies.get(h, [])
                body = True if any(b is True for b in bs) else self.mk_or([b for b in bs if b is not False])
                self.add_clause([-h, body])
                self.add_clause([h, neg(body)])

    def _ground_rule(self, r: Rule, stratum: int, bodies: dict) -> None:
        head_vars = [a.name for a in r.head_args]
        for b in self.bindings(r.vars, {}):
            tup = tuple(b[n] for n in head_vars)
            h = self.table.id(r.head_symbol, tup)
            if h is None:
                continue
            body = self.formula(r.body, b)
            if body is False:
                continue
            self.g.rules.append(GroundRule(h, body, stratum))
            bodies.setdefault(h, []).append(body)

    def run(self) -> GroundTheory:
        self.fixed_facts()
        self.function_constraints()
        # sentences mentioning fewer unknown symbols first, so that the unit
        # facts they produce simplify the rest
        def unknown_symbols(f):
            return sum(1 for sym in symbols_in(f)
                       if isinstance(sym, (Predicate, Function)) and not self.s.is_two_valued([sym]))
        order = sorted(range(len(self.theory.sentences)),
                       key=lambda i: (unknown_symbols(self.theory.sentences[i]), i))
        for i in order:
            self.assert_formula(self.theory.sentences[i], {})
        if self.theory.definitions:
            self.definitions()
        return self.g


def neg(l):
    if l is True:
        return False
    if l is False:
        return True
    return -l


def ground(theory: Theory, structure: Structure) -> GroundTheory:
    """Ground ``theory`` against ``structure``.

    Raises UnboundedSortError when a sort in use has no finite domain and
    DivisionByZero when term evaluation divides by zero.
    """
    return Grounder(theory, structure).run()


def eval_ground_term(term, binding: dict, s: Structure):
    """Value of a ground term whose function values are all known in ``s``."""
    g = _TermEvaluator(s)
    v = g.value(term, binding)
    if isinstance(v, int):
        numeric = [x for x in s.vocabulary.all_sorts() if x.numeric and s.has_domain(x)]
        if numeric and not any(v in s.domset(x) for x in numeric):
            raise RangeError(f"value {v} lies outside every numeric domain")
    return v


class _TermEvaluator:
    def __init__(self, s: Structure):
        self.s = s

    def value(self, t, env):
        if isinstance(t, Var):
            if t.name not in env:
                raise GroundingError(f"variable {t.name} is not bound")
            return env[t.name]
        if isinstance(t, Const):
            return t.value
        if isinstance(t, Arith):
            return arith(t.op, [self.value(a, env) for a in t.args])
        if isinstance(t, App):
            args = tuple(self.value(a, env) for a in t.args)
            v = self.s.value(t.symbol, args)
            if v is None:
                raise GroundingError(f"value of {t.symbol.name}({','.join(map(str, args))}) is not known")
            return v
        if isinstance(t, Agg):
            raise GroundingError("aggregates need a formula evaluator")
        raise TypeError(t)


def ground_aggregate(agg: Agg, op: str, bound, binding: dict, theory: Theory, s: Structure):
    """Ground ``agg op bound`` under ``binding``.

    Returns ``(result, ground_theory)`` where ``result`` is True/False when the
    structure already decides the comparison, otherwise a literal whose
    meaning is given by the clauses, gates and aggregates of the theory.
    """
    g = Grounder(theory, s)
    entries = g.agg_entries(agg, binding)
    return g.mk_agg(agg.kind, op, bound, entries), g.g


def decode(gt: GroundTheory, s: Structure, value) -> Structure:
    """Two-valued structure from ``s`` and an assignment of atom ids."""
    out = s.clone()
    interps: dict = {}
    for i in gt.table:
        sym, tup = gt.table.atom(i)
        ct, cf = interps.setdefault(sym, (set(), set()))
        (ct if value(i) else cf).add(tup)
    for sym, (ct, cf) in interps.items():
        it = out.interp(sym)
        it.ct, it.cf = ct, cf
    return out


__all__ = ["AtomTable", "GroundAggregate", "GroundRule", "GroundTheory", "UnboundedSortError",
           "decode", "eval_ground_term", "ground", "ground_aggregate", "int_div", "int_mod"]
