"""Inference tasks over theories and structures: model expansion, model
checking, propagation, definition evaluation, querying, entailment over
finite domains and text rendering of structures."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

from .errors import (
    InferenceError, NotTwoValuedError, OpenSymbolUnknownError, ShapeError, SolverTimeout,
)
from .evaluator import Evaluator
from .grounder import decode, ground
from .logic import (
    Agg, And, App, Arith, Atom, Cmp, Const, Definition, Equiv, Exists, ExistsOne, Forall, Function,
    Implies, Not, Or, Predicate, Theory, Truth, Var, binds, desugar, free_variables, stratify,
    symbols_in, tuple_key, walk,
)
from .solver import Solver
from .structures import Structure, format_elem, format_structure


@dataclass
class SolverOptions:
    nrmodels: int = 1  # 0 means all models
    seed: int = 0  # accepted for reproducibility; the search itself is deterministic
    timeout_ms: int | None = None
    propagation: str = "approx"
    dump_ground: str | None = None  # append every ground theory to this file

    def copy(self) -> SolverOptions:
        return SolverOptions(self.nrmodels, self.seed, self.timeout_ms, self.propagation, self.dump_ground)


class _Inconsistent:
    """Returned by propagate when no model completes the structure."""

    def __repr__(self) -> str:
        return "INCONSISTENT"

    def __bool__(self) -> bool:
        return False


INCONSISTENT = _Inconsistent()


def _check_vocabulary(t: Theory, s: Structure) -> None:
    for sym in t.vocabulary.all_symbols():
        if s.vocabulary.symbol(sym.name, sym.arity) != sym:
            raise InferenceError(f"structure {s.name} does not interpret {sym} of theory {t.name}")


def _ground(t: Theory, s: Structure, opts: SolverOptions):
    _check_vocabulary(t, s)
    gt = ground(t, s)
    if opts.dump_ground:
        with open(opts.dump_ground, "a", encoding="utf-8") as fh:
            fh.write(f"c theory {'::'.join(t.path)} structure {s.name}\n")
            fh.write(gt.dump())
    return gt


def _models(gt, opts: SolverOptions, limit: int):
    solver = Solver(gt, opts.timeout_ms)
    accept = gt.definitions_hold if gt.defined else None
    return solver.models(list(gt.table), limit, accept)


def model_expand(t: Theory, s: Structure, opts: SolverOptions | None = None) -> list[Structure]:
    """Two-valued completions of ``s`` satisfying ``t`` (at most
    ``opts.nrmodels``, all when it is 0).  ``s`` is never modified."""
    opts = opts or SolverOptions()
    gt = _ground(t, s, opts)
    out = []
    for snap in _models(gt, opts, opts.nrmodels):
        out.append(decode(gt, s, lambda v: snap[v] > 0))
    return out


def model_check(t: Theory, s: Structure) -> bool:
    """True iff the two-valued structure ``s`` is a model of ``t``."""
    _check_vocabulary(t, s)
    if not s.is_two_valued(t.vocabulary.all_symbols()):
        raise NotTwoValuedError(f"structure {s.name} is not two-valued")
    return bool(model_expand(t, s, SolverOptions(nrmodels=1)))


def propagate(t: Theory, s: Structure, opts: SolverOptions | None = None):
    """Refined copy of ``s`` with facts that hold in every model, or
    INCONSISTENT.  ``approx`` uses propagation on the ground theory,
    ``exact`` intersects all models."""
    opts = opts or SolverOptions()
    gt = _ground(t, s, opts)
    known: dict[int, bool] = {}
    if opts.propagation == "exact":
        solver = Solver(gt, opts.timeout_ms)
        accept = gt.definitions_hold if gt.defined else None
        known = solver.backbone(list(gt.table), accept)
        if known is None:
            return INCONSISTENT
    elif opts.propagation == "approx":
        solver = Solver(gt, opts.timeout_ms)
        root = solver.root_values()
        if root is None:
            return INCONSISTENT
        known = {i: v for i, v in root.items() if i <= len(gt.table)}
    else:
        raise InferenceError(f"unknown propagation mode {opts.propagation!r}")
    out = s.clone()
    for i, v in known.items():
        sym, tup = gt.table.atom(i)
        it = out.interp(sym)
        if v:
            it.ct.add(tup)
        else:
            it.cf.add(tup)
    return out


# -- definitions ------------------------------------------------------------


def eval_definition(d: Definition, s: Structure, stats: dict | None = None) -> dict:
    """Least-fixpoint interpretation of the symbols defined by ``d``, per
    stratum, given two-valued open symbols in ``s``.

    Returns ``{symbol: set of true tuples}``; ``stats["iterations"]`` gets
    the stage at which each stratum reached its fixpoint, i.e. the number of
    rounds that derived something (the closing round that derives nothing
    is not counted).
    """
    defined = d.defined_symbols
    for r in d.rules:
        for sym in symbols_in(r.body):
            if sym not in defined and not s.is_two_valued([sym]):
                raise OpenSymbolUnknownError(f"open symbol {sym} is not two-valued in {s.name}")
    strata, diags = stratify(Theory("definition", s.vocabulary, (), (d,)))
    if diags:
        raise InferenceError(diags[0].message)
    overlay: dict = {sym: set() for sym in defined}
    ev = Evaluator(s, overlay)
    rounds_per_stratum = []
    for level in sorted(set(strata.values())):
        rules = [r for r in d.rules if strata[r.head_symbol] == level]
        rounds = 0
        while True:
            rounds += 1
            new = []
            for r in rules:
                names = [a.name for a in r.head_args]
                for b in ev.bindings(r.vars, {}):
                    tup = tuple(b[n] for n in names)
                    if tup not in overlay[r.head_symbol] and s.in_space(r.head_symbol, tup) \
                            and ev.formula(r.body, b):
                        new.append((r.head_symbol, tup))
            if not new:
                rounds -= 1
                break
            for sym, tup in new:
                overlay[sym].add(tup)
        rounds_per_stratum.append(rounds)
    if stats is not None:
        stats["iterations"] = rounds_per_stratum
    return overlay


def apply_definition(d: Definition, s: Structure) -> Structure:
    """Copy of ``s`` with the defined symbols set to their fixpoint."""
    out = s.clone()
    for sym, ct in eval_definition(d, s).items():
        it = out.interp(sym)
        it.ct = set(ct)
        it.cf = set(out.tuple_space(sym)) - it.ct
    return out


# -- querying ---------------------------------------------------------------


class QueryResult:
    """Bindings of the free variables (in first-occurrence order)."""

    def __init__(self, variables, rows):
        self.variables = tuple(variables)
        self.rows = sorted(set(rows), key=tuple_key)

    def __iter__(self):
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QueryResult):
            return NotImplemented
        return self.variables == other.variables and self.rows == other.rows

    def __repr__(self) -> str:
        return f"QueryResult({list(self.variables)}, {self.rows})"

    def __str__(self) -> str:
        return "{" + "; ".join(",".join(format_elem(e) for e in r) for r in self.rows) + "}"


class _Rel:
    __slots__ = ("vars", "rows")

    def __init__(self, vars_, rows):
        self.vars = tuple(vars_)
        self.rows = set(rows)


class _Algebra:
    """Bottom-up relational evaluation: atoms scan their interpretation,
    connectives become joins, unions and complements."""

    def __init__(self, s: Structure, sorts: dict):
        self.s = s
        self.sorts = sorts
        self.ev = Evaluator(s)

    def dom(self, name):
        return self.s.domain(self.sorts[name])

    def product(self, names):
        return _Rel(names, itertools.product(*(self.dom(n) for n in names)))

    def extend(self, r: _Rel, names) -> _Rel:
        missing = [n for n in names if n not in r.vars]
        if not missing:
            return r
        ext = self.product(missing)
        return _Rel(r.vars + ext.vars, (a + b for a in r.rows for b in ext.rows))

    def reorder(self, r: _Rel, names) -> _Rel:
        idx = [r.vars.index(n) for n in names]
        return _Rel(names, (tuple(row[i] for i in idx) for row in r.rows))

    def join(self, a: _Rel, b: _Rel) -> _Rel:
        shared = [n for n in a.vars if n in b.vars]
        extra = [n for n in b.vars if n not in a.vars]
        ai = [a.vars.index(n) for n in shared]
        bi = [b.vars.index(n) for n in shared]
        ei = [b.vars.index(n) for n in extra]
        index: dict = {}
        for row in b.rows:
            index.setdefault(tuple(row[i] for i in bi), []).append(tuple(row[i] for i in ei))
        out = set()
        for row in a.rows:
            for tail in index.get(tuple(row[i] for i in ai), ()):
                out.add(row + tail)
        return _Rel(a.vars + tuple(extra), out)

    def scan(self, f) -> _Rel:
        names = [v.name for v in free_variables(f)]
        rows = []
        for combo in itertools.product(*(self.dom(n) for n in names)):
            if self.ev.formula(f, dict(zip(names, combo))):
                rows.append(combo)
        return _Rel(names, rows)

    def eval(self, f) -> _Rel:
        if isinstance(f, Truth):
            return _Rel((), [()] if f.value else [])
        if isinstance(f, Atom) and all(isinstance(a, (Var, Const)) for a in f.args):
            return self.atom(f)
        if isinstance(f, Not):
            inner = self.eval(f.arg)
            full = self.product(inner.vars)
            return _Rel(inner.vars, full.rows - inner.rows)
        if isinstance(f, And):
            r = _Rel((), [()])
            for a in f.args:
                r = self.join(r, self.eval(a))
            return r
        if isinstance(f, Or):
            parts = [self.eval(a) for a in f.args]
            names = []
            for p in parts:
                names += [n for n in p.vars if n not in names]
            rows = set()
            for p in parts:
                rows |= self.reorder(self.extend(p, names), tuple(names)).rows
            return _Rel(names, rows)
        if isinstance(f, Exists):
            bound = [v.name for v in f.vars]
            body = self.extend(self.eval(f.body), bound)
            keep = [n for n in body.vars if n not in bound]
            return self.reorder(body, tuple(keep))
        if isinstance(f, Forall):
            return self.eval(Not(Exists(f.vars, Not(f.body))))
        return self.scan(f)

    def atom(self, f: Atom) -> _Rel:
        names = []
        for a in f.args:
            if isinstance(a, Var) and a.name not in names:
                names.append(a.name)
        doms = {n: self.s.domset(self.sorts[n]) for n in names}
        rows = []
        ct = self.s.interp(f.pred).ct
        for tup in ct:
            env: dict = {}
            ok = True
            for a, e in zip(f.args, tup):
                if isinstance(a, Const):
                    ok = a.value == e
                elif a.name in env:
                    ok = env[a.name] == e
                else:
                    ok = e in doms[a.name]
                    env[a.name] = e
                if not ok:
                    break
            if ok:
                rows.append(tuple(env[n] for n in names))
        return _Rel(names, rows)


def _alpha_rename(f, used: set, env: dict):
    """Give every quantified variable a distinct name."""
    if isinstance(f, Var):
        return env.get(f.name, f)
    if isinstance(f, (Const, Truth)):
        return f
    if isinstance(f, (Forall, Exists, ExistsOne, Agg)):
        inner = dict(env)
        new_vars = []
        for v in f.vars:
            name = v.name
            if name in used:
                i = 1
                while f"{v.name}_{i}" in used:
                    i += 1
                name = f"{v.name}_{i}"
            used.add(name)
            nv = Var(name, v.sort)
            inner[v.name] = nv
            new_vars.append(nv)
        if isinstance(f, Agg):
            w = _alpha_rename(f.weight, used, inner) if f.weight is not None else None
            return replace(f, vars=tuple(new_vars), cond=_alpha_rename(f.cond, used, inner), weight=w)
        return replace(f, vars=tuple(new_vars), body=_alpha_rename(f.body, used, inner))
    if isinstance(f, (App, Atom, Arith)):
        return replace(f, args=tuple(_alpha_rename(a, used, env) for a in f.args))
    if isinstance(f, Cmp):
        return replace(f, left=_alpha_rename(f.left, used, env), right=_alpha_rename(f.right, used, env))
    if isinstance(f, Not):
        return replace(f, arg=_alpha_rename(f.arg, used, env))
    if isinstance(f, (And, Or)):
        return replace(f, args=tuple(_alpha_rename(a, used, env) for a in f.args))
    if isinstance(f, (Implies, Equiv)):
        return replace(f, left=_alpha_rename(f.left, used, env), right=_alpha_rename(f.right, used, env))
    raise TypeError(f)


def query(phi, s: Structure) -> QueryResult:
    """All bindings of the free variables of ``phi`` that make it true in
    the two-valued structure ``s``."""
    if isinstance(phi, str):
        from .parser import parse_formula
        phi = parse_formula(phi, s.vocabulary)
    syms = symbols_in(phi)
    for x in syms:
        if not isinstance(x, (Predicate, Function)):
            raise InferenceError(f"unknown symbol {x}")
    if not s.is_two_valued(syms):
        raise NotTwoValuedError(f"structure {s.name} is not two-valued on the query's symbols")
    free = free_variables(phi)
    for v in free:
        if v.sort is None:
            raise InferenceError(f"cannot derive the sort of free variable {v.name}")
    names = {v.name for v in free}
    f = _alpha_rename(phi, set(names), {})
    f = desugar(f)
    sorts = {v.name: v.sort for v in free}
    for node in _quantified_vars(f):
        sorts[node.name] = node.sort
    alg = _Algebra(s, sorts)
    rel = alg.extend(alg.eval(f), [v.name for v in free])
    rel = alg.reorder(rel, tuple(v.name for v in free))
    return QueryResult([v.name for v in free], rel.rows)


def _quantified_vars(f):
    for n in walk(f):
        yield from binds(n)


# -- entailment ------------------------------------------------------------


def _domain_only(s: Structure) -> Structure:
    out = Structure(s.vocabulary, s.name)
    out.domains = dict(s.domains)
    return out


def entails(t1: Theory, t2: Theory, s: Structure, opts: SolverOptions | None = None):
    """Decide ``t1 |= t2`` over the sort domains of ``s`` (its symbol
    interpretations are ignored).

    Returns ``("entailed", None)``, ``("counterexample", model)`` or
    ``("unknown", None)`` when the search times out.
    """
    opts = opts or SolverOptions()
    for sym in t2.vocabulary.all_symbols():
        if t1.vocabulary.symbol(sym.name, sym.arity) != sym:
            raise InferenceError(f"{sym} of {t2.name} is not in the vocabulary of {t1.name}")
    base = _domain_only(s)
    one = opts.copy()
    one.nrmodels = 1
    try:
        for sigma in t2.sentences:
            probe = Theory(t1.name, t1.vocabulary, t1.sentences + (Not(sigma),), t1.definitions)
            found = model_expand(probe, base, one)
            if found:
                return "counterexample", found[0]
        if t2.definitions:
            every = opts.copy()
            every.nrmodels = 0
            for m in model_expand(t1, base, every):
                for d in t2.definitions:
                    fix = eval_definition(d, m)
                    if any(m.interp(sym).ct != ct for sym, ct in fix.items()):
                        return "counterexample", m
    except SolverTimeout:
        return "unknown", None
    return "entailed", None


# -- rendering --------------------------------------------------------------


def render_structure(s: Structure, mode: str = "text", symbol=None, rows: int | None = None,
                     cols: int | None = None) -> str:
    """``text``: the canonical structure block.  ``grid``: a rows x cols
    character grid of a binary integer function, ``.`` for unknown cells."""
    if mode == "text":
        return format_structure(s)
    if mode != "grid":
        raise ShapeError(f"unknown render mode {mode!r}")
    if not isinstance(symbol, Function) or symbol.arity != 2:
        raise ShapeError("grid rendering needs a binary function symbol")
    if not all(x.numeric for x in symbol.sorts):
        raise ShapeError(f"arguments of {symbol.name} are not integer sorts")
    rdom, cdom = s.domain(symbol.sorts[0]), s.domain(symbol.sorts[1])
    rows = len(rdom) if rows is None else rows
    cols = len(cdom) if cols is None else cols
    if not (set(range(1, rows + 1)) <= set(rdom) and set(range(1, cols + 1)) <= set(cdom)):
        raise ShapeError(f"{symbol.name} is not defined on a {rows}x{cols} grid")
    cells = [[s.value(symbol, (r, c)) for c in range(1, cols + 1)] for r in range(1, rows + 1)]
    width = max([len(format_elem(v)) for row in cells for v in row if v is not None] + [1])
    rb, cb = _block(rows), _block(cols)
    lines = []
    for r, row in enumerate(cells):
        if rb and r and r % rb == 0:
            lines.append(sep)
        parts = []
        for c, v in enumerate(row):
            if cb and c and c % cb == 0:
                parts.append("|")
            parts.append(("." if v is None else format_elem(v)).rjust(width))
        line = " ".join(parts)
        lines.append(line)
        if r == 0:
            sep = "".join("+" if ch == "|" else "-" for ch in line)
    return "\n".join(lines)


def _block(n: int) -> int:
    k = math.isqrt(n)
    return k if k > 1 and k * k == n else 0
