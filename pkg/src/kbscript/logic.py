"""Order-sorted first-order logic: sorts, vocabularies, terms, formulas,
definitions and theories, plus sort inference and well-formedness checks."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Union

from .errors import Diagnostic, Span

Element = Union[int, str]


def elem_key(e: Element):
    """Total order on domain elements: integers by value, then names."""
    if isinstance(e, int):
        return (0, e, "")
    return (1, 0, e)


def tuple_key(t) -> tuple:
    return tuple(elem_key(e) for e in t)


# --------------------------------------------------------------------------
# sorts and symbols


@dataclass(frozen=True)
class Sort:
    name: str
    parent: Sort | None = None

    def ancestors(self) -> list[Sort]:
        out, s = [], self.parent
        while s is not None:
            out.append(s)
            s = s.parent
        return out

    def is_subsort_of(self, other: Sort) -> bool:
        return self == other or other in self.ancestors()

    def root(self) -> Sort:
        s = self
        while s.parent is not None:
            s = s.parent
        return s

    @property
    def numeric(self) -> bool:
        return self.root() == INT

    def __str__(self) -> str:
        return self.name


INT = Sort("int")
NAT = Sort("nat", INT)
BUILTIN_SORTS = {"int": INT, "nat": NAT}


@dataclass(frozen=True)
class Predicate:
    name: str
    sorts: tuple[Sort, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.sorts)

    @property
    def graph_sorts(self) -> tuple[Sort, ...]:
        return self.sorts

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Function:
    name: str
    sorts: tuple[Sort, ...]
    out: Sort
    partial: bool = False

    @property
    def arity(self) -> int:
        return len(self.sorts)

    @property
    def graph_sorts(self) -> tuple[Sort, ...]:
        return self.sorts + (self.out,)

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Unresolved:
    """Placeholder for an application of an undeclared symbol."""

    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


Symbol = Union[Predicate, Function]


class Vocabulary:
    def __init__(self, name: str, path: tuple[str, ...] | None = None):
        self.name = name
        self.path = path or (name,)
        self.own_sorts: dict[str, Sort] = {}
        self.own_symbols: dict[tuple[str, int], Symbol] = {}
        self.extends: list[Vocabulary] = []

    def __repr__(self) -> str:
        return f"Vocabulary({'::'.join(self.path)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return (
            self.path == other.path
            and list(self.own_sorts.values()) == list(other.own_sorts.values())
            and list(self.own_symbols.values()) == list(other.own_symbols.values())
            and [v.path for v in self.extends] == [v.path for v in other.extends]
        )

    def __hash__(self) -> int:
        return hash(self.path)

    def add_extends(self, voc: Vocabulary) -> None:
        for s in voc.all_sorts():
            mine = self.sort(s.name)
            if mine is not None and mine != s:
                raise ValueError(f"sort {s.name} clashes with included vocabulary {voc.name}")
        for sym in voc.all_symbols():
            mine = self.symbol(sym.name, sym.arity)
            if mine is not None and mine != sym:
                raise ValueError(f"symbol {sym} clashes with included vocabulary {voc.name}")
        self.extends.append(voc)

    def add_sort(self, sort: Sort) -> None:
        if sort.name in BUILTIN_SORTS or self.sort(sort.name) is not None:
            raise ValueError(f"sort {sort.name} declared twice")
        self.own_sorts[sort.name] = sort

    def add_symbol(self, sym: Symbol) -> None:
        if self.symbol(sym.name, sym.arity) is not None:
            raise ValueError(f"symbol {sym} declared twice")
        self.own_symbols[(sym.name, sym.arity)] = sym

    def sort(self, name: str) -> Sort | None:
        if name in BUILTIN_SORTS:
            return BUILTIN_SORTS[name]
        if name in self.own_sorts:
            return self.own_sorts[name]
        for v in self.extends:
            s = v.sort(name)
            if s is not None:
                return s
        return None

    def symbol(self, name: str, arity: int) -> Symbol | None:
        sym = self.own_symbols.get((name, arity))
        if sym is not None:
            return sym
        for v in self.extends:
            sym = v.symbol(name, arity)
            if sym is not None:
                return sym
        return None

    def symbols_named(self, name: str) -> list[Symbol]:
        return [s for s in self.all_symbols() if s.name == name]

    def all_sorts(self) -> list[Sort]:
        seen: dict[str, Sort] = {}
        for v in self.extends:
            for s in v.all_sorts():
                seen.setdefault(s.name, s)
        for s in self.own_sorts.values():
            seen.setdefault(s.name, s)
        return list(seen.values())

    def all_symbols(self) -> list[Symbol]:
        seen: dict[tuple[str, int], Symbol] = {}
        for v in self.extends:
            for s in v.all_symbols():
                seen.setdefault((s.name, s.arity), s)
        for k, s in self.own_symbols.items():
            seen.setdefault(k, s)
        return list(seen.values())


# --------------------------------------------------------------------------
# terms and formulas

def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort | None = None
    span: Span | None = _span()


@dataclass(frozen=True)
class Const:
    value: Element
    span: Span | None = _span()


@dataclass(frozen=True)
class App:
    symbol: Function | Unresolved
    args: tuple = ()
    span: Span | None = _span()


ARITH_OPS = ("+", "-", "*", "/", "%", "abs", "neg")


@dataclass(frozen=True)
class Arith:
    op: str
    args: tuple
    span: Span | None = _span()


AGG_KINDS = ("card", "sum", "min", "max")


@dataclass(frozen=True)
class Agg:
    kind: str
    vars: tuple
    cond: "Formula"
    weight: "Term | None" = None
    span: Span | None = _span()


Term = Union[Var, Const, App, Arith, Agg]


@dataclass(frozen=True)
class Truth:
    value: bool
    span: Span | None = _span()


@dataclass(frozen=True)
class Atom:
    pred: Predicate | Unresolved
    args: tuple = ()
    span: Span | None = _span()


CMP_OPS = ("=", "~=", "<", "=<", ">", ">=")


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Term
    right: Term
    span: Span | None = _span()


@dataclass(frozen=True)
class Not:
    arg: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class And:
    args: tuple
    span: Span | None = _span()


@dataclass(frozen=True)
class Or:
    args: tuple
    span: Span | None = _span()


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class Equiv:
    left: "Formula"
    right: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class Forall:
    vars: tuple
    body: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class Exists:
    vars: tuple
    body: "Formula"
    span: Span | None = _span()


@dataclass(frozen=True)
class ExistsOne:
    vars: tuple
    body: "Formula"
    span: Span | None = _span()


Formula = Union[Truth, Atom, Cmp, Not, And, Or, Implies, Equiv, Forall, Exists, ExistsOne]
Quantifier = (Forall, Exists, ExistsOne)
TERM_TYPES = (Var, Const, App, Arith, Agg)


@dataclass(frozen=True)
class Rule:
    """``! vars : head <- body``.  The head is an atom or ``f(x..) = y``."""

    vars: tuple
    head: Atom | Cmp
    body: Formula
    span: Span | None = _span()

    @property
    def head_symbol(self):
        if isinstance(self.head, Atom):
            return self.head.pred
        return self.head.left.symbol

    @property
    def head_args(self) -> tuple:
        if isinstance(self.head, Atom):
            return self.head.args
        return self.head.left.args + (self.head.right,)


@dataclass(frozen=True)
class Definition:
    rules: tuple
    span: Span | None = _span()

    @property
    def defined_symbols(self) -> list:
        out = []
        for r in self.rules:
            if r.head_symbol not in out:
                out.append(r.head_symbol)
        return out


class Theory:
    def __init__(self, name: str, vocabulary: Vocabulary, sentences=(), definitions=(),
                 path: tuple[str, ...] | None = None, span: Span | None = None):
        self.name = name
        self.vocabulary = vocabulary
        self.sentences = tuple(sentences)
        self.definitions = tuple(definitions)
        self.path = path or (name,)
        self.span = span

    def __repr__(self) -> str:
        return f"Theory({'::'.join(self.path)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Theory):
            return NotImplemented
        return (self.path == other.path and self.vocabulary.path == other.vocabulary.path
                and self.sentences == other.sentences and self.definitions == other.definitions)

    def __hash__(self) -> int:
        return hash(self.path)

    def defined_symbols(self) -> list:
        out = []
        for d in self.definitions:
            for s in d.defined_symbols:
                if s not in out:
                    out.append(s)
        return out

    def with_sentences(self, sentences, name: str | None = None) -> Theory:
        return Theory(name or self.name, self.vocabulary, sentences, self.definitions)


# --------------------------------------------------------------------------
# traversal helpers


def children(node) -> tuple:
    if isinstance(node, (Var, Const, Truth)):
        return ()
    if isinstance(node, (App, Atom, Arith)):
        return tuple(node.args)
    if isinstance(node, Agg):
        return (node.cond,) + ((node.weight,) if node.weight is not None else ())
    if isinstance(node, Cmp):
        return (node.left, node.right)
    if isinstance(node, Not):
        return (node.arg,)
    if isinstance(node, (And, Or)):
        return tuple(node.args)
    if isinstance(node, (Implies, Equiv)):
        return (node.left, node.right)
    if isinstance(node, Quantifier):
        return (node.body,)
    raise TypeError(f"not a logic node: {node!r}")


def walk(node) -> Iterator:
    yield node
    for c in children(node):
        yield from walk(c)


def binds(node) -> tuple:
    """Variables bound by ``node`` (quantifiers and aggregates)."""
    if isinstance(node, Quantifier) or isinstance(node, Agg):
        return node.vars
    return ()


def free_variables(f) -> list[Var]:
    """Unbound variables of a formula or term, in first-occurrence order."""
    out: dict[str, Var] = {}

    def go(node, bound: frozenset):
        if isinstance(node, Var):
            if node.name not in bound and node.name not in out:
                out[node.name] = node
            return
        inner = bound | {v.name for v in binds(node)}
        for c in children(node):
            go(c, inner)

    go(f, frozenset())
    return list(out.values())


def var_names(node) -> set[str]:
    names = set()
    for n in walk(node):
        if isinstance(n, Var):
            names.add(n.name)
        for v in binds(n):
            names.add(v.name)
    return names


def substitute(node, mapping: dict):
    """Replace free occurrences of variables (by name) with terms."""
    if not mapping:
        return node
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, (Const, Truth)):
        return node
    bound = {v.name for v in binds(node)}
    inner = {k: v for k, v in mapping.items() if k not in bound} if bound else mapping
    if isinstance(node, (App, Atom, Arith)):
        return replace(node, args=tuple(substitute(a, mapping) for a in node.args))
    if isinstance(node, Agg):
        w = substitute(node.weight, inner) if node.weight is not None else None
        return replace(node, cond=substitute(node.cond, inner), weight=w)
    if isinstance(node, Cmp):
        return replace(node, left=substitute(node.left, mapping), right=substitute(node.right, mapping))
    if isinstance(node, Not):
        return replace(node, arg=substitute(node.arg, mapping))
    if isinstance(node, (And, Or)):
        return replace(node, args=tuple(substitute(a, mapping) for a in node.args))
    if isinstance(node, (Implies, Equiv)):
        return replace(node, left=substitute(node.left, mapping), right=substitute(node.right, mapping))
    if isinstance(node, Quantifier):
        return replace(node, body=substitute(node.body, inner))
    raise TypeError(node)


def fresh_name(base: str, used: set[str]) -> str:
    i = 1
    while f"{base}_{i}" in used:
        i += 1
    name = f"{base}_{i}"
    used.add(name)
    return name


def desugar(f, used: set[str] | None = None):
    """Rewrite ``=>``, ``<=>`` and ``?1`` into not/and/or/quantifiers.

    ``?1 x: phi`` becomes ``? x: phi & ! x': (~phi[x/x'] | x' = x)``.
    """
    if used is None:
        used = var_names(f)
    if isinstance(f, (Var, Const, Truth)):
        return f
    if isinstance(f, Implies):
        return Or((Not(desugar(f.left, used)), desugar(f.right, used)), span=f.span)
    if isinstance(f, Equiv):
        a, b = desugar(f.left, used), desugar(f.right, used)
        return And((Or((Not(a), b)), Or((a, Not(b)))), span=f.span)
    if isinstance(f, ExistsOne):
        body = desugar(f.body, used)
        primed = tuple(Var(fresh_name(v.name, used), v.sort) for v in f.vars)
        other = substitute(body, {v.name: p for v, p in zip(f.vars, primed)})
        eqs = [Cmp("=", p, Var(v.name, v.sort)) for v, p in zip(f.vars, primed)]
        same = eqs[0] if len(eqs) == 1 else And(tuple(eqs))
        unique = Forall(primed, Or((Not(other), same)))
        return Exists(f.vars, And((body, unique)), span=f.span)
    if isinstance(f, (App, Atom, Arith)):
        return replace(f, args=tuple(desugar(a, used) for a in f.args))
    if isinstance(f, Agg):
        w = desugar(f.weight, used) if f.weight is not None else None
        return replace(f, cond=desugar(f.cond, used), weight=w)
    if isinstance(f, Cmp):
        return replace(f, left=desugar(f.left, used), right=desugar(f.right, used))
    if isinstance(f, Not):
        return replace(f, arg=desugar(f.arg, used))
    if isinstance(f, (And, Or)):
        return replace(f, args=tuple(desugar(a, used) for a in f.args))
    if isinstance(f, (Forall, Exists)):
        return replace(f, body=desugar(f.body, used))
    raise TypeError(f)


def term_sort(t) -> Sort | None:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, Const):
        return INT if isinstance(t.value, int) else None
    if isinstance(t, App):
        return t.symbol.out if isinstance(t.symbol, Function) else None
    return INT


def symbols_in(node) -> list:
    out = []
    for n in walk(node):
        sym = n.pred if isinstance(n, Atom) else n.symbol if isinstance(n, App) else None
        if sym is not None and sym not in out:
            out.append(sym)
    return out


# --------------------------------------------------------------------------
# sort inference


class _VarInfo:
    def __init__(self, name: str, explicit: Sort | None):
        self.name = name
        self.explicit = explicit
        self.candidates: list[Sort] = []
        self.links: list[_VarInfo] = []
        self.sort: Sort | None = explicit


class SortInference:
    """Derive sorts of untyped variables from the argument positions they
    occupy.  Explicitly typed variables (``x[Row]``) keep their sort."""

    def __init__(self, free_sorts: dict[str, Sort] | None = None):
        self.free: dict[str, _VarInfo] = {}
        self.binders: dict[int, list[_VarInfo]] = {}
        self.infos: list[_VarInfo] = []
        self.free_sorts = free_sorts or {}

    def _new(self, v: Var) -> _VarInfo:
        info = _VarInfo(v.name, v.sort)
        self.infos.append(info)
        return info

    def _lookup(self, name: str, env: dict) -> _VarInfo:
        if name in env:
            return env[name]
        if name not in self.free:
            info = _VarInfo(name, self.free_sorts.get(name))
            self.infos.append(info)
            self.free[name] = info
        return self.free[name]

    def _position(self, args, sorts, env):
        for i, a in enumerate(args):
            if isinstance(a, Var) and i < len(sorts):
                self._lookup(a.name, env).candidates.append(sorts[i])

    def collect(self, node, env: dict) -> None:
        if isinstance(node, Var):
            self._lookup(node.name, env)
            return
        if isinstance(node, Atom) and isinstance(node.pred, Predicate):
            self._position(node.args, node.pred.sorts, env)
        elif isinstance(node, App) and isinstance(node.symbol, Function):
            self._position(node.args, node.symbol.sorts, env)
        elif isinstance(node, Cmp) and node.op in ("=", "~="):
            lv, rv = isinstance(node.left, Var), isinstance(node.right, Var)
            if lv and rv:
                a, b = self._lookup(node.left.name, env), self._lookup(node.right.name, env)
                a.links.append(b)
                b.links.append(a)
            elif lv or rv:
                var, other = (node.left, node.right) if lv else (node.right, node.left)
                s = term_sort(other) if isinstance(other, App) else None
                if s is not None:
                    self._lookup(var.name, env).candidates.append(s)
        bound = binds(node)
        if bound:
            infos = [self._new(v) for v in bound]
            self.binders[id(node)] = infos
            env = dict(env)
            env.update({i.name: i for i in infos})
        for c in children(node):
            self.collect(c, env)

    def collect_rule(self, rule: Rule) -> None:
        infos = [self._new(v) for v in rule.vars]
        self.binders[id(rule)] = infos
        env = {i.name: i for i in infos}
        self.collect(rule.head, env)
        self.collect(rule.body, env)

    def solve(self) -> None:
        for info in self.infos:
            if info.sort is not None:
                continue
            best = None
            for c in info.candidates:
                if best is None or c.is_subsort_of(best):
                    best = c
            info.sort = best
        changed = True
        while changed:
            changed = False
            for info in self.infos:
                if info.sort is None:
                    for other in info.links:
                        if other.sort is not None:
                            info.sort = other.sort
                            changed = True
                            break

    def rebuild(self, node, env: dict):
        if isinstance(node, Var):
            info = env.get(node.name) or self.free.get(node.name)
            return replace(node, sort=info.sort if info else node.sort)
        if isinstance(node, (Const, Truth)):
            return node
        infos = self.binders.get(id(node))
        if infos is not None:
            env = dict(env)
            env.update({i.name: i for i in infos})
            new_vars = tuple(replace(v, sort=i.sort) for v, i in zip(node.vars, infos))
        if isinstance(node, (App, Atom, Arith)):
            return replace(node, args=tuple(self.rebuild(a, env) for a in node.args))
        if isinstance(node, Agg):
            w = self.rebuild(node.weight, env) if node.weight is not None else None
            return replace(node, vars=new_vars, cond=self.rebuild(node.cond, env), weight=w)
        if isinstance(node, Cmp):
            return replace(node, left=self.rebuild(node.left, env), right=self.rebuild(node.right, env))
        if isinstance(node, Not):
            return replace(node, arg=self.rebuild(node.arg, env))
        if isinstance(node, (And, Or)):
            return replace(node, args=tuple(self.rebuild(a, env) for a in node.args))
        if isinstance(node, (Implies, Equiv)):
            return replace(node, left=self.rebuild(node.left, env), right=self.rebuild(node.right, env))
        if isinstance(node, Quantifier):
            return replace(node, vars=new_vars, body=self.rebuild(node.body, env))
        if isinstance(node, Rule):
            return replace(node, vars=new_vars, head=self.rebuild(node.head, env),
                           body=self.rebuild(node.body, env))
        raise TypeError(node)


def infer_sorts(node, free_sorts: dict[str, Sort] | None = None):
    """Return ``node`` (formula, term or rule) with variable sorts filled in."""
    inf = SortInference(free_sorts)
    if isinstance(node, Rule):
        inf.collect_rule(node)
    else:
        inf.collect(node, {})
    inf.solve()
    return inf.rebuild(node, {})


# --------------------------------------------------------------------------
# well-formedness


def _arg_ok(arg, declared: Sort) -> bool:
    if isinstance(arg, Var):
        return arg.sort is not None and arg.sort.is_subsort_of(declared)
    if isinstance(arg, Const):
        return declared.numeric == isinstance(arg.value, int)
    if isinstance(arg, App):
        return not isinstance(arg.symbol, Function) or arg.symbol.out.is_subsort_of(declared)
    return declared.numeric


def _comparable(a: Sort | None, b: Sort | None) -> bool:
    if a is None or b is None:
        other = b if a is None else a
        return other is None or not other.numeric
    return a.root() == b.root()


class _Checker:
    def __init__(self, vocabulary: Vocabulary | None):
        self.voc = vocabulary
        self.diags: list[Diagnostic] = []

    def err(self, msg: str, node) -> None:
        self.diags.append(Diagnostic(msg, getattr(node, "span", None)))

    def symbol_ok(self, sym, node) -> bool:
        if isinstance(sym, Unresolved):
            self.err(f"unknown symbol {sym}", node)
            return False
        if self.voc is not None and self.voc.symbol(sym.name, sym.arity) != sym:
            self.err(f"symbol {sym} is not in vocabulary {self.voc.name}", node)
            return False
        return True

    def args(self, sym, args, node) -> None:
        for i, (a, s) in enumerate(zip(args, sym.sorts)):
            if isinstance(a, Var) and a.sort is None:
                continue
            if not _arg_ok(a, s):
                got = term_sort(a)
                self.err(f"argument {i + 1} of {sym} expects sort {s}, got {got if got else 'a constant'}", a if getattr(a, 'span', None) else node)

    def term(self, t, bound: set) -> None:
        if isinstance(t, Var):
            if t.name not in bound:
                self.err(f"unbound variable {t.name}", t)
            elif t.sort is None:
                self.err(f"cannot derive sort of variable {t.name}", t)
            return
        if isinstance(t, Const):
            return
        if isinstance(t, App):
            if self.symbol_ok(t.symbol, t):
                self.args(t.symbol, t.args, t)
            for a in t.args:
                self.term(a, bound)
            return
        if isinstance(t, Arith):
            for a in t.args:
                s = term_sort(a)
                if s is not None and not s.numeric:
                    self.err(f"arithmetic on non-numeric sort {s}", a)
                elif isinstance(a, Const) and isinstance(a.value, str):
                    self.err("arithmetic on a named constant", a)
                self.term(a, bound)
            return
        if isinstance(t, Agg):
            inner = bound | {v.name for v in t.vars}
            for v in t.vars:
                if v.sort is None:
                    self.err(f"cannot derive sort of variable {v.name}", v)
            self.formula(t.cond, inner)
            if t.kind == "card":
                if t.weight is not None:
                    self.err("card aggregate takes no weight term", t)
            else:
                if t.weight is None:
                    self.err(f"{t.kind} aggregate needs a weight term", t)
                else:
                    s = term_sort(t.weight)
                    if s is not None and not s.numeric:
                        self.err(f"aggregate weight has non-numeric sort {s}", t.weight)
                    self.term(t.weight, inner)
            return
        raise TypeError(t)

    def formula(self, f, bound: set) -> None:
        if isinstance(f, Truth):
            return
        if isinstance(f, Atom):
            if self.symbol_ok(f.pred, f):
                self.args(f.pred, f.args, f)
            for a in f.args:
                self.term(a, bound)
            return
        if isinstance(f, Cmp):
            self.term(f.left, bound)
            self.term(f.right, bound)
            ls, rs = term_sort(f.left), term_sort(f.right)
            if f.op in ("=", "~="):
                if not _comparable(ls, rs) and not (isinstance(f.left, Var) and ls is None) \
                        and not (isinstance(f.right, Var) and rs is None):
                    self.err(f"cannot compare sorts {ls} and {rs}", f)
            else:
                for side, s in ((f.left, ls), (f.right, rs)):
                    if s is not None and not s.numeric or (isinstance(side, Const) and isinstance(side.value, str)):
                        self.err(f"ordering comparison on non-numeric term", side if getattr(side, 'span', None) else f)
            return
        if isinstance(f, Quantifier):
            for v in f.vars:
                if v.sort is None:
                    self.err(f"cannot derive sort of variable {v.name}", v if v.span else f)
            self.formula(f.body, bound | {v.name for v in f.vars})
            return
        for c in children(f):
            self.formula(c, bound)


def _polarity_occurrences(node, negative: bool, out: list) -> None:
    """Collect (symbol, occurs_negatively) pairs."""
    if isinstance(node, Atom):
        out.append((node.pred, negative))
        for a in node.args:
            _polarity_occurrences(a, negative, out)
        return
    if isinstance(node, App):
        out.append((node.symbol, negative))
        for a in node.args:
            _polarity_occurrences(a, negative, out)
        return
    if isinstance(node, Agg):
        _polarity_occurrences(node.cond, True, out)
        if node.weight is not None:
            _polarity_occurrences(node.weight, True, out)
        return
    if isinstance(node, Not):
        _polarity_occurrences(node.arg, not negative, out)
        return
    if isinstance(node, Implies):
        _polarity_occurrences(node.left, not negative, out)
        _polarity_occurrences(node.right, negative, out)
        return
    if isinstance(node, (Equiv, ExistsOne)):
        for c in children(node):
            _polarity_occurrences(c, True, out)
        return
    for c in children(node):
        _polarity_occurrences(c, negative, out)


def _sccs(nodes: list, edges: dict) -> list[list]:
    index: dict = {}
    low: dict = {}
    stack: list = []
    on: set = set()
    out: list[list] = []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w, _ in edges.get(v, ()):
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(comp)

    for n in nodes:
        if n not in index:
            visit(n)
    return out


def stratify(theory: Theory) -> tuple[dict, list[Diagnostic]]:
    """Assign a stratum to every defined symbol; reject recursion through
    negation (and through aggregates, which are not monotone)."""
    defined = theory.defined_symbols()
    edges: dict = {s: [] for s in defined}
    for d in theory.definitions:
        for r in d.rules:
            occ: list = []
            _polarity_occurrences(r.body, False, occ)
            for sym, neg in occ:
                if sym in edges:
                    edges[r.head_symbol].append((sym, neg))
    diags = []
    comps = _sccs(defined, edges)
    comp_of = {s: i for i, comp in enumerate(comps) for s in comp}
    for comp in comps:
        members = set(comp)
        for s in comp:
            if any(w in members and neg for w, neg in edges[s]):
                diags.append(Diagnostic(f"definition of {s} recurses through negation or an aggregate"))
                break
    # Tarjan emits components in reverse topological order (dependencies first).
    level: dict[int, int] = {}
    for i, comp in enumerate(comps):
        deps = [comp_of[w] for s in comp for w, _ in edges[s] if comp_of[w] != i]
        level[i] = 1 + max((level[j] for j in deps), default=-1)
    return {s: level[comp_of[s]] for s in defined}, diags


def check_definition(d: Definition, checker: _Checker) -> None:
    for r in d.rules:
        names = [v.name for v in r.vars]
        for v in r.vars:
            if v.sort is None:
                checker.err(f"cannot derive sort of variable {v.name}", v if v.span else r)
        sym = r.head_symbol
        if isinstance(sym, Unresolved):
            checker.err(f"unknown symbol {sym}", r)
            continue
        if isinstance(r.head, Cmp) and not (r.head.op == "=" and isinstance(r.head.left, App)):
            checker.err("rule head must be an atom or f(x..) = y", r)
            continue
        checker.symbol_ok(sym, r)
        head_args = r.head_args
        if isinstance(r.head, Atom):
            checker.args(sym, r.head.args, r.head)
        else:
            checker.args(sym, r.head.left.args, r.head)
            checker.args(Predicate(sym.name, sym.graph_sorts), head_args, r.head)
        seen = set()
        for a in head_args:
            if not isinstance(a, Var) or a.name not in names:
                checker.err("rule head arguments must be variables of the rule", r)
                break
            if a.name in seen:
                checker.err(f"variable {a.name} repeated in rule head", r)
                break
            seen.add(a.name)
        checker.formula(r.body, set(names))


def check_well_formed(theory: Theory) -> list[Diagnostic]:
    """Sort-check every sentence and definition; returns diagnostics."""
    checker = _Checker(theory.vocabulary)
    for s in theory.sentences:
        checker.formula(s, set())
    owner: dict = {}
    for d in theory.definitions:
        check_definition(d, checker)
        for sym in d.defined_symbols:
            if sym in owner and owner[sym] is not d:
                checker.err(f"symbol {sym} is defined by more than one definition", d)
            owner[sym] = d
    _, diags = stratify(theory)
    return checker.diags + diags


def check_formula(f, vocabulary: Vocabulary | None = None, free_ok: bool = True) -> list[Diagnostic]:
    """Sort-check a standalone formula; free variables are allowed when
    ``free_ok`` (query formulas)."""
    checker = _Checker(vocabulary)
    bound = {v.name for v in free_variables(f)} if free_ok else set()
    checker.formula(f, bound)
    return checker.diags
