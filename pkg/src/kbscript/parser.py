"""Recursive-descent parser for program files.

Top level: ``#include "file"``, ``namespace``, ``vocabulary``, ``theory``,
``structure`` and ``procedure`` blocks.  Formulas use the ASCII notation
``! ? ?1 & | ~ => <=>``; procedure bodies use a small Lua-like language.
"""

from __future__ import annotations

import os
from pathlib import Path

from . import script_ast as S
from .errors import DomainError, KBError, ParseError, ResolveError, SortError, Span
from .lexer import Lexer, Token, TokenStream
from .logic import (
    AGG_KINDS, Agg, And, App, Arith, Atom, Cmp, Const, Definition, Equiv, Exists, ExistsOne,
    Forall, Function, Implies, Not, Or, Predicate, Rule, Sort, Theory, Truth, Unresolved, Var,
    Vocabulary, check_formula, check_well_formed, infer_sorts,
)
from .program import Namespace, Program, resolve_name
from .structures import Structure

# formula operators: precedence and associativity
_FBIN = {
    "<=>": (1, "left"), "=>": (2, "right"), "|": (3, "left"), "&": (4, "left"),
    "=": (6, "none"), "~=": (6, "none"), "<": (6, "none"), "=<": (6, "none"),
    "<=": (6, "none"), ">": (6, "none"), ">=": (6, "none"),
    "+": (7, "left"), "-": (7, "left"), "*": (8, "left"), "/": (8, "left"), "%": (8, "left"),
}
_CMP = {"=", "~=", "<", "=<", "<=", ">", ">="}

# script operators
_SBIN = {
    "or": (1, "left"), "and": (2, "left"),
    "<": (3, "left"), ">": (3, "left"), "<=": (3, "left"), ">=": (3, "left"),
    "~=": (3, "left"), "==": (3, "left"),
    "..": (4, "right"), "+": (5, "left"), "-": (5, "left"),
    "*": (6, "left"), "/": (6, "left"), "%": (6, "left"),
}
_SUNARY_PREC = 7
RESERVED = {"and", "break", "do", "else", "elseif", "end", "false", "for", "if", "in", "local",
            "nil", "not", "or", "repeat", "return", "then", "true", "until", "while"}
_BLOCK_KEYWORDS = {"vocabulary", "theory", "structure", "procedure", "namespace"}


class _Recover(Exception):
    pass


class Parser:
    def __init__(self, include_paths=()):
        self.include_paths = [Path(p) for p in include_paths]
        self.program = Program()
        self.diags: list[tuple[type, object]] = []
        self._stack: list[str] = []
        self._done: set[str] = set()

    # -- diagnostics ------------------------------------------------------

    def _record(self, err: KBError) -> None:
        cls = type(err) if isinstance(err, ParseError) else ParseError
        for d in getattr(err, "diagnostics", [None]):
            self.diags.append((cls, d))

    def finish(self) -> Program:
        if self.diags:
            cls = self.diags[0][0]
            diags = [d for _, d in self.diags]
            msg = "; ".join(str(d) for d in diags)
            raise cls(msg if len(diags) > 1 else diags[0].message, diags[0].span, diags)
        return self.program

    # -- files ------------------------------------------------------------

    def parse_file(self, path) -> Program:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"cannot open {path}: {e.strerror}") from e
        self.parse_text(text, str(path), path.parent)
        return self.program

    def parse_text(self, text: str, file: str = "<input>", base: Path | None = None,
                   ns: Namespace | None = None) -> None:
        key = os.path.abspath(file) if base is not None else file
        self._stack.append(key)
        self.program.files.append(file)
        self.program.include_graph.setdefault(file, [])
        ts = TokenStream(Lexer(text, file))
        self._items(ts, ns or self.program.root, base or Path.cwd(), nested=False)
        self._stack.pop()
        self._done.add(key)

    def _find_include(self, name: str, base: Path, span: Span) -> Path:
        for d in [base] + self.include_paths:
            p = d / name
            if p.is_file():
                return p
        raise ResolveError(f"cannot open include file {name}", span)

    # -- top level --------------------------------------------------------

    def _items(self, ts: TokenStream, ns: Namespace, base: Path, nested: bool) -> None:
        while True:
            ts.set_mode("block")
            try:
                tok = ts.peek()
            except ParseError as e:
                self._record(e)
                return
            if tok.kind == "eof":
                if nested:
                    self._record(ParseError("missing '}' at end of namespace", tok.span))
                return
            if nested and tok.is_op("}"):
                ts.next()
                return
            start = ts.pos
            try:
                self._item(ts, ns, base)
            except ParseError as e:
                self._record(e)
                try:
                    self._skip_block(ts, start)
                except (ParseError, _Recover):
                    return

    def _skip_block(self, ts: TokenStream, start: int) -> None:
        """Skip the block that started at ``start`` (balanced braces)."""
        ts.seek(start)
        ts.set_mode("block")
        first = ts.next()
        if first.kind == "eof":
            raise _Recover()
        if first.is_op("#"):
            ts.next()
            if ts.peek().kind == "str":
                ts.next()
            return
        body_mode = "proc" if first.is_id("procedure") else "block"
        while True:
            t = ts.next()
            if t.kind == "eof":
                raise _Recover()
            if t.is_op("{"):
                break
            if t.is_id(*_BLOCK_KEYWORDS) and t is not first:
                ts.seek(t.start)
                return
        ts.set_mode(body_mode)
        depth = 1
        while depth:
            t = ts.next()
            if t.kind == "eof":
                raise _Recover()
            if t.is_op("{"):
                depth += 1
            elif t.is_op("}"):
                depth -= 1
        ts.set_mode("block")

    def _item(self, ts: TokenStream, ns: Namespace, base: Path) -> None:
        tok = ts.peek()
        if tok.is_op("#"):
            ts.next()
            kw = self._expect_id(ts)
            if kw.value != "include":
                raise ParseError(f"unknown directive #{kw.value}", kw.span)
            name = ts.next()
            if name.kind != "str":
                raise ParseError("expected a file name string after #include", name.span)
            self._include(name.value, base, name.span, ns, ts)
        elif tok.is_id("namespace"):
            ts.next()
            name = self._expect_id(ts)
            self._expect(ts, "{")
            try:
                child = ns.child(name.value)
            except ResolveError as e:
                raise ResolveError(str(e), name.span)
            self._items(ts, child, base, nested=True)
        elif tok.is_id("vocabulary"):
            self._vocabulary(ts, ns)
        elif tok.is_id("theory"):
            self._theory(ts, ns)
        elif tok.is_id("structure"):
            self._structure(ts, ns)
        elif tok.is_id("procedure"):
            self._procedure(ts, ns)
        else:
            raise ParseError(f"expected a block, found {tok}", tok.span)

    def _include(self, name: str, base: Path, span: Span, ns: Namespace, ts: TokenStream) -> None:
        path = self._find_include(name, base, span)
        key = os.path.abspath(path)
        current = ts.lexer.file
        self.program.include_graph.setdefault(current, []).append(str(path))
        if key in self._stack:
            raise ResolveError(f"include cycle through {name}", span)
        if key in self._done:
            return
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ResolveError(f"cannot open include file {name}: {e.strerror}", span) from e
        self.parse_text(text, str(path), path.parent, ns)

    # -- token helpers ----------------------------------------------------

    def _expect(self, ts: TokenStream, op: str) -> Token:
        t = ts.next()
        if not t.is_op(op):
            raise ParseError(f"expected '{op}', found {t}", t.span)
        return t

    def _expect_id(self, ts: TokenStream, what: str = "an identifier") -> Token:
        t = ts.next()
        if t.kind != "id":
            raise ParseError(f"expected {what}, found {t}", t.span)
        return t

    def _expect_kw(self, ts: TokenStream, kw: str) -> Token:
        t = ts.next()
        if not t.is_id(kw):
            raise ParseError(f"expected '{kw}', found {t}", t.span)
        return t

    def _qname(self, ts: TokenStream) -> tuple[tuple[str, ...], Span]:
        first = self._expect_id(ts)
        parts = [first.value]
        while ts.peek().is_op("::"):
            ts.next()
            parts.append(self._expect_id(ts).value)
        return tuple(parts), first.span

    def _resolve(self, path, ns, span, kind, what):
        obj = resolve_name(path, ns, span)
        if not isinstance(obj, kind):
            raise ResolveError(f"{'::'.join(path)} is not a {what}", span)
        return obj

    # -- vocabulary -------------------------------------------------------

    def _vocabulary(self, ts: TokenStream, ns: Namespace) -> None:
        ts.next()
        name = self._expect_id(ts)
        voc = Vocabulary(name.value, ns.path + (name.value,))
        self._expect(ts, "{")
        while not ts.peek().is_op("}"):
            t = ts.peek()
            if t.kind == "eof":
                raise ParseError("missing '}' at end of vocabulary", t.span)
            if t.is_op(";"):
                ts.next()
                continue
            try:
                if t.is_id("extern"):
                    ts.next()
                    self._expect_kw(ts, "vocabulary")
                    path, span = self._qname(ts)
                    other = self._resolve(path, ns, span, Vocabulary, "vocabulary")
                    voc.add_extends(other)
                elif t.is_id("type"):
                    ts.next()
                    sname = self._expect_id(ts, "a sort name")
                    parent = None
                    if ts.peek().is_id("isa"):
                        ts.next()
                        pname = self._expect_id(ts, "a sort name")
                        parent = voc.sort(pname.value)
                        if parent is None:
                            raise ResolveError(f"unknown sort {pname.value}", pname.span)
                    voc.add_sort(Sort(sname.value, parent))
                else:
                    partial = False
                    if t.is_id("partial"):
                        ts.next()
                        partial = True
                    sym_name = self._expect_id(ts, "a symbol declaration")
                    sorts = []
                    if ts.peek().is_op("("):
                        ts.next()
                        if not ts.peek().is_op(")"):
                            sorts.append(self._sort_ref(ts, voc))
                            while ts.peek().is_op(","):
                                ts.next()
                                sorts.append(self._sort_ref(ts, voc))
                        self._expect(ts, ")")
                    if ts.peek().is_op(":"):
                        ts.next()
                        out = self._sort_ref(ts, voc)
                        voc.add_symbol(Function(sym_name.value, tuple(sorts), out, partial))
                    else:
                        if partial:
                            raise ParseError("only functions can be partial", sym_name.span)
                        voc.add_symbol(Predicate(sym_name.value, tuple(sorts)))
            except ValueError as e:
                raise ParseError(str(e), t.span)
        ts.next()
        ns.add(name.value, voc, name.span)

    def _sort_ref(self, ts: TokenStream, voc: Vocabulary) -> Sort:
        t = self._expect_id(ts, "a sort name")
        s = voc.sort(t.value)
        if s is None:
            raise ResolveError(f"unknown sort {t.value}", t.span)
        return s

    # -- theory -----------------------------------------------------------

    def _theory(self, ts: TokenStream, ns: Namespace) -> None:
        ts.next()
        name = self._expect_id(ts)
        self._expect(ts, ":")
        path, span = self._qname(ts)
        voc = self._resolve(path, ns, span, Vocabulary, "vocabulary")
        self._expect(ts, "{")
        sentences, definitions = [], []
        while not ts.peek().is_op("}"):
            t = ts.peek()
            if t.kind == "eof":
                raise ParseError("missing '}' at end of theory", t.span)
            if t.is_op("{") or (t.is_id("define") and ts.peek(1).is_op("{")):
                if t.is_id("define"):
                    ts.next()
                ts.next()
                rules = []
                while not ts.peek().is_op("}"):
                    if ts.peek().kind == "eof":
                        raise ParseError("missing '}' at end of definition", ts.peek().span)
                    rules.append(self._rule(ts, voc))
                ts.next()
                definitions.append(Definition(tuple(rules), span=t.span))
            else:
                sentences.append(self.formula_from_tokens(ts, voc, free_ok=False))
                self._expect(ts, ".")
        ts.next()
        theory = Theory(name.value, voc, sentences, definitions, ns.path + (name.value,), name.span)
        diags = check_well_formed(theory)
        if diags:
            raise SortError(diags[0].message, diags[0].span, diags)
        ns.add(name.value, theory, name.span)

    def _rule(self, ts: TokenStream, voc: Vocabulary) -> Rule:
        start = ts.peek()
        raw_vars = []
        if start.is_op("!"):
            ts.next()
            raw_vars = self._quant_vars(ts)
        head = self._fexpr(ts, 1)
        body = ("bool", True, head_span(head))
        if ts.peek().is_op("<-"):
            ts.next()
            body = self._fexpr(ts, 1)
        self._expect(ts, ".")
        conv = _Converter(voc)
        rule_vars = conv.vars(raw_vars)
        scope = {v.name: v for v in rule_vars}
        head_f = conv.formula(head, scope)
        if not isinstance(head_f, (Atom, Cmp)):
            raise ParseError("rule head must be an atom or f(x..) = y", start.span)
        rule = Rule(tuple(rule_vars), head_f, conv.formula(body, scope), span=start.span)
        return infer_sorts(rule)

    # -- formulas ---------------------------------------------------------

    def formula_from_tokens(self, ts: TokenStream, voc: Vocabulary, free_ok: bool = True,
                            free_sorts: dict | None = None):
        raw = self._fexpr(ts, 1)
        f = _Converter(voc).formula(raw, {})
        return infer_sorts(f, free_sorts)

    def _quant_vars(self, ts: TokenStream) -> list:
        out = []
        while ts.peek().kind == "id":
            t = ts.next()
            sort = None
            if ts.peek().is_op("["):
                ts.next()
                sort = self._expect_id(ts, "a sort name")
                self._expect(ts, "]")
            out.append((t.value, sort, t.span))
        if not out:
            raise ParseError("expected variables", ts.peek().span)
        self._expect(ts, ":")
        return out

    def _fexpr(self, ts: TokenStream, min_prec: int):
        left = self._fprefix(ts)
        while True:
            t = ts.peek()
            if t.kind != "op" or t.value not in _FBIN:
                return left
            prec, assoc = _FBIN[t.value]
            if prec < min_prec:
                return left
            ts.next()
            right = self._fexpr(ts, prec if assoc == "right" else prec + 1)
            left = ("bin", t.value, left, right, t.span)
            if assoc == "none" and ts.peek().kind == "op" and ts.peek().value in _CMP:
                raise ParseError("comparisons cannot be chained", ts.peek().span)

    def _fprefix(self, ts: TokenStream):
        t = ts.next()
        if t.is_op("!", "?"):
            kind = t.value
            nt = ts.peek()
            if kind == "?" and nt.kind == "int" and nt.value == 1 and nt.start == t.end:
                ts.next()
                kind = "?1"
            qvars = self._quant_vars(ts)
            body = self._fexpr(ts, 1)
            return ("quant", kind, qvars, body, t.span)
        if t.is_op("~"):
            return ("not", self._fexpr(ts, 5), t.span)
        if t.is_op("-"):
            return ("neg", self._fexpr(ts, 9), t.span)
        if t.is_op("("):
            inner = self._fexpr(ts, 1)
            self._expect(ts, ")")
            return inner
        if t.kind == "int":
            return ("int", t.value, t.span)
        if t.kind == "str":
            return ("str", t.value, t.span)
        if t.is_op("#") and ts.peek().is_op("{"):
            return self._aggregate(ts, "card", t.span)
        if t.kind == "id":
            if t.value in ("true", "false"):
                return ("bool", t.value == "true", t.span)
            if t.value in AGG_KINDS and ts.peek().is_op("{"):
                return self._aggregate(ts, t.value, t.span)
            if t.value == "abs" and ts.peek().is_op("("):
                ts.next()
                inner = self._fexpr(ts, 1)
                self._expect(ts, ")")
                return ("abs", inner, t.span)
            args = None
            if ts.peek().is_op("(") and ts.peek().start == t.end:
                ts.next()
                args = []
                if not ts.peek().is_op(")"):
                    args.append(self._fexpr(ts, 1))
                    while ts.peek().is_op(","):
                        ts.next()
                        args.append(self._fexpr(ts, 1))
                self._expect(ts, ")")
            return ("name", t.value, args, t.span)
        raise ParseError(f"unexpected {t} in formula", t.span)

    def _aggregate(self, ts: TokenStream, kind: str, span: Span):
        self._expect(ts, "{")
        qvars = self._quant_vars(ts)
        cond = self._fexpr(ts, 1)
        weight = None
        if ts.peek().is_op(":"):
            ts.next()
            weight = self._fexpr(ts, 1)
        self._expect(ts, "}")
        return ("agg", kind, qvars, cond, weight, span)

    # -- structure --------------------------------------------------------

    def _structure(self, ts: TokenStream, ns: Namespace) -> None:
        ts.next()
        name = self._expect_id(ts)
        self._expect(ts, ":")
        path, span = self._qname(ts)
        voc = self._resolve(path, ns, span, Vocabulary, "vocabulary")
        self._expect(ts, "{")
        domains, entries = [], []
        while not ts.peek().is_op("}"):
            t = ts.peek()
            if t.kind == "eof":
                raise ParseError("missing '}' at end of structure", t.span)
            if t.is_op(";"):
                ts.next()
                continue
            ident = self._expect_id(ts, "a sort or symbol name")
            part = ""
            if ts.peek().is_op("<"):
                ts.next()
                part = self._expect_id(ts, "ct, cf or u").value
                if part not in ("ct", "cf", "u"):
                    raise ParseError(f"unknown interpretation part <{part}>", ident.span)
                self._expect(ts, ">")
            self._expect(ts, "=")
            sort = voc.sort(ident.value)
            if sort is not None and not part:
                domains.append((sort, self._domain_value(ts), ident.span))
                continue
            syms = voc.symbols_named(ident.value)
            if not syms:
                raise ResolveError(f"unknown symbol {ident.value} in vocabulary {voc.name}", ident.span)
            if len(syms) > 1:
                raise ParseError(f"symbol name {ident.value} is overloaded; cannot interpret", ident.span)
            entries.append((syms[0], part, self._interp_value(ts, syms[0]), ident.span))
        ts.next()
        s = Structure(voc, name.value, ns.path + (name.value,))
        s.namespace = ns
        for sort, elems, sp in domains:
            try:
                s.set_domain(sort, elems)
            except DomainError as e:
                raise SortError(str(e), sp)
        self._fill_structure(s, entries)
        ns.add(name.value, s, name.span)

    def _domain_value(self, ts: TokenStream) -> list:
        self._expect(ts, "{")
        out = []
        if ts.peek().is_op("}"):
            ts.next()
            return out
        first = self._element(ts)
        if ts.peek().is_op(".."):
            ts.next()
            last = self._element(ts)
            if not isinstance(first, int) or not isinstance(last, int):
                raise ParseError("range endpoints must be integers", ts.last.span)
            self._expect(ts, "}")
            return list(range(first, last + 1))
        out.append(first)
        while ts.peek().is_op(",", ";"):
            ts.next()
            if ts.peek().is_op("}"):
                break
            out.append(self._element(ts))
        self._expect(ts, "}")
        return out

    def _element(self, ts: TokenStream):
        t = ts.next()
        if t.is_op("-") and ts.peek().kind == "int":
            return -ts.next().value
        if t.kind in ("int", "str"):
            return t.value
        if t.kind == "id" and t.value not in ("true", "false"):
            return t.value
        raise ParseError(f"expected a domain element, found {t}", t.span)

    def _interp_value(self, ts: TokenStream, sym):
        t = ts.peek()
        if t.is_id("procedure"):
            ts.next()
            path, _ = self._qname(ts)
            return ("procedure", path)
        if t.is_id("true", "false") and sym.arity == 0 and isinstance(sym, Predicate):
            ts.next()
            return ("tuples", [()] if t.value == "true" else [], t.span)
        if not t.is_op("{"):
            if isinstance(sym, Function) and sym.arity == 0:
                return ("tuples", [(self._element(ts),)], t.span)
            raise ParseError(f"expected '{{' after {sym.name} =", t.span)
        ts.next()
        tuples = []
        while not ts.peek().is_op("}"):
            tuples.append(self._tuple(ts, sym))
            if ts.peek().is_op(";"):
                ts.next()
            elif not ts.peek().is_op("}"):
                raise ParseError(f"expected ';' or '}}', found {ts.peek()}", ts.peek().span)
        ts.next()
        return ("tuples", tuples, t.span)

    def _tuple(self, ts: TokenStream, sym) -> tuple:
        elems = []
        if ts.peek().is_op("("):
            ts.next()
            if not ts.peek().is_op(")"):
                elems.append(self._element(ts))
                while ts.peek().is_op(","):
                    ts.next()
                    elems.append(self._element(ts))
            self._expect(ts, ")")
        elif not ts.peek().is_op("->"):
            elems.append(self._element(ts))
            while ts.peek().is_op(","):
                ts.next()
                elems.append(self._element(ts))
        if ts.peek().is_op("->"):
            arrow = ts.next()
            if not isinstance(sym, Function):
                raise ParseError(f"{sym.name} is not a function", arrow.span)
            elems.append(self._element(ts))
        return tuple(elems)

    def _fill_structure(self, s: Structure, entries) -> None:
        grouped: dict = {}
        for sym, part, value, span in entries:
            if value[0] == "procedure":
                s.procedural.append((sym, value[1]))
                continue
            g = grouped.setdefault(sym, {})
            if part in g:
                raise ParseError(f"{sym.name}{'<' + part + '>' if part else ''} given twice", span)
            for tup in value[1]:
                if len(tup) != len(sym.graph_sorts):
                    raise SortError(f"tuple of wrong length for {sym}", span)
                try:
                    ok = s.in_space(sym, tup)
                except KBError as e:
                    raise SortError(str(e), span)
                if not ok:
                    raise SortError(f"tuple ({','.join(map(str, tup))}) is outside the domains of {sym}", span)
            g[part] = (set(value[1]), span)
        for sym, g in grouped.items():
            span = next(iter(g.values()))[1]
            try:
                space = set(s.tuple_space(sym))
            except KBError as e:
                raise SortError(str(e), span)
            if "" in g:
                if len(g) > 1:
                    raise ParseError(f"{sym.name} is given both two-valued and three-valued", span)
                ct = g[""][0]
                cf = space - ct
                if isinstance(sym, Function):
                    counts: dict = {}
                    for t in ct:
                        counts[t[:-1]] = counts.get(t[:-1], 0) + 1
                    for args in {t[:-1] for t in space}:
                        n = counts.get(args, 0)
                        if n > 1 or (n == 0 and not sym.partial):
                            raise SortError(f"{sym.name} must map ({','.join(map(str, args))}) to exactly one value", span)
            else:
                ct, cf, u = (g[k][0] if k in g else None for k in ("ct", "cf", "u"))
                if u is not None:
                    if ct is not None and cf is not None:
                        if ct | cf | u != space or ct & u or cf & u:
                            raise SortError(f"{sym.name}: ct, cf and u do not partition the tuple space", span)
                    elif ct is not None:
                        cf = space - ct - u
                    elif cf is not None:
                        ct = space - cf - u
                    else:
                        raise SortError(f"{sym.name}: give two of <ct>, <cf>, <u>", span)
                ct, cf = ct or set(), cf or set()
                if ct & cf:
                    raise SortError(f"{sym.name}: tuples both certainly true and certainly false", span)
            interp = s.interp(sym)
            interp.ct, interp.cf = set(ct), set(cf)

    # -- procedures -------------------------------------------------------

    def _procedure(self, ts: TokenStream, ns: Namespace) -> None:
        ts.next()
        name = self._expect_id(ts)
        self._expect(ts, "(")
        params = []
        if not ts.peek().is_op(")"):
            params.append(self._expect_id(ts, "a parameter name").value)
            while ts.peek().is_op(","):
                ts.next()
                params.append(self._expect_id(ts, "a parameter name").value)
        self._expect(ts, ")")
        self._expect(ts, "{")
        ts.set_mode("proc")
        body = self._sblock(ts)
        self._expect(ts, "}")
        ts.set_mode("block")
        proc = S.Procedure(name.value, tuple(params), tuple(body), ns.path + (name.value,), ns, name.span)
        ns.add(name.value, proc, name.span)

    def _sblock(self, ts: TokenStream, terminators=()) -> list:
        out = []
        while True:
            t = ts.peek()
            if t.kind == "eof" or t.is_op("}") or (t.kind == "id" and t.value in terminators):
                return out
            if t.is_op(";"):
                ts.next()
                continue
            out.append(self._statement(ts))
            if isinstance(out[-1], (S.Return, S.Break)):
                while ts.peek().is_op(";"):
                    ts.next()

    def _statement(self, ts: TokenStream):
        t = ts.peek()
        line = t.span.line
        if t.is_id("local"):
            ts.next()
            names = [self._name_token(ts).value]
            while ts.peek().is_op(","):
                ts.next()
                names.append(self._name_token(ts).value)
            exprs = []
            if ts.peek().is_op("="):
                ts.next()
                exprs = self._sexprlist(ts)
            return S.Local(tuple(names), tuple(exprs), line)
        if t.is_id("if"):
            ts.next()
            clauses = []
            cond = self._sexpr(ts, 1)
            self._expect_kw(ts, "then")
            clauses.append((cond, tuple(self._sblock(ts, ("else", "elseif", "end")))))
            orelse = None
            while True:
                k = ts.next()
                if k.is_id("elseif"):
                    cond = self._sexpr(ts, 1)
                    self._expect_kw(ts, "then")
                    clauses.append((cond, tuple(self._sblock(ts, ("else", "elseif", "end")))))
                elif k.is_id("else"):
                    orelse = tuple(self._sblock(ts, ("end",)))
                    self._expect_kw(ts, "end")
                    break
                elif k.is_id("end"):
                    break
                else:
                    raise ParseError(f"expected 'end', found {k}", k.span)
            return S.If(tuple(clauses), orelse, line)
        if t.is_id("while"):
            ts.next()
            cond = self._sexpr(ts, 1)
            self._expect_kw(ts, "do")
            body = self._sblock(ts, ("end",))
            self._expect_kw(ts, "end")
            return S.While(cond, tuple(body), line)
        if t.is_id("repeat"):
            ts.next()
            body = self._sblock(ts, ("until",))
            self._expect_kw(ts, "until")
            return S.Repeat(tuple(body), self._sexpr(ts, 1), line)
        if t.is_id("for"):
            ts.next()
            first = self._name_token(ts).value
            if ts.peek().is_op("="):
                ts.next()
                start = self._sexpr(ts, 1)
                self._expect(ts, ",")
                stop = self._sexpr(ts, 1)
                step = None
                if ts.peek().is_op(","):
                    ts.next()
                    step = self._sexpr(ts, 1)
                self._expect_kw(ts, "do")
                body = self._sblock(ts, ("end",))
                self._expect_kw(ts, "end")
                return S.NumFor(first, start, stop, step, tuple(body), line)
            names = [first]
            while ts.peek().is_op(","):
                ts.next()
                names.append(self._name_token(ts).value)
            self._expect_kw(ts, "in")
            expr = self._sexpr(ts, 1)
            self._expect_kw(ts, "do")
            body = self._sblock(ts, ("end",))
            self._expect_kw(ts, "end")
            return S.GenFor(tuple(names), expr, tuple(body), line)
        if t.is_id("return"):
            ts.next()
            nt = ts.peek()
            if nt.kind == "eof" or nt.is_op("}", ";") or nt.is_id("end", "else", "elseif", "until"):
                return S.Return((), line)
            return S.Return(tuple(self._sexprlist(ts)), line)
        if t.is_id("break"):
            ts.next()
            return S.Break(line)
        expr = self._ssuffixed(ts)
        if ts.peek().is_op("=", ","):
            targets = [expr]
            while ts.peek().is_op(","):
                ts.next()
                targets.append(self._ssuffixed(ts))
            for tg in targets:
                if not isinstance(tg, (S.Name, S.Index, S.Field)):
                    raise ParseError("cannot assign to this expression", t.span)
            self._expect(ts, "=")
            return S.Assign(tuple(targets), tuple(self._sexprlist(ts)), line)
        if not isinstance(expr, S.Call):
            raise ParseError("syntax error: expected a statement", t.span)
        return S.ExprStmt(expr, line)

    def _name_token(self, ts: TokenStream) -> Token:
        t = self._expect_id(ts, "a name")
        if t.value in RESERVED:
            raise ParseError(f"unexpected keyword '{t.value}'", t.span)
        return t

    def _sexprlist(self, ts: TokenStream) -> list:
        out = [self._sexpr(ts, 1)]
        while ts.peek().is_op(","):
            ts.next()
            out.append(self._sexpr(ts, 1))
        return out

    def _binop_token(self, t: Token):
        if t.kind == "op" and t.value in _SBIN:
            return t.value
        if t.is_id("and", "or"):
            return t.value
        return None

    def _sexpr(self, ts: TokenStream, min_prec: int):
        t = ts.peek()
        if t.is_id("not") or t.is_op("-", "#"):
            ts.next()
            left = S.UnOp(t.value, self._sexpr(ts, _SUNARY_PREC), t.span.line)
        else:
            left = self._ssimple(ts)
        while True:
            op = self._binop_token(ts.peek())
            if op is None:
                return left
            prec, assoc = _SBIN[op]
            if prec < min_prec:
                return left
            ot = ts.next()
            right = self._sexpr(ts, prec if assoc == "right" else prec + 1)
            left = S.BinOp(op, left, right, ot.span.line)

    def _ssimple(self, ts: TokenStream):
        t = ts.peek()
        if t.kind == "int":
            ts.next()
            return S.Literal(t.value, t.span.line)
        if t.kind == "str":
            ts.next()
            return S.Literal(t.value, t.span.line)
        if t.is_id("nil", "true", "false"):
            ts.next()
            return S.Literal({"nil": None, "true": True, "false": False}[t.value], t.span.line)
        if t.is_op("{"):
            return self._table(ts)
        return self._ssuffixed(ts)

    def _table(self, ts: TokenStream):
        t = self._expect(ts, "{")
        items, fields = [], []
        while not ts.peek().is_op("}"):
            p = ts.peek()
            if p.kind == "id" and p.value not in RESERVED and ts.peek(1).is_op("="):
                ts.next()
                ts.next()
                fields.append((S.Literal(p.value, p.span.line), self._sexpr(ts, 1)))
            elif p.is_op("["):
                ts.next()
                key = self._sexpr(ts, 1)
                self._expect(ts, "]")
                self._expect(ts, "=")
                fields.append((key, self._sexpr(ts, 1)))
            else:
                items.append(self._sexpr(ts, 1))
            if ts.peek().is_op(",", ";"):
                ts.next()
            elif not ts.peek().is_op("}"):
                raise ParseError(f"expected ',' or '}}' in table, found {ts.peek()}", ts.peek().span)
        ts.next()
        return S.Table(tuple(items), tuple(fields), t.span.line)

    def _ssuffixed(self, ts: TokenStream):
        t = ts.next()
        if t.is_op("("):
            expr = self._sexpr(ts, 1)
            self._expect(ts, ")")
        elif t.kind == "id" and t.value not in RESERVED:
            path = [t.value]
            while ts.peek().is_op("::"):
                ts.next()
                path.append(self._name_token(ts).value)
            expr = S.Name(tuple(path), t.span.line)
        else:
            raise ParseError(f"unexpected {t}", t.span)
        while True:
            p = ts.peek()
            if p.is_op("."):
                ts.next()
                expr = S.Field(expr, self._expect_id(ts, "a field name").value, p.span.line)
            elif p.is_op("["):
                ts.next()
                key = self._sexpr(ts, 1)
                self._expect(ts, "]")
                expr = S.Index(expr, key, p.span.line)
            elif p.is_op("("):
                ts.next()
                args = []
                if not ts.peek().is_op(")"):
                    args = self._sexprlist(ts)
                self._expect(ts, ")")
                expr = S.Call(expr, tuple(args), p.span.line)
            else:
                return expr


def head_span(raw):
    return raw[-1]


class _Converter:
    """Turns the generic formula parse tree into logic AST nodes."""

    def __init__(self, voc: Vocabulary):
        self.voc = voc

    def vars(self, raw_vars) -> list[Var]:
        out = []
        for name, sort_tok, span in raw_vars:
            sort = None
            if sort_tok is not None:
                sort = self.voc.sort(sort_tok.value)
                if sort is None:
                    raise ResolveError(f"unknown sort {sort_tok.value}", sort_tok.span)
            out.append(Var(name, sort, span=span))
        return out

    def formula(self, n, scope: dict):
        kind = n[0]
        if kind == "quant":
            _, q, raw_vars, body, span = n
            vs = self.vars(raw_vars)
            inner = dict(scope)
            inner.update({v.name: v for v in vs})
            cls = {"!": Forall, "?": Exists, "?1": ExistsOne}[q]
            return cls(tuple(vs), self.formula(body, inner), span=span)
        if kind == "bin":
            _, op, l, r, span = n
            if op == "<=>":
                return Equiv(self.formula(l, scope), self.formula(r, scope), span=span)
            if op == "=>":
                return Implies(self.formula(l, scope), self.formula(r, scope), span=span)
            if op in ("&", "|"):
                cls = And if op == "&" else Or
                args = []
                for side in (l, r):
                    f = self.formula(side, scope)
                    args.extend(f.args if isinstance(f, cls) else [f])
                return cls(tuple(args), span=span)
            if op in _CMP:
                op = "=<" if op == "<=" else op
                return Cmp(op, self.term(l, scope), self.term(r, scope), span=span)
            raise ParseError(f"'{op}' builds a term, not a formula", span)
        if kind == "not":
            return Not(self.formula(n[1], scope), span=n[2])
        if kind == "bool":
            return Truth(n[1], span=n[2])
        if kind == "name":
            _, name, args, span = n
            if args is None and name in scope:
                raise ParseError(f"variable {name} used as a formula", span)
            arity = 0 if args is None else len(args)
            pred = self.voc.symbol(name, arity)
            if isinstance(pred, Function):
                raise ParseError(f"function {pred} used as a formula", span)
            targs = tuple(self.term(a, scope) for a in args or ())
            return Atom(pred if pred is not None else Unresolved(name, arity), targs, span=span)
        raise ParseError("expected a formula", n[-1])

    def term(self, n, scope: dict):
        kind = n[0]
        if kind == "int":
            return Const(n[1], span=n[2])
        if kind == "str":
            return Const(n[1], span=n[2])
        if kind == "neg":
            return Arith("neg", (self.term(n[1], scope),), span=n[2])
        if kind == "abs":
            return Arith("abs", (self.term(n[1], scope),), span=n[2])
        if kind == "bin" and n[1] in ("+", "-", "*", "/", "%"):
            return Arith(n[1], (self.term(n[2], scope), self.term(n[3], scope)), span=n[4])
        if kind == "agg":
            _, agg_kind, raw_vars, cond, weight, span = n
            vs = self.vars(raw_vars)
            inner = dict(scope)
            inner.update({v.name: v for v in vs})
            w = self.term(weight, inner) if weight is not None else None
            return Agg(agg_kind, tuple(vs), self.formula(cond, inner), w, span=span)
        if kind == "name":
            _, name, args, span = n
            if args is None:
                if name in scope:
                    return Var(name, scope[name].sort, span=span)
                sym = self.voc.symbol(name, 0)
                if isinstance(sym, Function):
                    return App(sym, (), span=span)
                if sym is not None:
                    raise ParseError(f"predicate {sym} used as a term", span)
                return Var(name, None, span=span)
            sym = self.voc.symbol(name, len(args))
            if isinstance(sym, Predicate):
                raise ParseError(f"predicate {sym} used as a term", span)
            targs = tuple(self.term(a, scope) for a in args)
            return App(sym if sym is not None else Unresolved(name, len(args)), targs, span=span)
        raise ParseError("expected a term", n[-1])


# -- public entry points ----------------------------------------------------


def parse_program(text: str, file: str = "<input>", include_paths=(), base_dir=None) -> Program:
    """Parse program text; includes resolve against ``base_dir`` (default
    the current directory) and then ``include_paths``."""
    p = Parser(include_paths)
    p.parse_text(text, file, Path(base_dir) if base_dir is not None else Path.cwd())
    return p.finish()


def parse_file(path, include_paths=()) -> Program:
    p = Parser(include_paths)
    p.parse_file(path)
    return p.finish()


def parse_formula(text: str, voc: Vocabulary, closed: bool = False, free_sorts: dict | None = None):
    """Parse one formula (an optional trailing ``.`` is allowed).  Free
    variables are allowed unless ``closed``; ``free_sorts`` maps free
    variable names to sorts (or sort names) the text cannot determine."""
    if free_sorts:
        free_sorts = {k: voc.sort(v) if isinstance(v, str) else v for k, v in free_sorts.items()}
    p = Parser()
    ts = TokenStream(Lexer(text, "<formula>"))
    f = p.formula_from_tokens(ts, voc, free_sorts=free_sorts)
    if ts.peek().is_op("."):
        ts.next()
    t = ts.peek()
    if t.kind != "eof":
        raise ParseError(f"unexpected {t} after formula", t.span)
    diags = check_formula(f, voc, free_ok=not closed)
    if diags:
        raise SortError(diags[0].message, diags[0].span, diags)
    return f


def parse_term(text: str, voc: Vocabulary, sorts: dict | None = None):
    ts = TokenStream(Lexer(text, "<term>"))
    raw = Parser()._fexpr(ts, 1)
    t = ts.peek()
    if t.kind != "eof":
        raise ParseError(f"unexpected {t} after term", t.span)
    scope = {k: Var(k, v) for k, v in (sorts or {}).items()}
    return _Converter(voc).term(raw, scope)


def parse_script(text: str, file: str = "<repl>") -> list:
    """Parse a sequence of statements (used by the interactive shell)."""
    p = Parser()
    ts = TokenStream(Lexer(text, file), "proc")
    body = p._sblock(ts)
    t = ts.peek()
    if t.kind != "eof":
        raise ParseError(f"unexpected {t}", t.span)
    return body


def parse_expression(text: str, file: str = "<repl>"):
    p = Parser()
    ts = TokenStream(Lexer(text, file), "proc")
    e = p._sexpr(ts, 1)
    t = ts.peek()
    if t.kind != "eof":
        raise ParseError(f"unexpected {t}", t.span)
    return e
