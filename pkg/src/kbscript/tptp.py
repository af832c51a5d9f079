"""Export of theory pairs as TPTP first-order (FOF) problems, plus a small
syntax checker for the subset of TPTP that the exporter writes."""

from __future__ import annotations

import re

from .errors import ExportUnsupportedError
from .logic import (
    Agg, And, App, Arith, Atom, Cmp, Const, Equiv, Exists, ExistsOne, Forall, Function, Implies,
    Not, Or, Theory, Truth, Var, desugar, walk,
)

_ARITH_NAMES = {"+": "arith_plus", "-": "arith_minus", "*": "arith_times", "/": "arith_div",
                "%": "arith_mod", "abs": "arith_abs", "neg": "arith_neg"}
_ORDER_NAMES = {"<": "arith_less", "=<": "arith_lesseq", ">": "arith_greater", ">=": "arith_greatereq"}
_WORD = re.compile(r"[A-Za-z0-9_]+\Z")


def _const(v) -> str:
    if isinstance(v, int):
        return f"int_{v}" if v >= 0 else f"int_neg_{-v}"
    if _WORD.match(v):
        return f"c_{v}"
    return "'" + v.replace("\\", "\\\\").replace("'", "\\'") + "'"


class _Writer:
    def __init__(self):
        self.uses_arith = False

    def term(self, t) -> str:
        if isinstance(t, Var):
            return "V" + t.name
        if isinstance(t, Const):
            return _const(t.value)
        if isinstance(t, App):
            name = "f_" + t.symbol.name
            return name if not t.args else f"{name}({','.join(self.term(a) for a in t.args)})"
        if isinstance(t, Arith):
            self.uses_arith = True
            return f"{_ARITH_NAMES[t.op]}({','.join(self.term(a) for a in t.args)})"
        raise ExportUnsupportedError(f"cannot export term {t!r}")

    def formula(self, f) -> str:
        if isinstance(f, Truth):
            return "$true" if f.value else "$false"
        if isinstance(f, Atom):
            name = "p_" + f.pred.name
            return name if not f.args else f"{name}({','.join(self.term(a) for a in f.args)})"
        if isinstance(f, Cmp):
            l, r = self.term(f.left), self.term(f.right)
            if f.op == "=":
                return f"{l} = {r}"
            if f.op == "~=":
                return f"{l} != {r}"
            self.uses_arith = True
            return f"{_ORDER_NAMES[f.op]}({l},{r})"
        if isinstance(f, Not):
            return f"~ {self.formula(f.arg)}"
        if isinstance(f, (And, Or)):
            op = " & " if isinstance(f, And) else " | "
            return "(" + op.join(self.formula(a) for a in f.args) + ")"
        if isinstance(f, Implies):
            return f"({self.formula(f.left)} => {self.formula(f.right)})"
        if isinstance(f, Equiv):
            return f"({self.formula(f.left)} <=> {self.formula(f.right)})"
        if isinstance(f, ExistsOne):
            return self.formula(desugar(f))
        if isinstance(f, (Forall, Exists)):
            names = ",".join("V" + v.name for v in f.vars)
            guards = [f"s_{v.sort.name}(V{v.name})" for v in f.vars]
            guard = guards[0] if len(guards) == 1 else "(" + " & ".join(guards) + ")"
            if isinstance(f, Forall):
                return f"! [{names}] : ({guard} => {self.formula(f.body)})"
            return f"? [{names}] : ({guard} & {self.formula(f.body)})"
        raise ExportUnsupportedError(f"cannot export formula {f!r}")


def _unsupported(t: Theory) -> list[str]:
    problems = []
    for d in t.definitions:
        where = f" at {d.span}" if d.span else ""
        problems.append(f"definition in theory {t.name}{where}")
    for s in t.sentences:
        for n in walk(s):
            if isinstance(n, Agg):
                where = f" at {n.span}" if n.span else ""
                problems.append(f"{n.kind} aggregate in theory {t.name}{where}")
    return problems


def export_tptp(t1: Theory, t2: Theory) -> str:
    """TPTP FOF text: sentences of ``t1`` as axioms and the conjunction of
    ``t2`` as the conjecture.  Sorts become unary guard predicates."""
    problems = _unsupported(t1) + _unsupported(t2)
    if problems:
        raise ExportUnsupportedError("cannot export to TPTP: " + "; ".join(problems))
    w = _Writer()
    body = []
    voc = t1.vocabulary
    for s in voc.all_sorts():
        if s.parent is not None:
            body.append(f"fof(sort_{s.name}, axiom, ! [X] : (s_{s.name}(X) => s_{s.parent.name}(X))).")
    for sym in voc.all_symbols():
        if isinstance(sym, Function) and not sym.partial:
            xs = [f"X{i + 1}" for i in range(sym.arity)]
            app = f"f_{sym.name}" + (f"({','.join(xs)})" if xs else "")
            result = f"s_{sym.out.name}({app})"
            if xs:
                guards = " & ".join(f"s_{srt.name}({x})" for srt, x in zip(sym.sorts, xs))
                guards = guards if len(xs) == 1 else f"({guards})"
                body.append(f"fof(type_{sym.name}, axiom, ! [{','.join(xs)}] : ({guards} => {result})).")
            else:
                body.append(f"fof(type_{sym.name}, axiom, {result}).")
    for i, f in enumerate(t1.sentences, 1):
        body.append(f"fof(ax{i}, axiom, {w.formula(f)}).")
    goals = [w.formula(f) for f in t2.sentences]
    if not goals:
        goal = "$true"
    elif len(goals) == 1:
        goal = goals[0]
    else:
        goal = "(" + " & ".join(goals) + ")"
    body.append(f"fof(goal, conjecture, {goal}).")
    header = [f"% axioms: theory {t1.name}; conjecture: theory {t2.name}",
              "% sorts are relativized to guard predicates s_<Sort>"]
    if w.uses_arith:
        header.append("% arithmetic symbols arith_* are uninterpreted function and predicate symbols")
    return "\n".join(header + body) + "\n"


# --------------------------------------------------------------------------
# minimal FOF syntax checker

_TOKEN = re.compile(r"""\s*(?:
    (?P<comment>%[^\n]*)
  | (?P<op><=>|=>|!=|\$true|\$false|[!?~&|=(),.:\[\]])
  | (?P<upper>[A-Z][A-Za-z0-9_]*)
  | (?P<lower>[a-z][A-Za-z0-9_]*)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
)""", re.VERBOSE)


class TPTPSyntaxError(ValueError):
    pass


def _tokens(text: str) -> list[tuple[str, str]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TPTPSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind != "comment":
            out.append((kind, m.group(kind)))
    return out


class _Checker:
    ROLES = {"axiom", "hypothesis", "conjecture", "negated_conjecture", "lemma", "definition"}

    def __init__(self, toks):
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "")

    def take(self, value=None, kind=None):
        t = self.peek()
        if (value is not None and t[1] != value) or (kind is not None and t[0] != kind):
            raise TPTPSyntaxError(f"expected {value or kind}, found {t[1] or 'end of input'}")
        self.i += 1
        return t

    def file(self) -> int:
        n = 0
        while self.peek()[0] != "eof":
            self.take("fof")
            self.take("(")
            name = self.peek()
            if name[0] not in ("lower", "upper", "quoted"):
                raise TPTPSyntaxError(f"bad formula name {name[1]}")
            self.i += 1
            self.take(",")
            role = self.take(kind="lower")[1]
            if role not in self.ROLES:
                raise TPTPSyntaxError(f"unknown role {role}")
            self.take(",")
            self.formula(set())
            self.take(")")
            self.take(".")
            n += 1
        return n

    def formula(self, bound):
        self.unitary(bound)
        op = self.peek()[1]
        if op in ("=>", "<=>"):
            self.i += 1
            self.unitary(bound)
        elif op in ("&", "|"):
            while self.peek()[1] == op:
                self.i += 1
                self.unitary(bound)

    def unitary(self, bound):
        kind, v = self.peek()
        if v == "~":
            self.i += 1
            return self.unitary(bound)
        if v in ("!", "?"):
            self.i += 1
            self.take("[")
            names = {self.take(kind="upper")[1]}
            while self.peek()[1] == ",":
                self.i += 1
                names.add(self.take(kind="upper")[1])
            self.take("]")
            self.take(":")
            return self.unitary(bound | names)
        if v == "(":
            self.i += 1
            self.formula(bound)
            self.take(")")
            return
        if v in ("$true", "$false"):
            self.i += 1
            return
        is_term_only = kind in ("upper", "quoted")
        self.term(bound)
        if self.peek()[1] in ("=", "!="):
            self.i += 1
            self.term(bound)
        elif is_term_only:
            raise TPTPSyntaxError(f"{v} is a term, not a formula")

    def term(self, bound):
        kind, v = self.take()
        if kind == "upper":
            if v not in bound:
                raise TPTPSyntaxError(f"free variable {v}")
            return
        if kind == "quoted":
            return
        if kind != "lower":
            raise TPTPSyntaxError(f"expected a term, found {v}")
        if self.peek()[1] == "(":
            self.i += 1
            self.term(bound)
            while self.peek()[1] == ",":
                self.i += 1
                self.term(bound)
            self.take(")")


def check_tptp(text: str) -> int:
    """Validate ``text`` as FOF; returns the number of annotated formulas
    and raises TPTPSyntaxError otherwise."""
    c = _Checker(_tokens(text))
    return c.file()
