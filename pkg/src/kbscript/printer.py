"""Pretty-printing of formulas, blocks, procedures and whole programs.

The output is accepted by the parser and reparses to an equal object.
Quantified variables always carry their sort (``x[Sort]``) so that sort
inference is not needed on the way back in.
"""

from __future__ import annotations

from . import script_ast as S
from .logic import (
    Agg, And, App, Arith, Atom, Cmp, Const, Definition, Equiv, Exists, ExistsOne, Forall,
    Function, Implies, Not, Or, Quantifier, Rule, Theory, Truth, Var, Vocabulary,
)
from .program import Namespace, Program
from .structures import Structure, format_structure

_QUANT = {Forall: "!", Exists: "?", ExistsOne: "?1"}
_ARITH_PREC = {"+": 7, "-": 7, "*": 8, "/": 8, "%": 8}


def _str_lit(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _binder(vs) -> str:
    return " ".join(f"{v.name}[{v.sort}]" if v.sort is not None else v.name for v in vs)


def format_term(t, prec: int = 0) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        if isinstance(t.value, int):
            return str(t.value) if t.value >= 0 else f"({t.value})"
        return _str_lit(t.value)
    if isinstance(t, App):
        if not t.args:
            return t.symbol.name
        return f"{t.symbol.name}({', '.join(format_term(a) for a in t.args)})"
    if isinstance(t, Arith):
        if t.op == "abs":
            return f"abs({format_term(t.args[0])})"
        if t.op == "neg":
            text = "-" + format_term(t.args[0], 9)
            return f"({text})" if prec > 9 else text
        p = _ARITH_PREC[t.op]
        text = f"{format_term(t.args[0], p)} {t.op} {format_term(t.args[1], p + 1)}"
        return f"({text})" if p < prec else text
    if isinstance(t, Agg):
        inner = f"{_binder(t.vars)} : {format_formula(t.cond)}"
        if t.weight is not None:
            inner += f" : {format_term(t.weight)}"
        return f"{t.kind}{{{inner}}}"
    raise TypeError(f"not a term: {t!r}")


def format_formula(f, prec: int = 0) -> str:
    """Render ``f``; ``prec`` is the binding strength demanded by the context."""
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        if not f.args:
            return f.pred.name
        return f"{f.pred.name}({', '.join(format_term(a) for a in f.args)})"
    if isinstance(f, Cmp):
        text = f"{format_term(f.left, 7)} {f.op} {format_term(f.right, 7)}"
        return f"({text})" if prec > 6 else text
    if isinstance(f, Not):
        text = "~" + format_formula(f.arg, 5)
        return f"({text})" if prec > 5 else text
    if isinstance(f, (And, Or)):
        p, op = (4, " & ") if isinstance(f, And) else (3, " | ")
        text = op.join(format_formula(a, p + 1) for a in f.args)
        return f"({text})" if prec > p else text
    if isinstance(f, Implies):
        text = f"{format_formula(f.left, 3)} => {format_formula(f.right, 2)}"
        return f"({text})" if prec > 2 else text
    if isinstance(f, Equiv):
        text = f"{format_formula(f.left, 1)} <=> {format_formula(f.right, 2)}"
        return f"({text})" if prec > 1 else text
    if isinstance(f, Quantifier):
        text = f"{_QUANT[type(f)]} {_binder(f.vars)} : {format_formula(f.body)}"
        # a quantifier body runs to the end, so any enclosing operator needs parens
        return f"({text})" if prec > 0 else text
    raise TypeError(f"not a formula: {f!r}")


def format_rule(r: Rule) -> str:
    head = format_formula(r.head)
    prefix = f"! {_binder(r.vars)} : " if r.vars else ""
    if isinstance(r.body, Truth) and r.body.value:
        return f"{prefix}{head}."
    return f"{prefix}{head} <- {format_formula(r.body)}."


def format_vocabulary(v: Vocabulary, indent: str = "") -> str:
    lines = [f"{indent}vocabulary {v.name} {{"]
    for ext in v.extends:
        lines.append(f"{indent}  extern vocabulary {'::'.join(ext.path)}")
    for s in v.own_sorts.values():
        lines.append(f"{indent}  type {s.name}" + (f" isa {s.parent.name}" if s.parent else ""))
    for sym in v.own_symbols.values():
        text = sym.name
        if sym.sorts:
            text += "(" + ",".join(s.name for s in sym.sorts) + ")"
        if isinstance(sym, Function):
            text = ("partial " if sym.partial else "") + text + f" : {sym.out.name}"
        lines.append(f"{indent}  {text}")
    lines.append(f"{indent}}}")
    return "\n".join(lines)


def format_theory(t: Theory, indent: str = "") -> str:
    lines = [f"{indent}theory {t.name} : {'::'.join(t.vocabulary.path)} {{"]
    for f in t.sentences:
        lines.append(f"{indent}  {format_formula(f)}.")
    for d in t.definitions:
        lines.append(f"{indent}  {{")
        for r in d.rules:
            lines.append(f"{indent}    {format_rule(r)}")
        lines.append(f"{indent}  }}")
    lines.append(f"{indent}}}")
    return "\n".join(lines)


def format_definition(d: Definition) -> str:
    return "{\n" + "".join(f"  {format_rule(r)}\n" for r in d.rules) + "}"


# -- procedures ---------------------------------------------------------------

_SPREC = {"or": 1, "and": 2, "<": 3, ">": 3, "<=": 3, ">=": 3, "~=": 3, "==": 3,
          "..": 4, "+": 5, "-": 5, "*": 6, "/": 6, "%": 6}


def format_expr(e, prec: int = 0) -> str:
    if isinstance(e, S.Literal):
        v = e.value
        if v is None:
            return "nil"
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, int):
            return str(v) if v >= 0 else f"({v})"
        return _str_lit(v)
    if isinstance(e, S.Name):
        return "::".join(e.path)
    if isinstance(e, S.Index):
        return f"{_prefix(e.obj)}[{format_expr(e.key)}]"
    if isinstance(e, S.Field):
        return f"{_prefix(e.obj)}.{e.name}"
    if isinstance(e, S.Call):
        return f"{_prefix(e.func)}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, S.UnOp):
        sep = " " if e.op == "not" else ""
        text = f"{e.op}{sep}{format_expr(e.arg, 7)}"
        return f"({text})" if prec > 7 else text
    if isinstance(e, S.BinOp):
        p = _SPREC[e.op]
        if e.op == "..":
            text = f"{format_expr(e.left, p + 1)} .. {format_expr(e.right, p)}"
        else:
            text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({text})" if prec > p else text
    if isinstance(e, S.Table):
        parts = [format_expr(i) for i in e.items]
        for k, v in e.fields:
            if isinstance(k, S.Literal) and isinstance(k.value, str) and k.value.isidentifier():
                parts.append(f"{k.value} = {format_expr(v)}")
            else:
                parts.append(f"[{format_expr(k)}] = {format_expr(v)}")
        return "{" + ", ".join(parts) + "}"
    raise TypeError(f"not an expression: {e!r}")


def _prefix(e) -> str:
    # call/index/field targets must be names, suffix chains or parenthesized
    if isinstance(e, (S.Name, S.Index, S.Field, S.Call)):
        return format_expr(e)
    return f"({format_expr(e)})"


def format_block(stmts, indent: str) -> list[str]:
    out = []
    for st in stmts:
        out.extend(format_statement(st, indent))
    return out


def format_statement(st, indent: str = "") -> list[str]:
    inner = indent + "  "
    if isinstance(st, S.Local):
        text = f"{indent}local {', '.join(st.names)}"
        if st.exprs:
            text += " = " + ", ".join(format_expr(e) for e in st.exprs)
        return [text]
    if isinstance(st, S.Assign):
        return [f"{indent}{', '.join(format_expr(t) for t in st.targets)} = "
                + ", ".join(format_expr(e) for e in st.exprs)]
    if isinstance(st, S.ExprStmt):
        return [indent + format_expr(st.expr)]
    if isinstance(st, S.If):
        out = []
        for i, (cond, body) in enumerate(st.clauses):
            out.append(f"{indent}{'if' if i == 0 else 'elseif'} {format_expr(cond)} then")
            out.extend(format_block(body, inner))
        if st.orelse is not None:
            out.append(f"{indent}else")
            out.extend(format_block(st.orelse, inner))
        out.append(f"{indent}end")
        return out
    if isinstance(st, S.While):
        return ([f"{indent}while {format_expr(st.cond)} do"] + format_block(st.body, inner)
                + [f"{indent}end"])
    if isinstance(st, S.Repeat):
        return ([f"{indent}repeat"] + format_block(st.body, inner)
                + [f"{indent}until {format_expr(st.cond)}"])
    if isinstance(st, S.NumFor):
        head = f"{indent}for {st.var} = {format_expr(st.start)}, {format_expr(st.stop)}"
        if st.step is not None:
            head += f", {format_expr(st.step)}"
        return [head + " do"] + format_block(st.body, inner) + [f"{indent}end"]
    if isinstance(st, S.GenFor):
        return ([f"{indent}for {', '.join(st.names)} in {format_expr(st.expr)} do"]
                + format_block(st.body, inner) + [f"{indent}end"])
    if isinstance(st, S.Return):
        return [f"{indent}return" + (" " + ", ".join(format_expr(e) for e in st.exprs) if st.exprs else "")]
    if isinstance(st, S.Break):
        return [f"{indent}break"]
    raise TypeError(f"not a statement: {st!r}")


def format_procedure(p: S.Procedure, indent: str = "") -> str:
    lines = [f"{indent}procedure {p.name}({', '.join(p.params)}) {{"]
    lines.extend(format_block(p.body, indent + "  "))
    lines.append(f"{indent}}}")
    return "\n".join(lines)


def format_any(block, indent: str = "") -> str:
    if isinstance(block, Vocabulary):
        return format_vocabulary(block, indent)
    if isinstance(block, Theory):
        return format_theory(block, indent)
    if isinstance(block, Structure):
        text = format_structure(block)
        return "\n".join(indent + line for line in text.split("\n"))
    if isinstance(block, S.Procedure):
        return format_procedure(block, indent)
    if isinstance(block, Namespace):
        return format_namespace(block, indent)
    if isinstance(block, Definition):
        return format_definition(block)
    if isinstance(block, Rule):
        return format_rule(block)
    if isinstance(block, tuple(_QUANT)) or isinstance(block, (Truth, Atom, Cmp, Not, And, Or, Implies, Equiv)):
        return format_formula(block)
    return format_term(block)


def format_namespace(ns: Namespace, indent: str = "") -> str:
    lines = [f"{indent}namespace {ns.name} {{"]
    for m in ns.members.values():
        lines.append(format_any(m, indent + "  "))
    lines.append(f"{indent}}}")
    return "\n".join(lines)


def format_program(p: Program) -> str:
    """Whole program as one file; included files are inlined in place."""
    return "\n\n".join(format_any(m) for m in p.root.members.values()) + "\n"
