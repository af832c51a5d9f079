"""AST of the procedural mini-language (Lua-flavoured statements)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import Span


def _line():
    return field(default=0, compare=False, repr=False)


# expressions

@dataclass(frozen=True)
class Literal:
    value: object  # None, bool, int or str
    line: int = _line()


@dataclass(frozen=True)
class Name:
    path: tuple  # ("sudoku", "createSudoku") for sudoku::createSudoku
    line: int = _line()


@dataclass(frozen=True)
class Index:
    obj: object
    key: object
    line: int = _line()


@dataclass(frozen=True)
class Field:
    obj: object
    name: str
    line: int = _line()


@dataclass(frozen=True)
class Call:
    func: object
    args: tuple
    line: int = _line()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    line: int = _line()


@dataclass(frozen=True)
class UnOp:
    op: str  # "-", "not", "#"
    arg: object
    line: int = _line()


@dataclass(frozen=True)
class Table:
    items: tuple  # positional entries
    fields: tuple = ()  # (key, expr) pairs
    line: int = _line()


# statements

@dataclass(frozen=True)
class Local:
    names: tuple
    exprs: tuple
    line: int = _line()


@dataclass(frozen=True)
class Assign:
    targets: tuple
    exprs: tuple
    line: int = _line()


@dataclass(frozen=True)
class ExprStmt:
    expr: Call
    line: int = _line()


@dataclass(frozen=True)
class If:
    clauses: tuple  # ((cond, body), ...)
    orelse: tuple | None = None
    line: int = _line()


@dataclass(frozen=True)
class While:
    cond: object
    body: tuple
    line: int = _line()


@dataclass(frozen=True)
class Repeat:
    body: tuple
    cond: object
    line: int = _line()


@dataclass(frozen=True)
class NumFor:
    var: str
    start: object
    stop: object
    step: object | None
    body: tuple
    line: int = _line()


@dataclass(frozen=True)
class GenFor:
    names: tuple
    expr: object
    body: tuple
    line: int = _line()


@dataclass(frozen=True)
class Return:
    exprs: tuple
    line: int = _line()


@dataclass(frozen=True)
class Break:
    line: int = _line()


@dataclass(eq=False)
class Procedure:
    name: str
    params: tuple
    body: tuple
    path: tuple = ()
    namespace: object = None  # the Namespace the procedure was declared in
    span: Span | None = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Procedure):
            return NotImplemented
        return (self.path, self.params, self.body) == (other.path, other.params, other.body)

    def __hash__(self) -> int:
        return hash(self.path)

    def __repr__(self) -> str:
        return f"Procedure({'::'.join(self.path)})"
