"""Tokenizer with two modes: ``block`` for vocabularies, theories and
structures (``//`` and ``/* */`` comments) and ``proc`` for procedure
bodies (``--`` comments)."""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass

from .errors import ParseError, Span

BLOCK_OPS = ["<=>", "::", "=>", "<-", "->", "..", "~=", "=<", ">=", "<=",
             "<", ">", "=", "!", "?", "&", "|", "~", "(", ")", "{", "}", "[", "]",
             ",", ";", ":", ".", "+", "-", "*", "/", "%", "#"]
PROC_OPS = ["::", "==", "~=", "<=", ">=", "..", "<", ">", "=", "(", ")", "{", "}",
            "[", "]", ",", ";", ":", ".", "+", "-", "*", "/", "%", "#"]

_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "'": "'", "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str  # id, int, str, op, eof
    value: object
    start: int
    end: int
    span: Span

    def is_op(self, *ops) -> bool:
        return self.kind == "op" and self.value in ops

    def is_id(self, *names) -> bool:
        return self.kind == "id" and (not names or self.value in names)

    def __str__(self) -> str:
        if self.kind == "eof":
            return "end of input"
        if self.kind == "str":
            return repr(self.value)
        return f"'{self.value}'"


class Lexer:
    def __init__(self, text: str, file: str = "<input>"):
        self.text = text
        self.file = file
        self._lines = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(self, pos: int, end: int | None = None) -> Span:
        line = bisect.bisect_right(self._lines, pos)
        col = pos - self._lines[line - 1] + 1
        end_col = None if end is None else col + (end - pos)
        return Span(self.file, line, col, end_col)

    def _skip(self, pos: int, mode: str) -> int:
        text, n = self.text, len(self.text)
        while pos < n:
            c = text[pos]
            if c in " \t\r\n\f﻿":
                pos += 1
            elif mode == "block" and text.startswith("//", pos):
                nl = text.find("\n", pos)
                pos = n if nl < 0 else nl + 1
            elif mode == "block" and text.startswith("/*", pos):
                close = text.find("*/", pos + 2)
                if close < 0:
                    raise ParseError("unterminated comment", self.span(pos))
                pos = close + 2
            elif mode == "proc" and text.startswith("--", pos):
                if text.startswith("--[[", pos):
                    close = text.find("]]", pos)
                    pos = n if close < 0 else close + 2
                else:
                    nl = text.find("\n", pos)
                    pos = n if nl < 0 else nl + 1
            else:
                break
        return pos

    def token(self, pos: int, mode: str) -> Token:
        pos = self._skip(pos, mode)
        text = self.text
        if pos >= len(text):
            return Token("eof", None, pos, pos, self.span(pos))
        c = text[pos]
        m = _ID.match(text, pos)
        if m:
            return Token("id", m.group(), pos, m.end(), self.span(pos, m.end()))
        m = _INT.match(text, pos)
        if m:
            return Token("int", int(m.group()), pos, m.end(), self.span(pos, m.end()))
        if c in "\"'":
            return self._string(pos, c)
        for op in BLOCK_OPS if mode == "block" else PROC_OPS:
            if text.startswith(op, pos):
                return Token("op", op, pos, pos + len(op), self.span(pos, pos + len(op)))
        raise ParseError(f"unexpected character {c!r}", self.span(pos))

    def _string(self, pos: int, quote: str) -> Token:
        text, i, out = self.text, pos + 1, []
        while i < len(text):
            c = text[i]
            if c == quote:
                return Token("str", "".join(out), pos, i + 1, self.span(pos, i + 1))
            if c == "\n":
                break
            if c == "\\" and i + 1 < len(text):
                out.append(_ESCAPES.get(text[i + 1], text[i + 1]))
                i += 2
                continue
            out.append(c)
            i += 1
        raise ParseError("unterminated string", self.span(pos))


class TokenStream:
    """Lookahead buffer over a Lexer; switching mode re-lexes the lookahead."""

    def __init__(self, lexer: Lexer, mode: str = "block"):
        self.lexer = lexer
        self.mode = mode
        self.pos = 0
        self.buf: list[Token] = []
        self.last: Token | None = None

    def set_mode(self, mode: str) -> None:
        if mode != self.mode:
            self.mode = mode
            self.buf.clear()

    def peek(self, k: int = 0) -> Token:
        while len(self.buf) <= k:
            start = self.buf[-1].end if self.buf else self.pos
            if self.buf and self.buf[-1].kind == "eof":
                self.buf.append(self.buf[-1])
            else:
                self.buf.append(self.lexer.token(start, self.mode))
        return self.buf[k]

    def next(self) -> Token:
        tok = self.peek()
        self.buf.pop(0)
        self.pos = tok.end
        self.last = tok
        return tok

    def seek(self, pos: int) -> None:
        self.pos = pos
        self.buf.clear()
