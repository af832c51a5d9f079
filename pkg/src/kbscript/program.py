"""Parsed programs: a tree of namespaces holding vocabularies, theories,
structures and procedures."""

from __future__ import annotations

from .errors import ResolveError
from .logic import Theory, Vocabulary
from .script_ast import Procedure
from .structures import Structure


class Namespace:
    def __init__(self, name: str = "", parent: Namespace | None = None):
        self.name = name
        self.parent = parent
        self.members: dict[str, object] = {}

    @property
    def path(self) -> tuple[str, ...]:
        if self.parent is None:
            return ()
        return self.parent.path + (self.name,)

    def child(self, name: str) -> Namespace:
        existing = self.members.get(name)
        if isinstance(existing, Namespace):
            return existing
        if existing is not None:
            raise ResolveError(f"namespace {name} clashes with a block of the same name")
        ns = self.members[name] = Namespace(name, self)
        return ns

    def add(self, name: str, block, span=None) -> None:
        if name in self.members:
            where = "::".join(self.path + (name,))
            raise ResolveError(f"{where} is declared twice", span)
        self.members[name] = block

    def __eq__(self, other) -> bool:
        if not isinstance(other, Namespace):
            return NotImplemented
        return self.name == other.name and list(self.members.items()) == list(other.members.items())

    def __hash__(self) -> int:
        return id(self)

    def __repr__(self) -> str:
        return f"Namespace({'::'.join(self.path) or '<root>'})"


class Program:
    def __init__(self):
        self.root = Namespace()
        self.files: list[str] = []
        self.include_graph: dict[str, list[str]] = {}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Program):
            return NotImplemented
        return self.root == other.root

    __hash__ = None

    def blocks(self, kind=None):
        """All blocks in declaration order (depth first through namespaces)."""
        def go(ns):
            for m in ns.members.values():
                if isinstance(m, Namespace):
                    yield from go(m)
                elif kind is None or isinstance(m, kind):
                    yield m
        return list(go(self.root))

    @property
    def vocabularies(self) -> list[Vocabulary]:
        return self.blocks(Vocabulary)

    @property
    def theories(self) -> list[Theory]:
        return self.blocks(Theory)

    @property
    def structures(self) -> list[Structure]:
        return self.blocks(Structure)

    @property
    def procedures(self) -> list[Procedure]:
        return self.blocks(Procedure)

    @property
    def main(self) -> Procedure | None:
        m = self.root.members.get("main")
        return m if isinstance(m, Procedure) else None

    def namespace(self, path) -> Namespace:
        ns = self.root
        for p in path:
            ns = ns.members[p]
        return ns

    def resolve(self, path, scope: Namespace | None = None, span=None):
        return resolve_name(path, scope or self.root, span)


def resolve_name(path, scope: Namespace, span=None):
    """Look ``path`` (tuple of identifiers) up from ``scope`` outwards; the
    remaining components descend into namespaces or vocabularies."""
    if isinstance(path, str):
        path = tuple(path.split("::"))
    first, rest = path[0], path[1:]
    ns = scope
    while ns is not None and first not in ns.members:
        ns = ns.parent
    if ns is None:
        raise ResolveError(f"unknown name {'::'.join(path)}", span)
    obj = ns.members[first]
    for i, comp in enumerate(rest):
        if isinstance(obj, Namespace):
            if comp not in obj.members:
                raise ResolveError(f"unknown name {'::'.join(path[:i + 2])}", span)
            obj = obj.members[comp]
        elif isinstance(obj, Vocabulary):
            syms = obj.symbols_named(comp)
            if len(syms) == 1:
                obj = syms[0]
            elif len(syms) > 1:
                raise ResolveError(f"{'::'.join(path)} is ambiguous (overloaded arity)", span)
            elif obj.sort(comp) is not None:
                obj = obj.sort(comp)
            else:
                raise ResolveError(f"unknown name {'::'.join(path[:i + 2])}", span)
        else:
            raise ResolveError(f"{'::'.join(path[:i + 1])} has no members", span)
    return obj
