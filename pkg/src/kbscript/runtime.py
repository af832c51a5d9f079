"""Tree-walking interpreter for procedure blocks.

Values are Python objects: ``None`` (nil), bool, int, str, ``list``
(1-based from the script's point of view), ``dict`` (maps), and handles to
program objects (vocabularies, theories, structures, symbols, query
results, procedures).  Lists and maps have reference semantics; so do
structures until ``clone`` is called.
"""

from __future__ import annotations

import sys
import time

from . import inference
from .errors import KBError, ResolveError
from .logic import Function, Predicate, Sort, Theory, Vocabulary
from .parser import parse_expression, parse_formula, parse_script
from .program import Namespace, Program, resolve_name
from .script_ast import (
    Assign, BinOp, Break, Call, ExprStmt, Field, GenFor, If, Index, Literal, Local, Name, NumFor,
    Procedure, Repeat, Return, Table, UnOp, While,
)
from .structures import Structure, format_structure
from .tptp import export_tptp

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1


class ScriptError(KBError, RuntimeError):
    """Uncaught error in a script; ``trace`` lists the active procedures,
    innermost first."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.trace: list[str] = []

    def report(self) -> str:
        lines = [f"error: {self.message}"]
        lines += [f"  in {t}" for t in self.trace]
        return "\n".join(lines)


class LCG:
    """64-bit linear congruential generator behind ``math.random``."""

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK64

    def seed(self, n: int) -> None:
        self.state = n & _MASK64

    def randint(self, lo: int, hi: int) -> int:
        self.state = (self.state * LCG_MULTIPLIER + LCG_INCREMENT) & _MASK64
        return (self.state >> 33) % (hi - lo + 1) + lo


class Multi(tuple):
    """Several values returned from one call."""


class Builtin:
    def __init__(self, name: str, fn):
        self.name = name
        self.fn = fn

    def __repr__(self) -> str:
        return f"builtin {self.name}"


class InterpView:
    """``structure[symbol]``: the symbol's interpretation in a structure.
    Calling it applies the symbol; ``.graph`` is the view itself, accepted
    by makeTrue/makeFalse/makeUnknown."""

    def __init__(self, structure: Structure, symbol):
        self.structure = structure
        self.symbol = symbol

    def __repr__(self) -> str:
        return f"{self.structure.name}[{self.symbol}]"


class Options:
    """The ``stdoptions`` table, backed by SolverOptions."""

    KEYS = {"nrmodels": "nrmodels", "seed": "seed", "timeout": "timeout_ms",
            "propagation": "propagation"}

    def __init__(self, opts: inference.SolverOptions):
        self.opts = opts

    def get(self, key):
        if key not in self.KEYS:
            raise ScriptError(f"unknown option {key!r}")
        return getattr(self.opts, self.KEYS[key])

    def set(self, key, value):
        if key not in self.KEYS:
            raise ScriptError(f"unknown option {key!r}")
        if key == "propagation":
            if value not in ("approx", "exact"):
                raise ScriptError("stdoptions.propagation must be \"approx\" or \"exact\"")
        elif key == "timeout":
            if value is not None and (not _is_int(value) or value < 0):
                raise ScriptError("stdoptions.timeout must be a non-negative integer or nil")
        elif not _is_int(value) or value < 0:
            raise ScriptError(f"stdoptions.{key} must be a non-negative integer")
        setattr(self.opts, self.KEYS[key], value)


class _Return(Exception):
    def __init__(self, values):
        self.values = values


class _Break(Exception):
    pass


class _Iterator:
    def __init__(self, it):
        self.it = it


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def truthy(v) -> bool:
    return v is not None and v is not False


def type_name(v) -> str:
    if v is None:
        return "nil"
    if isinstance(v, bool):
        return "boolean"
    if _is_int(v):
        return "integer"
    if isinstance(v, str):
        return "string"
    if isinstance(v, list):
        return "list"
    if isinstance(v, dict):
        return "map"
    if isinstance(v, Structure):
        return "structure"
    if isinstance(v, Theory):
        return "theory"
    if isinstance(v, Vocabulary):
        return "vocabulary"
    if isinstance(v, (Predicate, Function)):
        return "symbol"
    if isinstance(v, Sort):
        return "sort"
    if isinstance(v, (Procedure, Builtin)):
        return "procedure"
    if isinstance(v, InterpView):
        return "interpretation"
    if isinstance(v, inference.QueryResult):
        return "queryresult"
    return type(v).__name__


def tostring(v) -> str:
    if v is None:
        return "nil"
    if isinstance(v, bool):
        return "true" if v else "false"
    if _is_int(v) or isinstance(v, str):
        return str(v)
    if isinstance(v, list):
        return "{" + ", ".join(_show(x) for x in v) + "}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_show(k)} = {_show(x)}" for k, x in v.items()) + "}"
    if isinstance(v, Structure):
        return format_structure(v)
    if isinstance(v, (Theory, Vocabulary)):
        kind = "theory" if isinstance(v, Theory) else "vocabulary"
        return f"{kind} {'::'.join(v.path)}"
    if isinstance(v, (Predicate, Function, Sort)):
        return str(v)
    if isinstance(v, Procedure):
        return f"procedure {'::'.join(v.path)}"
    if isinstance(v, Builtin):
        return f"builtin {v.name}"
    if isinstance(v, inference.QueryResult):
        return str(v)
    if isinstance(v, InterpView):
        return repr(v)
    if isinstance(v, Options):
        return "stdoptions"
    return str(v)


def _show(v) -> str:
    return f'"{v}"' if isinstance(v, str) else tostring(v)


def _first(v):
    if isinstance(v, Multi):
        return v[0] if v else None
    return v


class Frame:
    def __init__(self, proc_name: str, namespace: Namespace, file: str | None):
        self.name = proc_name
        self.namespace = namespace
        self.file = file
        self.scopes: list[dict] = [{}]
        self.line = 0

    def lookup(self, name):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope
        return None


class Interpreter:
    def __init__(self, program: Program | None = None, out=None, err=None, seed: int | None = None,
                 timeout_ms: int | None = None, dump_ground: str | None = None, clock=None):
        self.program = program or Program()
        self.out = out if out is not None else sys.stdout
        self.err = err if err is not None else sys.stderr
        self.fixed_seed = seed
        self.rng = LCG(seed or 0)
        self.clock = clock or (lambda: int(time.time()))
        self.options = inference.SolverOptions(timeout_ms=timeout_ms, dump_ground=dump_ground)
        self.stdoptions = Options(self.options)
        self.globals: dict = {}
        self.frames: list[Frame] = []
        self.max_depth = 200
        self.builtins = self._make_builtins()
        self.repl_frame = Frame("<repl>", self.program.root, None)

    # -- builtins ------------------------------------------------------------

    def _make_builtins(self) -> dict:
        b = {}

        def reg(name, fn):
            b[name] = Builtin(name, fn)

        reg("print", self._print)
        reg("tostring", lambda v=None: tostring(v))
        reg("type", lambda v=None: type_name(v))
        reg("modelExpand", self._model_expand)
        reg("modelCheck", lambda t=None, s=None: inference.model_check(self._theory(t), self._structure(s)))
        reg("propagate", self._propagate)
        reg("query", self._query)
        reg("entails", self._entails)
        reg("exportTPTP", self._export_tptp)
        reg("makeTrue", lambda v=None, t=None: self._mutate("make_true", v, t))
        reg("makeFalse", lambda v=None, t=None: self._mutate("make_false", v, t))
        reg("makeUnknown", lambda v=None, t=None: self._mutate("make_unknown", v, t))
        reg("materialize", self._materialize)
        reg("renderStructure", self._render)
        reg("clone", self._clone)
        reg("valueOf", self._value_of)
        reg("newStructure", self._new_structure)
        reg("setDomain", self._set_domain)
        reg("ipairs", self._ipairs)
        reg("pairs", self._pairs)
        b["math"] = {"random": Builtin("math.random", self._random),
                     "randomseed": Builtin("math.randomseed", self._randomseed)}
        b["os"] = {"time": Builtin("os.time", lambda: self.clock())}
        return b

    def _print(self, *args):
        self.out.write("\t".join(tostring(a) for a in args) + "\n")

    def _theory(self, t) -> Theory:
        if not isinstance(t, Theory):
            raise ScriptError(f"expected a theory, got {type_name(t)}")
        return t

    def _structure(self, s) -> Structure:
        if not isinstance(s, Structure):
            raise ScriptError(f"expected a structure, got {type_name(s)}")
        self._materialize_pending(s)
        return s

    def _model_expand(self, t=None, s=None):
        return inference.model_expand(self._theory(t), self._structure(s), self.options.copy())

    def _propagate(self, t=None, s=None):
        r = inference.propagate(self._theory(t), self._structure(s), self.options.copy())
        return None if r is inference.INCONSISTENT else r

    def _query(self, phi=None, s=None):
        s = self._structure(s)
        if not isinstance(phi, str):
            raise ScriptError(f"query expects formula text, got {type_name(phi)}")
        return inference.query(parse_formula(phi, s.vocabulary), s)

    def _entails(self, t1=None, t2=None, s=None):
        verdict, model = inference.entails(self._theory(t1), self._theory(t2), self._structure(s),
                                           self.options.copy())
        return Multi((verdict, model))

    def _export_tptp(self, t1=None, t2=None, path=None):
        text = export_tptp(self._theory(t1), self._theory(t2))
        if path is None:
            return text
        if not isinstance(path, str):
            raise ScriptError("exportTPTP expects a file path")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        return None

    def _mutate(self, method, view, tup):
        if isinstance(view, InterpView):
            s, sym = view.structure, view.symbol
        else:
            raise ScriptError(f"{method} expects an interpretation such as s[symbol].graph,"
                              f" got {type_name(view)}")
        if isinstance(tup, list):
            tup = tuple(tup)
        elif tup is None:
            tup = ()
        else:
            tup = (tup,)
        getattr(s, method)(sym, tup)
        return None

    def _materialize(self, s=None, sym=None, proc=None):
        s = self._structure(s)
        sym = self._symbol(s, sym)
        if proc is None:
            raise ScriptError("materialize expects an oracle procedure")
        s.materialize(sym, lambda *args: _first(self.call(proc, list(args))))
        s.procedural = [(x, p) for x, p in s.procedural if x != sym]
        return None

    def _materialize_pending(self, s: Structure) -> None:
        """Interpret symbols bound to procedures in the structure block."""
        if not s.procedural:
            return
        scope = self._structure_namespace(s)
        pending, s.procedural = list(s.procedural), []
        for sym, path in pending:
            try:
                proc = resolve_name(path, scope)
            except ResolveError as e:
                s.procedural = pending
                raise ScriptError(str(e)) from e
            s.materialize(sym, lambda *args, proc=proc: _first(self.call(proc, list(args))))

    def _structure_namespace(self, s: Structure) -> Namespace:
        ns = self.program.root
        for p in s.path[:-1]:
            m = ns.members.get(p)
            if not isinstance(m, Namespace):
                break
            ns = m
        return ns

    def _symbol(self, s: Structure, sym):
        if isinstance(sym, (Predicate, Function)):
            return sym
        if isinstance(sym, str):
            found = [x for x in s.vocabulary.all_symbols() if x.name == sym]
            if len(found) == 1:
                return found[0]
            raise ScriptError(f"{'ambiguous' if found else 'unknown'} symbol {sym!r}")
        raise ScriptError(f"expected a symbol, got {type_name(sym)}")

    def _render(self, s=None, mode="text", sym=None, rows=None, cols=None):
        s = self._structure(s)
        if sym is not None:
            sym = self._symbol(s, sym)
        return inference.render_structure(s, mode, sym, rows, cols)

    def _clone(self, v=None):
        if isinstance(v, Structure):
            return v.clone()
        if isinstance(v, list):
            return list(v)
        if isinstance(v, dict):
            return dict(v)
        raise ScriptError(f"cannot clone a {type_name(v)}")

    def _value_of(self, s=None, sym=None, tup=None):
        s = self._structure(s)
        sym = self._symbol(s, sym)
        tup = tuple(tup) if isinstance(tup, list) else (() if tup is None else (tup,))
        if isinstance(sym, Function) and len(tup) == sym.arity:
            v = s.value(sym, tup)
            if v is not None:
                return v
            if all(s.truth(sym, tup + (o,)) is False for o in s.domain(sym.out)):
                return None
            return "unknown"
        t = s.truth(sym, tup)
        return "unknown" if t is None else t

    def _new_structure(self, voc=None, name=None):
        if not isinstance(voc, Vocabulary):
            raise ScriptError(f"newStructure expects a vocabulary, got {type_name(voc)}")
        return Structure(voc, name or "S")

    def _set_domain(self, s=None, sort=None, lo=None, hi=None):
        s = self._structure(s)
        if isinstance(sort, Sort):
            sort = sort.name
        if isinstance(lo, list):
            elems = lo
        elif _is_int(lo) and _is_int(hi):
            elems = range(lo, hi + 1)
        else:
            raise ScriptError("setDomain expects a list of elements or integer bounds")
        s.set_domain(sort, elems)
        return None

    def _ipairs(self, t=None):
        if isinstance(t, inference.QueryResult):
            t = [list(r) for r in t]
        if not isinstance(t, list):
            raise ScriptError(f"ipairs expects a list, got {type_name(t)}")
        return _Iterator(((i + 1, v) for i, v in enumerate(list(t))))

    def _pairs(self, t=None):
        if isinstance(t, list):
            return self._ipairs(t)
        if not isinstance(t, dict):
            raise ScriptError(f"pairs expects a map, got {type_name(t)}")
        return _Iterator(iter(list(t.items())))

    def _random(self, lo=None, hi=None):
        if hi is None:
            lo, hi = 1, lo
        if not _is_int(lo) or not _is_int(hi):
            raise ScriptError("math.random expects integer bounds")
        if hi < lo:
            raise ScriptError("math.random: empty interval")
        return self.rng.randint(lo, hi)

    def _randomseed(self, n=None):
        if not _is_int(n):
            raise ScriptError("math.randomseed expects an integer")
        if self.fixed_seed is None:
            self.rng.seed(n)
        return None

    # -- entry points --------------------------------------------------------

    def call(self, f, args: list, line: int = 0):
        if isinstance(f, Builtin):
            try:
                return f.fn(*args)
            except ScriptError:
                raise
            except TypeError as e:
                raise ScriptError(f"bad arguments to {f.name}: {e}", line) from e
            except KBError as e:
                raise ScriptError(f"{f.name}: {e}", line) from e
        if isinstance(f, Procedure):
            return self._call_procedure(f, args)
        if isinstance(f, InterpView):
            return self._apply_view(f, args)
        raise ScriptError(f"attempt to call {type_name(f)}", line)

    def _call_procedure(self, proc: Procedure, args: list):
        if len(self.frames) >= self.max_depth:
            raise ScriptError("stack overflow")
        file = proc.span.file if proc.span else None
        frame = Frame("::".join(proc.path) or proc.name, proc.namespace or self.program.root, file)
        frame.line = proc.span.line if proc.span else 0
        for i, p in enumerate(proc.params):
            frame.scopes[0][p] = args[i] if i < len(args) else None
        self.frames.append(frame)
        try:
            self.exec_block(proc.body, frame, new_scope=False)
        except _Return as r:
            return r.values
        except _Break:
            raise ScriptError("break outside a loop", frame.line)
        except RecursionError:
            raise ScriptError("stack overflow", frame.line) from None
        except ScriptError as e:
            where = f"{frame.file}:{e.line or frame.line}" if frame.file else f"line {e.line or frame.line}"
            e.trace.append(f"procedure {frame.name} ({where})")
            e.line = 0
            raise
        finally:
            self.frames.pop()
        return None

    def _apply_view(self, view: InterpView, args: list):
        s, sym = view.structure, view.symbol
        if not s.is_two_valued([sym]):
            raise ScriptError(f"{sym} is not two-valued in structure {s.name}; use valueOf")
        tup = tuple(args)
        if isinstance(sym, Function):
            if len(tup) != sym.arity:
                raise ScriptError(f"{sym} expects {sym.arity} arguments")
            return s.value(sym, tup)
        if len(tup) != sym.arity:
            raise ScriptError(f"{sym} expects {sym.arity} arguments")
        return s.truth(sym, tup) is True

    def run_main(self) -> int | None:
        """Run the global ``main``; None if there is none, else 0 or 1."""
        main = self.program.main
        if main is None:
            return None
        try:
            self.call(main, [])
        except ScriptError as e:
            self.out.flush()
            self.err.write(e.report() + "\n")
            return 1
        except KeyboardInterrupt:
            self.out.flush()
            self.err.write("interrupted\n")
            return 1
        return 0

    def eval_text(self, text: str):
        """Evaluate REPL input: an expression (its value is returned) or a
        statement sequence (returns None).  State persists between calls."""
        frame = self.repl_frame
        try:
            expr = parse_expression(text)
        except KBError:
            expr = None
        if expr is not None:
            return self._top(lambda: _first(self.eval(expr, frame)))
        stmts = parse_script(text)

        def run():
            try:
                self.exec_block(stmts, frame, new_scope=False)
            except _Return as r:
                return _first(r.values)
            except _Break:
                raise ScriptError("break outside a loop")
            return None
        return self._top(run)

    def _top(self, fn):
        self.frames.append(self.repl_frame)
        try:
            return fn()
        finally:
            self.frames.pop()

    # -- statements ----------------------------------------------------------

    def exec_block(self, stmts, frame: Frame, new_scope: bool = True) -> None:
        if new_scope:
            frame.scopes.append({})
        try:
            for st in stmts:
                frame.line = st.line or frame.line
                self.exec(st, frame)
        finally:
            if new_scope:
                frame.scopes.pop()

    def exec(self, st, frame: Frame) -> None:
        try:
            self._exec(st, frame)
        except ScriptError as e:
            if not e.line:
                e.line = st.line
            raise
        except KBError as e:
            raise ScriptError(str(e), st.line) from e

    def _exec(self, st, frame: Frame) -> None:
        if isinstance(st, ExprStmt):
            self.eval(st.expr, frame)
        elif isinstance(st, Local):
            vals = self.eval_list(st.exprs, frame)
            scope = frame.scopes[-1]
            for i, n in enumerate(st.names):
                scope[n] = vals[i] if i < len(vals) else None
        elif isinstance(st, Assign):
            vals = self.eval_list(st.exprs, frame)
            for i, target in enumerate(st.targets):
                self.assign(target, vals[i] if i < len(vals) else None, frame)
        elif isinstance(st, If):
            for cond, body in st.clauses:
                if truthy(_first(self.eval(cond, frame))):
                    self.exec_block(body, frame)
                    return
            if st.orelse is not None:
                self.exec_block(st.orelse, frame)
        elif isinstance(st, While):
            try:
                while truthy(_first(self.eval(st.cond, frame))):
                    self.exec_block(st.body, frame)
            except _Break:
                pass
        elif isinstance(st, Repeat):
            try:
                while True:
                    # the condition sees the body's locals
                    frame.scopes.append({})
                    try:
                        for s in st.body:
                            frame.line = s.line or frame.line
                            self.exec(s, frame)
                        done = truthy(_first(self.eval(st.cond, frame)))
                    finally:
                        frame.scopes.pop()
                    if done:
                        break
            except _Break:
                pass
        elif isinstance(st, NumFor):
            start = _first(self.eval(st.start, frame))
            stop = _first(self.eval(st.stop, frame))
            step = 1 if st.step is None else _first(self.eval(st.step, frame))
            if not (_is_int(start) and _is_int(stop) and _is_int(step)):
                raise ScriptError("'for' bounds must be integers", st.line)
            if step == 0:
                raise ScriptError("'for' step is zero", st.line)
            i = start
            try:
                while (step > 0 and i <= stop) or (step < 0 and i >= stop):
                    frame.scopes.append({st.var: i})
                    try:
                        self.exec_block(st.body, frame, new_scope=False)
                    finally:
                        frame.scopes.pop()
                    i += step
            except _Break:
                pass
        elif isinstance(st, GenFor):
            it = _first(self.eval(st.expr, frame))
            if isinstance(it, list):
                it = self._ipairs(it)
            if not isinstance(it, _Iterator):
                raise ScriptError(f"cannot iterate over a {type_name(it)}", st.line)
            try:
                for item in it.it:
                    frame.scopes.append({n: (item[k] if k < len(item) else None)
                                         for k, n in enumerate(st.names)})
                    try:
                        self.exec_block(st.body, frame, new_scope=False)
                    finally:
                        frame.scopes.pop()
            except _Break:
                pass
        elif isinstance(st, Return):
            vals = self.eval_list(st.exprs, frame)
            raise _Return(None if not vals else vals[0] if len(vals) == 1 else Multi(vals))
        elif isinstance(st, Break):
            raise _Break()
        else:
            raise ScriptError(f"cannot execute {type(st).__name__}", st.line)

    def assign(self, target, value, frame: Frame) -> None:
        if isinstance(target, Name):
            if len(target.path) != 1:
                raise ScriptError(f"cannot assign to {'::'.join(target.path)}", target.line)
            name = target.path[0]
            scope = frame.lookup(name)
            if scope is None and frame is not self.repl_frame and self.repl_frame.lookup(name) is not None:
                scope = self.repl_frame.lookup(name)
            (scope if scope is not None else self.globals)[name] = value
        elif isinstance(target, Index):
            obj = _first(self.eval(target.obj, frame))
            key = _first(self.eval(target.key, frame))
            self.set_index(obj, key, value, target.line)
        elif isinstance(target, Field):
            obj = _first(self.eval(target.obj, frame))
            if isinstance(obj, Options):
                obj.set(target.name, value)
            else:
                self.set_index(obj, target.name, value, target.line)
        else:
            raise ScriptError("invalid assignment target", getattr(target, "line", 0))

    def set_index(self, obj, key, value, line) -> None:
        if isinstance(obj, list):
            if not _is_int(key) or key < 1 or key > len(obj) + 1:
                raise ScriptError(f"list index {tostring(key)} out of range", line)
            if key == len(obj) + 1:
                if value is not None:
                    obj.append(value)
            elif value is None and key == len(obj):
                obj.pop()
            else:
                obj[key - 1] = value
        elif isinstance(obj, dict):
            if key is None:
                raise ScriptError("map key is nil", line)
            if value is None:
                obj.pop(key, None)
            else:
                obj[key] = value
        else:
            raise ScriptError(f"attempt to index a {type_name(obj)} value", line)

    # -- expressions ---------------------------------------------------------

    def eval_list(self, exprs, frame: Frame) -> list:
        out = []
        for i, e in enumerate(exprs):
            v = self.eval(e, frame)
            if isinstance(v, Multi):
                if i == len(exprs) - 1:
                    out.extend(v)
                else:
                    out.append(_first(v))
            else:
                out.append(v)
        return out

    def eval(self, e, frame: Frame):
        if isinstance(e, Literal):
            return e.value
        if isinstance(e, Name):
            return self.lookup(e, frame)
        if isinstance(e, Call):
            f = _first(self.eval(e.func, frame))
            args = self.eval_list(e.args, frame)
            if f is None:
                raise ScriptError(f"attempt to call nil ({_describe(e.func)})", e.line)
            return self.call(f, args, e.line)
        if isinstance(e, Index):
            obj = _first(self.eval(e.obj, frame))
            key = _first(self.eval(e.key, frame))
            return self.index(obj, key, e.line)
        if isinstance(e, Field):
            obj = _first(self.eval(e.obj, frame))
            return self.field(obj, e.name, e.line)
        if isinstance(e, BinOp):
            return self.binop(e, frame)
        if isinstance(e, UnOp):
            v = _first(self.eval(e.arg, frame))
            if e.op == "not":
                return not truthy(v)
            if e.op == "-":
                if not _is_int(v):
                    raise ScriptError(f"attempt to negate a {type_name(v)} value", e.line)
                return -v
            if e.op == "#":
                return self.length(v, e.line)
            raise ScriptError(f"unknown operator {e.op}", e.line)
        if isinstance(e, Table):
            items = self.eval_list(e.items, frame)
            if not e.fields:
                return items
            d = {i + 1: v for i, v in enumerate(items)}
            for k, ve in e.fields:
                key = k if isinstance(k, str) else _first(self.eval(k, frame))
                d[key] = _first(self.eval(ve, frame))
            return d
        raise ScriptError(f"cannot evaluate {type(e).__name__}", getattr(e, "line", 0))

    def lookup(self, e: Name, frame: Frame):
        path = e.path
        if len(path) == 1:
            name = path[0]
            scope = frame.lookup(name)
            if scope is not None:
                return scope[name]
            if frame is not self.repl_frame:
                scope = self.repl_frame.lookup(name)
                if scope is not None:
                    return scope[name]
            if name in self.globals:
                return self.globals[name]
            if name == "stdoptions":
                return self.stdoptions
        try:
            return resolve_name(path, frame.namespace)
        except ResolveError:
            pass
        if len(path) == 1 and path[0] in self.builtins:
            return self.builtins[path[0]]
        if len(path) > 1:
            raise ScriptError(f"unknown name {'::'.join(path)}", e.line)
        return None

    def index(self, obj, key, line):
        if isinstance(obj, list):
            if _is_int(key) and 1 <= key <= len(obj):
                return obj[key - 1]
            return None
        if isinstance(obj, dict):
            return obj.get(key)
        if isinstance(obj, Structure):
            if isinstance(key, (Predicate, Function, str)):
                self._materialize_pending(obj)
                return InterpView(obj, self._symbol(obj, key))
            raise ScriptError(f"a structure is indexed by a symbol, not a {type_name(key)}", line)
        if isinstance(obj, inference.QueryResult):
            rows = obj.rows
            if _is_int(key) and 1 <= key <= len(rows):
                return list(rows[key - 1])
            return None
        if isinstance(obj, str):
            raise ScriptError("attempt to index a string value", line)
        raise ScriptError(f"attempt to index a {type_name(obj)} value", line)

    def field(self, obj, name, line):
        if isinstance(obj, Options):
            return obj.get(name)
        if isinstance(obj, InterpView):
            if name == "graph":
                return obj
            if name in ("ct", "cf"):
                s = obj.structure
                tuples = getattr(s.interp(obj.symbol), name)
                return [list(t) for t in sorted(tuples, key=lambda t: [(_sortkey(x)) for x in t])]
            raise ScriptError(f"interpretation has no field {name!r}", line)
        if isinstance(obj, inference.QueryResult) and name == "variables":
            return list(obj.variables)
        if isinstance(obj, Structure) and name == "name":
            return obj.name
        if isinstance(obj, dict):
            return obj.get(name)
        raise ScriptError(f"attempt to index a {type_name(obj)} value with field {name!r}", line)

    def length(self, v, line):
        if isinstance(v, (list, str)):
            return len(v)
        if isinstance(v, dict):
            n = 0
            while (n + 1) in v:
                n += 1
            return n
        if isinstance(v, inference.QueryResult):
            return len(v)
        raise ScriptError(f"attempt to get length of a {type_name(v)} value", line)

    def binop(self, e: BinOp, frame: Frame):
        op = e.op
        if op == "and":
            left = _first(self.eval(e.left, frame))
            return _first(self.eval(e.right, frame)) if truthy(left) else left
        if op == "or":
            left = _first(self.eval(e.left, frame))
            return left if truthy(left) else _first(self.eval(e.right, frame))
        a = _first(self.eval(e.left, frame))
        b = _first(self.eval(e.right, frame))
        if op == "==":
            return _equal(a, b)
        if op == "~=":
            return not _equal(a, b)
        if op == "..":
            for v in (a, b):
                if not (isinstance(v, str) or _is_int(v)):
                    raise ScriptError(f"attempt to concatenate a {type_name(v)} value", e.line)
            return tostring(a) + tostring(b)
        if op in ("<", "<=", ">", ">="):
            if not ((_is_int(a) and _is_int(b)) or (isinstance(a, str) and isinstance(b, str))):
                raise ScriptError(f"attempt to compare {type_name(a)} with {type_name(b)}", e.line)
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
        if not (_is_int(a) and _is_int(b)):
            bad = a if not _is_int(a) else b
            raise ScriptError(f"attempt to perform arithmetic on a {type_name(bad)} value", e.line)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op in ("/", "%"):
            if b == 0:
                raise ScriptError("division by zero", e.line)
            q = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                q = -q
            return q if op == "/" else a - q * b
        raise ScriptError(f"unknown operator {op}", e.line)


def _sortkey(x):
    return (0, x, "") if isinstance(x, int) else (1, 0, x)


def _equal(a, b) -> bool:
    if a is None or b is None:
        return a is b
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, (int, str)) and isinstance(b, (int, str)):
        return type(a) is type(b) and a == b
    if isinstance(a, InterpView) and isinstance(b, InterpView):
        return a.structure is b.structure and a.symbol == b.symbol
    if isinstance(a, (Predicate, Function, Sort)):
        return a == b
    return a is b


def _describe(e) -> str:
    if isinstance(e, Name):
        return f"name '{'::'.join(e.path)}'"
    if isinstance(e, Field):
        return f"field '{e.name}'"
    return "expression"


__all__ = ["Interpreter", "ScriptError", "LCG", "LCG_MULTIPLIER", "LCG_INCREMENT", "tostring",
           "InterpView", "Multi"]
