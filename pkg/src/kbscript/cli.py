"""Command-line entry point: run a program's ``main`` or open a REPL."""

from __future__ import annotations

import argparse
import sys

from .errors import KBError
from .parser import parse_file
from .printer import format_any
from .program import Namespace, Program
from .runtime import Interpreter, ScriptError, tostring

BANNER = "kbscript interactive shell; :blocks lists blocks, :show NAME prints one, :quit exits"


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kbscript", description="Run a knowledge-base program.")
    ap.add_argument("file", nargs="?", help="program to load")
    ap.add_argument("-i", "--interactive", action="store_true", help="open the shell after loading")
    ap.add_argument("--include", action="append", default=[], metavar="PATH",
                    help="directory searched by #include (repeatable)")
    ap.add_argument("--seed", type=int, help="fix the random generator; math.randomseed is ignored")
    ap.add_argument("--timeout", type=int, metavar="MS", help="solver timeout per inference call")
    ap.add_argument("--dump-ground", metavar="FILE", help="append every ground theory to FILE")
    return ap


def _block_list(program: Program) -> list[str]:
    out = []

    def go(ns: Namespace):
        for name, m in ns.members.items():
            if isinstance(m, Namespace):
                go(m)
                continue
            kind = type(m).__name__.lower()
            out.append(f"{kind} {'::'.join(ns.path + (name,))}")
    go(program.root)
    return out


def repl(interp: Interpreter, stdin=None, out=None, err=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    interactive = hasattr(stdin, "isatty") and stdin.isatty()
    out.write(BANNER + "\n")
    while True:
        out.write("> ")
        out.flush()
        try:
            line = stdin.readline()
        except KeyboardInterrupt:
            out.write("\n")
            continue
        if not line:
            if interactive:
                out.write("\n")
            return 0
        text = line.strip()
        if not text:
            continue
        if text.startswith(":"):
            cmd, _, arg = text.partition(" ")
            if cmd == ":quit":
                return 0
            if cmd == ":blocks":
                for b in _block_list(interp.program):
                    out.write(b + "\n")
            elif cmd == ":show":
                try:
                    obj = interp.program.resolve(arg.strip())
                    out.write(format_any(obj).rstrip("\n") + "\n")
                except KBError as e:
                    err.write(f"error: {e}\n")
            else:
                err.write(f"unknown command {cmd}\n")
            continue
        try:
            value = interp.eval_text(text)
        except ScriptError as e:
            err.write(e.report() + "\n")
            continue
        except KBError as e:
            err.write(f"error: {e}\n")
            continue
        except KeyboardInterrupt:
            err.write("interrupted\n")
            continue
        if value is not None:
            out.write(tostring(value) + "\n")


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    program = Program()
    if args.file:
        try:
            program = parse_file(args.file, args.include)
        except KBError as e:
            diags = getattr(e, "diagnostics", None)
            if diags:
                for d in diags:
                    sys.stderr.write(f"error: {d}\n")
            else:
                sys.stderr.write(f"error: {e}\n")
            return 1
    interp = Interpreter(program, seed=args.seed, timeout_ms=args.timeout, dump_ground=args.dump_ground)
    status = None
    if args.file:
        status = interp.run_main()
    if status is None or args.interactive:
        return repl(interp) if status in (None, 0) else status
    sys.stdout.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
