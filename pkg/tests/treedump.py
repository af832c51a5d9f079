"""Stable text dump of a parsed program used by the parse-tree goldens."""

from kbscript.logic import Theory, Vocabulary
from kbscript.script_ast import Procedure
from kbscript.structures import Structure, format_structure


def tree_dump(program) -> str:
    out = []
    for block in program.blocks():
        path = "::".join(block.path)
        if isinstance(block, Vocabulary):
            out.append(f"vocabulary {path}")
            out += [f"  sort {s!r}" for s in block.all_sorts()]
            out += [f"  symbol {s!r}" for s in block.all_symbols()]
        elif isinstance(block, Theory):
            out.append(f"theory {path} : {'::'.join(block.vocabulary.path)}")
            out += [f"  sentence {f!r}" for f in block.sentences]
            out += [f"  definition {d!r}" for d in block.definitions]
        elif isinstance(block, Structure):
            out.append(f"structure {path}")
            out += ["  " + line for line in format_structure(block).splitlines()]
        elif isinstance(block, Procedure):
            out.append(f"procedure {path} {block.params!r}")
            out += [f"  {st!r}" for st in block.body]
    return "\n".join(out) + "\n"
