"""
Solving and generating sudokus
==============================

Load the sudoku program, solve a puzzle by model expansion, look at what
propagation alone can infer, and then run the generator procedure with a
fixed seed.  Run from the repository root:

    python3 demos/sudoku_walkthrough.py
"""

import io
from pathlib import Path

from kbscript import Interpreter, SolverOptions, Structure, model_expand, parse_file, propagate
from kbscript.inference import render_structure

ROOT = Path(__file__).resolve().parent.parent

prog = parse_file(ROOT / "programs" / "sudoku.kbp")
voc = prog.resolve("sudoku::sudokuVoc")
theory = prog.resolve("sudoku::sudokuTheory")
sudoku = voc.symbol("Sudoku", 2)

# A puzzle is a three-valued structure: clues are certainly true, the rest unknown
clues = "003020600900305001001806400008102900700000008006708200002609500800203009005010300"
puzzle = Structure(voc, "puzzle")
for sort in ("Row", "Col", "Num", "Block"):
    puzzle.set_domain(sort, range(1, 10))
for i, ch in enumerate(clues):
    if ch != "0":
        puzzle.make_true(sudoku, (i // 9 + 1, i % 9 + 1, int(ch)))
print(render_structure(puzzle, "grid", sudoku, 9, 9))

# Propagation fills in every cell that has the same value in all solutions.
# This puzzle has a single solution, so exact propagation solves it outright.
for mode in ("approx", "exact"):
    refined = propagate(theory, puzzle, SolverOptions(propagation=mode))
    known = sum(refined.value(sudoku, (r, c)) is not None for r in range(1, 10) for c in range(1, 10))
    print(f"\n{mode} propagation: {known} of 81 cells known")

# Model expansion with nrmodels=0 asks for every solution
models = model_expand(theory, puzzle, SolverOptions(nrmodels=0))
print(f"\n{len(models)} solution(s)")
print(render_structure(models[0], "grid", sudoku, 9, 9))

# The generator lives in the program itself.  A fixed seed makes the
# random clue choices, and therefore the output, reproducible.
out = io.StringIO()
Interpreter(prog, out=out, seed=7).run_main()
print("\ngenerated puzzle:")
print(out.getvalue(), end="")
