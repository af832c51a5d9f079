"""
Definitions, queries and entailment
===================================

A small graph knowledge base: reachability as an inductive definition,
queries over the resulting structure, and a couple of entailment checks
including TPTP export.  Run from the repository root:

    python3 demos/definitions_and_queries.py
"""

from kbscript import (
    apply_definition, entails, eval_definition, export_tptp, parse_formula, parse_program, query,
)

SOURCE = """
vocabulary G {
  type Node isa nat
  Edge(Node,Node)
  Reach(Node,Node)
}

theory Closure : G {
  { ! x y : Reach(x,y) <- Edge(x,y).
    ! x y : Reach(x,y) <- ? z : Reach(x,z) & Edge(z,y). }
}

theory Symmetric : G { ! x y : Edge(x,y) => Edge(y,x). }
theory Looped : G { ! x : (? y : Edge(x,y)) => Edge(x,x). }
theory NoSelf : G { ! x : ~Edge(x,x). }

structure Graph : G {
  Node = {1..5}
  Edge = {1,2; 2,3; 3,1; 4,5}
}
"""

prog = parse_program(SOURCE)
voc = prog.resolve("G")
graph = prog.resolve("Graph")
closure = prog.resolve("Closure").definitions[0]

# The least fixpoint is computed stratum by stratum
stats = {}
reach = eval_definition(closure, graph, stats)[voc.symbol("Reach", 2)]
print("reach:", sorted(reach))
print("fixpoint reached after", stats["iterations"], "round(s)")

# Queries need a two-valued structure, so install the defined relation first
full = apply_definition(closure, graph)
print("on a cycle:", query(parse_formula("Reach(x,x)", voc), full))
print("reach 1 but not back:", query(parse_formula("Reach(1,y) & ~Reach(y,1)", voc), full))

# Entailment is decided over the domains of a structure
print()
print("symmetric entails looped?", entails(prog.resolve("Symmetric"), prog.resolve("Looped"), graph)[0])
verdict, model = entails(prog.resolve("Symmetric"), prog.resolve("NoSelf"), graph)
print("symmetric entails no self-loops?", verdict)
print(query(parse_formula("Edge(x,y)", voc), model))

# The same question as a first-order problem for an external prover
print()
print(export_tptp(prog.resolve("Symmetric"), prog.resolve("NoSelf")), end="")
