"""Conflict-driven SAT search over a GroundTheory.

Clauses use two watched literals; at-most-one groups and aggregates are
propagated natively.  Decisions take the lowest unassigned variable and try
false first, so runs are fully deterministic.  Models are enumerated with
blocking clauses over a projection (the atom ids), which makes the set of
models independent of the search order.
"""

from __future__ import annotations

import time

from .errors import SolverTimeout
from .grounder import INF, GroundTheory, compare


def _interval_status(op, b, lo, hi) -> int:
    """+1 if ``v op b`` for every v in [lo, hi], -1 if for none, else 0."""
    if op == "=":
        if lo == hi == b:
            return 1
        return -1 if b < lo or b > hi else 0
    if op == "~=":
        if lo == hi == b:
            return -1
        return 1 if b < lo or b > hi else 0
    if op == "<":
        return 1 if hi < b else -1 if lo >= b else 0
    if op == "=<":
        return 1 if hi <= b else -1 if lo > b else 0
    if op == ">":
        return 1 if lo > b else -1 if hi <= b else 0
    if op == ">=":
        return 1 if lo >= b else -1 if hi < b else 0
    raise ValueError(op)


class _Agg:
    __slots__ = ("head", "kind", "op", "bound", "lits", "weights", "fixed")

    def __init__(self, a):
        self.head = a.head
        self.kind = a.kind
        self.op = a.op
        self.bound = a.bound
        self.lits = list(a.lits)
        self.weights = list(a.weights)
        self.fixed = list(a.fixed)


class Solver:
    def __init__(self, gt: GroundTheory, timeout_ms: int | None = None):
        self.gt = gt
        n = self.n = gt.nvars
        self.val = [0] * (n + 1)
        self.level = [0] * (n + 1)
        self.reason: list = [None] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.amo: list[list[int]] = []
        self.amo_occ: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.aggs: list[_Agg] = []
        self.agg_occ: list[list[int]] = [[] for _ in range(n + 1)]
        self.next_var = 1
        self.ok = True
        self.deadline = None if timeout_ms is None else time.monotonic() + timeout_ms / 1000.0
        self.conflicts = 0
        self.decisions = 0
        self._load()

    # -- setup -----------------------------------------------------------

    @staticmethod
    def _code(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _lit_val(self, lit: int) -> int:
        v = self.val[abs(lit)]
        return v if lit > 0 else -v

    def _load(self) -> None:
        gt = self.gt
        for v in sorted(gt.fixed_true):
            self.add_clause([v])
        for v in sorted(gt.fixed_false):
            self.add_clause([-v])
        for c in gt.clauses:
            self.add_clause(list(c))
        for g in gt.exactly_one:
            self.add_clause(list(g))
            self._add_amo(g)
        for g in gt.at_most_one:
            self._add_amo(g)
        for a in gt.aggregates:
            i = len(self.aggs)
            self.aggs.append(_Agg(a))
            for v in {abs(a.head)} | {abs(l) for l in a.lits}:
                self.agg_occ[v].append(i)
        if self.ok:
            # aggregates may be decided before any of their literals move
            for i in range(len(self.aggs)):
                if self._agg_propagate(i) is not None:
                    self.ok = False
                    break
        if self.ok and self.propagate() is not None:
            self.ok = False

    def _add_amo(self, group) -> None:
        i = len(self.amo)
        self.amo.append(list(group))
        for l in group:
            self.amo_occ[self._code(l)].append(i)

    def add_clause(self, c: list[int]) -> None:
        """Add a clause at decision level 0."""
        if not self.ok:
            return
        c = list(dict.fromkeys(c))
        if any(-l in c for l in c):
            return
        c = [l for l in c if not (self._lit_val(l) < 0 and self.level[abs(l)] == 0)]
        if any(self._lit_val(l) > 0 and self.level[abs(l)] == 0 for l in c):
            return
        if not c:
            self.ok = False
            return
        if len(c) == 1:
            if self._lit_val(c[0]) < 0:
                self.ok = False
            elif self._lit_val(c[0]) == 0:
                self._assign(c[0], [c[0]])
            return
        self._attach(c)

    def _attach(self, c: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(c)
        self.watches[self._code(c[0])].append(ci)
        self.watches[self._code(c[1])].append(ci)
        return ci

    # -- assignment ------------------------------------------------------

    def _assign(self, lit: int, reason) -> None:
        v = abs(lit)
        self.val[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.val[v] = 0
            self.reason[v] = None
            if v < self.next_var:
                self.next_var = v
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = min(self.qhead, len(self.trail))

    def propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            confl = self._propagate_clauses(p)
            if confl is not None:
                return confl
            for gi in self.amo_occ[self._code(p)]:
                for m in self.amo[gi]:
                    if m == p:
                        continue
                    mv = self._lit_val(m)
                    if mv > 0:
                        return [-p, -m]
                    if mv == 0:
                        self._assign(-m, [-m, -p])
            for ai in self.agg_occ[abs(p)]:
                confl = self._agg_propagate(ai)
                if confl is not None:
                    return confl
        return None

    def _propagate_clauses(self, p: int):
        false_lit = -p
        ws = self.watches[self._code(false_lit)]
        i = 0
        while i < len(ws):
            ci = ws[i]
            c = self.clauses[ci]
            if c[0] == false_lit:
                c[0], c[1] = c[1], c[0]
            first = c[0]
            if self._lit_val(first) > 0:
                i += 1
                continue
            for k in range(2, len(c)):
                if self._lit_val(c[k]) >= 0:
                    c[1], c[k] = c[k], c[1]
                    self.watches[self._code(c[1])].append(ci)
                    ws[i] = ws[-1]
                    ws.pop()
                    break
            else:
                if self._lit_val(first) < 0:
                    return c
                self._assign(first, c)
                i += 1
        return None

    # -- aggregates ------------------------------------------------------

    def _bounds(self, a: _Agg, extra_lit=0, extra_val=0):
        def lv(l):
            if abs(l) == abs(extra_lit):
                return extra_val if l == extra_lit else -extra_val
            return self._lit_val(l)
        if a.kind in ("card", "sum"):
            base = sum(a.fixed)
            lo = hi = base
            for l, w in zip(a.lits, a.weights):
                x = lv(l)
                if x > 0:
                    lo += w
                    hi += w
                elif x == 0:
                    if w < 0:
                        lo += w
                    else:
                        hi += w
            return lo, hi
        certain = list(a.fixed)
        possible = []
        for l, w in zip(a.lits, a.weights):
            x = lv(l)
            if x > 0:
                certain.append(w)
            elif x == 0:
                possible.append(w)
        if a.kind == "min":
            return min(certain + possible, default=INF), min(certain, default=INF)
        return max(certain, default=-INF), max(certain + possible, default=-INF)

    def _explain(self, a: _Agg) -> list[int]:
        out = []
        for l in a.lits:
            x = self._lit_val(l)
            if x > 0:
                out.append(-l)
            elif x < 0:
                out.append(l)
        return out

    def _agg_propagate(self, ai: int):
        a = self.aggs[ai]
        lo, hi = self._bounds(a)
        st = _interval_status(a.op, a.bound, lo, hi)
        h = a.head
        hv = self._lit_val(h)
        if st != 0:
            want = h if st > 0 else -h
            if self._lit_val(want) < 0:
                return [want] + self._explain(a)
            if self._lit_val(want) == 0:
                self._assign(want, [want] + self._explain(a))
            return None
        if hv == 0:
            return None
        head_lit = h if hv > 0 else -h
        for l in a.lits:
            if self._lit_val(l) != 0:
                continue
            for value in (1, -1):
                lo2, hi2 = self._bounds(a, l, value)
                st2 = _interval_status(a.op, a.bound, lo2, hi2)
                if st2 == -hv:
                    # setting l to `value` would contradict the head
                    forced = -l if value > 0 else l
                    self._assign(forced, [forced, -head_lit] + self._explain(a))
                    break
        return None

    # -- search ----------------------------------------------------------

    def _analyze(self, confl):
        cur = len(self.trail_lim)
        seen = set()
        learnt = [0]
        counter = 0
        idx = len(self.trail) - 1
        p = 0
        clause = confl
        while True:
            for q in clause:
                v = abs(q)
                if p and v == abs(p):
                    continue
                if v in seen or self.level[v] == 0:
                    continue
                seen.add(v)
                if self.level[v] == cur:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter <= 0:
                break
            clause = self.reason[abs(p)]
        learnt[0] = -p
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    def _resolve_conflict(self, confl) -> bool:
        """Learn from a conflict and backjump; False when unsatisfiable."""
        self.conflicts += 1
        top = max((self.level[abs(l)] for l in confl), default=0)
        if top == 0:
            return False
        # analysis needs a literal of the conflict at the current level
        self._backtrack(top)
        learnt, bj = self._analyze(confl)
        self._backtrack(bj)
        if len(learnt) == 1:
            self._assign(learnt[0], learnt)
        else:
            self._attach(learnt)
            self._assign(learnt[0], learnt)
        return True

    def _check_time(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeout("solver timed out")

    def _decide(self, assumptions=()):
        """Open a new level; False when the assignment is total, None when
        an assumption is already falsified."""
        for a in assumptions:
            x = self.val[abs(a)]
            if x == 0:
                self.trail_lim.append(len(self.trail))
                self._assign(a, None)
                return True
            if (x > 0) != (a > 0):
                return None
        v = self.next_var
        while v <= self.n and self.val[v] != 0:
            v += 1
        self.next_var = v
        if v > self.n:
            return False
        self.decisions += 1
        self.trail_lim.append(len(self.trail))
        self._assign(-v, None)
        return True

    def search(self, assumptions=()) -> bool:
        """Extend the current assignment to a total one; False if none
        (under ``assumptions``, which are decided first)."""
        if not self.ok:
            return False
        steps = 0
        while True:
            confl = self.propagate()
            if confl is not None:
                if not self._resolve_conflict(confl):
                    self.ok = False
                    return False
                continue
            steps += 1
            if steps % 256 == 0:
                self._check_time()
            d = self._decide(assumptions)
            if d is None:
                return False
            if not d:
                return True

    def block(self, lits: list[int]) -> bool:
        """Add a clause that the current total assignment violates (all of
        ``lits`` are false) and resume from the conflict."""
        if not lits:
            self.ok = False
            return False
        top = max(self.level[abs(l)] for l in lits)
        if top == 0:
            self.ok = False
            return False
        self._backtrack(top)
        lits = sorted(lits, key=lambda l: -self.level[abs(l)])
        if len(lits) == 1:
            # a unit blocking clause only holds below its own level
            self._backtrack(0)
            self.add_clause(lits)
            return self.ok
        self._attach(lits)
        if not self._resolve_conflict(lits):
            self.ok = False
            return False
        return True

    def models(self, projection: list[int], limit: int = 0, accept=None):
        """Yield assignments (``val`` snapshots) restricted to distinct
        projections.  ``accept(value)`` may reject a total assignment."""
        found = 0
        while self.search():
            snapshot = list(self.val)
            good = accept is None or accept(lambda v: snapshot[v] > 0)
            if good:
                found += 1
                yield snapshot
                if limit and found >= limit:
                    return
            blocking = [-v if snapshot[v] > 0 else v for v in projection
                        if self.level[v] > 0]
            if not self.block(blocking):
                return

    def solve_under(self, assumptions, projection, accept=None):
        """One accepted model satisfying ``assumptions`` (snapshot), or None.
        Rejected candidates are blocked permanently, which is sound because
        acceptance depends only on the projection."""
        while True:
            self._backtrack(0)
            if not self.search(assumptions):
                return None
            snapshot = list(self.val)
            if accept is None or accept(lambda v: snapshot[v] > 0):
                return snapshot
            blocking = [-v if snapshot[v] > 0 else v for v in projection
                        if self.level[v] > 0]
            if not self.block(blocking):
                return None

    def backbone(self, projection, accept=None):
        """Values of ``projection`` variables shared by every accepted
        model, or None when there is no model."""
        first = self.solve_under((), projection, accept)
        if first is None:
            return None
        cand = {v: first[v] > 0 for v in projection}
        for v in projection:
            if v not in cand:
                continue
            other = self.solve_under((-v if cand[v] else v,), projection, accept)
            if other is None:
                continue
            for u in [u for u, b in cand.items() if (other[u] > 0) != b]:
                del cand[u]
        return cand

    def root_values(self) -> dict[int, bool] | None:
        """Values fixed at level 0 after propagation, None if inconsistent."""
        if not self.ok:
            return None
        return {abs(l): l > 0 for l in self.trail}


def solve(gt: GroundTheory, limit: int = 0, timeout_ms=None, projection=None):
    """All (or ``limit``) models of ``gt`` projected onto its atoms, checking
    definitions on every candidate."""
    s = Solver(gt, timeout_ms)
    proj = list(gt.table) if projection is None else projection
    accept = gt.definitions_hold if gt.rules or gt.defined else None
    return list(s.models(proj, limit, accept))


__all__ = ["Solver", "solve", "compare"]
