"""Bundled incremental CDCL SAT solver.

Conflict-driven clause learning with two-watched-literal propagation,
first-UIP learning with local clause minimization, an activity-based
decision heuristic (fixed seed, deterministic), phase saving, and geometric
restarts. Solving under assumptions yields an unsat core that is a subset of
the assumptions, MiniSat style.

The public literal convention is signed integers: variable ``v`` appears as
``v`` (positive) or ``-v``. Internally literals are encoded as
``2*v`` / ``2*v + 1`` for array-indexed watch lists.

A session is single-threaded; independent sessions may run concurrently.
"""

from __future__ import annotations

import heapq
import random

from .errors import UnallocatedVariable

_UNDEF = -1
# learned-clause database is left untouched below this size
_REDUCE_THRESHOLD = 10_000


def _enc(lit: int) -> int:
    return (lit << 1) if lit > 0 else ((-lit) << 1) | 1


def _dec(elit: int) -> int:
    var = elit >> 1
    return -var if elit & 1 else var


class SatSolver:
    """One incremental solving session over a growing clause database."""

    def __init__(self, seed: int = 0):
        self._rng = random.Random(seed)
        self._nvars = 0
        self._watches: list[list] = [[], []]
        self._assign = [_UNDEF]          # per var: 0 / 1 / _UNDEF
        self._level = [0]
        self._reason: list = [None]
        self._activity = [0.0]
        self._phase = [0]
        self._trail: list[int] = []      # encoded literals
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._heap: list[tuple[float, int]] = []
        self._var_inc = 1.0
        self._learnts: list[list[int]] = []
        self._ok = True
        self._model: list[int] | None = None
        self._core: frozenset[int] | None = None
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0

    # -- variables and clauses -------------------------------------------------

    @property
    def num_vars(self) -> int:
        return self._nvars

    def add_var(self) -> int:
        self._nvars += 1
        self._watches.append([])
        self._watches.append([])
        self._assign.append(_UNDEF)
        self._level.append(0)
        self._reason.append(None)
        act = self._rng.random() * 1e-9
        self._activity.append(act)
        self._phase.append(0)
        heapq.heappush(self._heap, (-act, self._nvars))
        return self._nvars

    def ensure_vars(self, n: int) -> None:
        while self._nvars < n:
            self.add_var()

    def _check_lit(self, lit: int) -> None:
        if lit == 0 or abs(lit) > self._nvars:
            raise UnallocatedVariable(f"literal {lit} references an unallocated variable")

    def add_clause(self, clause) -> bool:
        """Add a permanent clause; returns False once the database is unsat."""
        if not self._ok:
            return False
        seen = {}
        lits = []
        for lit in clause:
            self._check_lit(lit)
            prev = seen.get(-lit)
            if prev is not None:
                return True  # tautology
            if lit not in seen:
                seen[lit] = True
                lits.append(_enc(lit))
        self._cancel_until(0)
        # drop literals already false at the root, stop if one is true
        assign = self._assign
        out = []
        for el in lits:
            val = assign[el >> 1]
            if val == _UNDEF:
                out.append(el)
            elif val == (el & 1) ^ 1:
                return True  # satisfied at root level
        if not out:
            self._ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], None)
            if self._propagate() is not None:
                self._ok = False
            return self._ok
        self._attach(out)
        return True

    def _attach(self, lits: list[int]) -> None:
        # watches[q] holds the clauses currently watching literal q
        self._watches[lits[0]].append(lits)
        self._watches[lits[1]].append(lits)

    # -- trail -------------------------------------------------------------------

    def _value(self, elit: int) -> int:
        val = self._assign[elit >> 1]
        return val if val == _UNDEF else val ^ (elit & 1)

    def _enqueue(self, elit: int, reason) -> None:
        var = elit >> 1
        self._assign[var] = (elit & 1) ^ 1
        self._level[var] = len(self._trail_lim)
        self._reason[var] = reason
        self._trail.append(elit)

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        bound = self._trail_lim[level]
        trail = self._trail
        assign = self._assign
        phase = self._phase
        heap = self._heap
        activity = self._activity
        for idx in range(len(trail) - 1, bound - 1, -1):
            elit = trail[idx]
            var = elit >> 1
            phase[var] = assign[var]
            assign[var] = _UNDEF
            self._reason[var] = None
            heapq.heappush(heap, (-activity[var], var))
        del trail[bound:]
        del self._trail_lim[level:]
        self._qhead = min(self._qhead, bound)

    # -- propagation ---------------------------------------------------------------

    def _propagate(self):
        trail = self._trail
        watches = self._watches
        assign = self._assign
        while self._qhead < len(trail):
            elit = trail[self._qhead]
            self._qhead += 1
            self.propagations += 1
            false_lit = elit ^ 1
            ws = watches[false_lit]
            keep = []
            idx = 0
            n = len(ws)
            while idx < n:
                cl = ws[idx]
                idx += 1
                if cl[0] == false_lit:
                    cl[0] = cl[1]
                    cl[1] = false_lit
                first = cl[0]
                fval = assign[first >> 1]
                if fval == (first & 1) ^ 1:
                    keep.append(cl)
                    continue
                for k in range(2, len(cl)):
                    other = cl[k]
                    oval = assign[other >> 1]
                    if oval == _UNDEF or oval == (other & 1) ^ 1:
                        cl[1] = other
                        cl[k] = false_lit
                        watches[other].append(cl)
                        break
                else:
                    keep.append(cl)
                    if fval == first & 1:  # first is false: conflict
                        keep.extend(ws[idx:])
                        ws[:] = keep
                        self._qhead = len(trail)
                        return cl
                    self._enqueue(first, cl)
                    continue
            ws[:] = keep
        return None

    # -- conflict analysis ------------------------------------------------------------

    def _bump(self, var: int) -> None:
        act = self._activity[var] + self._var_inc
        self._activity[var] = act
        if act > 1e100:
            scale = 1e-100
            for v in range(1, self._nvars + 1):
                self._activity[v] *= scale
            self._var_inc *= scale
        if self._assign[var] == _UNDEF:
            heapq.heappush(self._heap, (-self._activity[var], var))

    def _analyze(self, confl) -> tuple[list[int], int]:
        learnt = [0]
        seen = bytearray(self._nvars + 1)
        cur_level = len(self._trail_lim)
        counter = 0
        elit = None
        idx = len(self._trail) - 1
        level = self._level
        reason = self._reason
        while True:
            start = 0 if elit is None else 1
            for k in range(start, len(confl)):
                q = confl[k]
                var = q >> 1
                if not seen[var] and level[var] > 0:
                    seen[var] = 1
                    self._bump(var)
                    if level[var] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[self._trail[idx] >> 1]:
                idx -= 1
            elit = self._trail[idx]
            var = elit >> 1
            confl = reason[var]
            seen[var] = 0
            counter -= 1
            idx -= 1
            if counter == 0:
                break
        learnt[0] = elit ^ 1

        # local minimization: drop literals implied by the rest of the clause
        marked = bytearray(self._nvars + 1)
        for q in learnt:
            marked[q >> 1] = 1
        out = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None:
                out.append(q)
                continue
            for other in r:
                ovar = other >> 1
                if ovar != (q >> 1) and not marked[ovar] and level[ovar] > 0:
                    out.append(q)
                    break
        learnt = out

        if len(learnt) == 1:
            return learnt, 0
        # move a max-level literal to position 1
        max_k = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[max_k] >> 1]:
                max_k = k
        learnt[1], learnt[max_k] = learnt[max_k], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _analyze_final(self, failed_elit: int) -> frozenset[int]:
        """Assumptions sufficient for the falsification of an assumption."""
        core = {_dec(failed_elit)}
        if not self._trail_lim:
            return frozenset(core)
        seen = bytearray(self._nvars + 1)
        seen[failed_elit >> 1] = 1
        first_decision = self._trail_lim[0]
        for idx in range(len(self._trail) - 1, first_decision - 1, -1):
            elit = self._trail[idx]
            var = elit >> 1
            if not seen[var]:
                continue
            reason = self._reason[var]
            if reason is None:
                core.add(_dec(elit))
            else:
                for other in reason:
                    if self._level[other >> 1] > 0:
                        seen[other >> 1] = 1
            seen[var] = 0
        return frozenset(core)

    # -- search ---------------------------------------------------------------------

    def _pick_branch(self):
        heap = self._heap
        assign = self._assign
        activity = self._activity
        while heap:
            negact, var = heapq.heappop(heap)
            if assign[var] == _UNDEF and -negact == activity[var]:
                return var
        for var in range(1, self._nvars + 1):
            if assign[var] == _UNDEF:
                return var
        return None

    def _reduce_db(self) -> None:
        reasons = {id(self._reason[v]) for v in range(1, self._nvars + 1)
                   if self._reason[v] is not None}
        self._learnts.sort(key=len)
        keep_n = len(self._learnts) // 2
        for cl in self._learnts[keep_n:]:
            if id(cl) in reasons or len(cl) <= 2:
                continue
            for w in (cl[0], cl[1]):
                try:
                    self._watches[w].remove(cl)
                except ValueError:
                    pass
        kept = self._learnts[:keep_n]
        kept.extend(cl for cl in self._learnts[keep_n:]
                    if id(cl) in reasons or len(cl) <= 2)
        self._learnts = kept

    def solve(self, assumptions=()) -> bool:
        """Search for a model consistent with the assumptions.

        On True, ``model()`` reports a total assignment; on False under
        assumptions, ``core()`` is an unsatisfiable subset of them.
        """
        self._model = None
        self._core = None
        if not self._ok:
            self._core = frozenset()
            return False
        assumps = []
        for lit in assumptions:
            self._check_lit(lit)
            assumps.append(_enc(lit))
        self._cancel_until(0)
        if self._propagate() is not None:
            self._ok = False
            self._core = frozenset()
            return False

        restart_budget = 100.0
        conflicts_here = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts_here += 1
                if not self._trail_lim:
                    self._ok = False
                    self._core = frozenset()
                    return False
                learnt, back_level = self._analyze(confl)
                self._cancel_until(back_level)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._learnts.append(learnt)
                    self._attach(learnt)
                    self._enqueue(learnt[0], learnt)
                self._var_inc /= 0.95
                if len(self._learnts) > _REDUCE_THRESHOLD:
                    self._reduce_db()
                continue
            if conflicts_here >= restart_budget:
                conflicts_here = 0
                restart_budget *= 1.5
                self._cancel_until(0)
                continue
            level = len(self._trail_lim)
            if level < len(assumps):
                elit = assumps[level]
                val = self._value(elit)
                if val == 1:
                    self._trail_lim.append(len(self._trail))
                elif val == 0:
                    self._core = self._analyze_final(elit)
                    self._cancel_until(0)
                    return False
                else:
                    self._trail_lim.append(len(self._trail))
                    self._enqueue(elit, None)
                continue
            var = self._pick_branch()
            if var is None:
                self._model = list(self._assign)
                self._cancel_until(0)
                return True
            self.decisions += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue((var << 1) | (self._phase[var] ^ 1), None)

    # -- results -----------------------------------------------------------------------

    def model(self) -> dict[int, bool]:
        """Total assignment from the last SAT answer, as var -> bool."""
        assert self._model is not None, "no model: last solve was not SAT"
        return {v: self._model[v] == 1 for v in range(1, self._nvars + 1)}

    def model_value(self, lit: int) -> bool:
        assert self._model is not None, "no model: last solve was not SAT"
        val = self._model[abs(lit)] == 1
        return val if lit > 0 else not val

    def core(self) -> frozenset[int]:
        """Unsat core from the last failed solve; a subset of the assumptions."""
        assert self._core is not None, "no core: last solve was not UNSAT"
        return self._core

    def activity_of(self, var: int) -> float:
        return self._activity[var]


# --- DIMACS import/export -------------------------------------------------------------

def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    """Parse DIMACS CNF ("p cnf V C" header, 0-terminated clauses)."""
    nvars = None
    declared = None
    clauses: list[list[int]] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise ValueError(f"bad DIMACS problem line: {line!r}")
            nvars, declared = int(fields[2]), int(fields[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        clauses.append(pending)
    if nvars is None:
        raise ValueError("missing DIMACS problem line")
    if declared is not None and declared != len(clauses):
        raise ValueError(f"header declares {declared} clauses, found {len(clauses)}")
    return nvars, clauses


def write_dimacs(nvars: int, clauses) -> str:
    lines = [f"p cnf {nvars} {len(clauses)}"]
    for cl in clauses:
        lines.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(lines) + "\n"


def solver_from_dimacs(text: str, seed: int = 0) -> SatSolver:
    nvars, clauses = parse_dimacs(text)
    solver = SatSolver(seed=seed)
    solver.ensure_vars(nvars)
    for cl in clauses:
        solver.add_clause(cl)
    return solver
