"""Producer-side proof generation: an IC3-style engine.

``prove`` either returns a certificate F whose three validation queries
(I and not-F; F and T and not-F'; F and prop and bad) are all unsatisfiable,
or a counterexample trace that simulates to the bad bit.

The engine keeps over-approximation frames F_0..F_k as clause sets with
explicit set containment (clauses added at level j enter every frame up to
j). The frontier only advances once F_k excludes all error states, so every
interior frame is safe on its own and the fixpoint frame satisfies the
strengthening query without extra conjuncts. One incremental solver session
backs each frame; temporary cube negations ride on activation literals.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass

from .aiger import Witness
from .certificate import Certificate
from .encode import TransitionSystem, primed_property
from .errors import NotAFixpoint, ResourceLimit
from .sat import SatSolver

Cube = tuple[int, ...]  # signed current-state solver literals, sorted by var


@dataclass
class ProveLimits:
    """Resource budget and engine knobs; limits default to off."""

    max_seconds: float | None = None
    max_conflicts: int | None = None
    seed: int = 0
    debug_invariants: bool = False


@dataclass(frozen=True)
class Counterexample:
    """Reset-state bits plus one input vector per step; the final step
    drives the bad bit to 1."""

    init: tuple[int, ...]
    inputs: tuple[tuple[int, ...], ...]
    safety_index: int = 0

    @property
    def length(self) -> int:
        return len(self.inputs) - 1

    def to_witness(self) -> Witness:
        return Witness(self.init, self.inputs, self.safety_index)


class _Obligation:
    __slots__ = ("cube", "cube_set", "step_inputs", "parent")

    def __init__(self, cube: Cube, step_inputs, parent):
        self.cube = cube
        self.cube_set = frozenset(cube)
        self.step_inputs = step_inputs
        self.parent = parent


class Ic3Engine:
    """One proof-generation run over a fixed transition system."""

    def __init__(self, ts: TransitionSystem, limits: ProveLimits | None = None):
        self.ts = ts
        self.limits = limits or ProveLimits()
        vm = ts.varmap
        self._current = vm.current_vars
        self._inputs = vm.input_vars
        self._next_of = vm.current_to_next
        self._init_value = {var: bool(ts.reset_values[i])
                            for i, var in enumerate(vm.current_vars)}
        self.frames: list[dict[frozenset, None]] = []
        self.solvers: list[SatSolver] = []
        self._clause_level: dict[frozenset, int] = {}
        self._start = time.monotonic()
        self.stats = {"queries": 0, "cubes_blocked": 0, "clauses_pushed": 0,
                      "frames": 0, "generalization_drops": 0}
        self._new_frame()  # F_0 = I
        for cl in ts.init:
            frozen = frozenset(cl)
            self.frames[0][frozen] = None
            self._clause_level[frozen] = 0

    # -- frames and solvers ------------------------------------------------------

    def _new_frame(self) -> None:
        solver = SatSolver(seed=self.limits.seed)
        solver.ensure_vars(self.ts.num_vars)
        for cl in self.ts.trans:
            solver.add_clause(cl)
        if not self.frames:  # frame 0 carries I
            for cl in self.ts.init:
                solver.add_clause(cl)
        self.frames.append({})
        self.solvers.append(solver)
        self.stats["frames"] += 1

    @property
    def frontier(self) -> int:
        return len(self.frames) - 1

    def frame_clauses(self, level: int) -> set[frozenset]:
        return set(self.frames[level])

    def add_frame_clause(self, clause, level: int) -> None:
        """Insert a clause into frames 0..level, keeping containment and
        subsumption-freeness of the stored sets."""
        frozen = frozenset(clause)
        existing = self._clause_level.get(frozen)
        if existing is not None and existing >= level:
            return
        for d, dlev in self._clause_level.items():
            if dlev >= level and d < frozen:
                return  # a stronger clause already covers every target frame
        start = 0 if existing is None else existing + 1
        for i in range(start, level + 1):
            self.frames[i][frozen] = None
            self.solvers[i].add_clause(list(frozen))
        self._clause_level[frozen] = level
        for d, dlev in list(self._clause_level.items()):
            if d is not frozen and dlev <= level and frozen < d:
                for i in range(dlev + 1):
                    self.frames[i].pop(d, None)
                del self._clause_level[d]

    # -- bookkeeping ----------------------------------------------------------------

    def _check_budget(self) -> None:
        lim = self.limits
        if lim.max_seconds is not None and \
                time.monotonic() - self._start > lim.max_seconds:
            raise ResourceLimit(f"wall-clock budget of {lim.max_seconds}s exceeded")
        if lim.max_conflicts is not None and \
                sum(s.conflicts for s in self.solvers) > lim.max_conflicts:
            raise ResourceLimit(f"conflict budget of {lim.max_conflicts} exceeded")

    def _prime(self, lit: int) -> int:
        nvar = self._next_of[abs(lit)]
        return -nvar if lit < 0 else nvar

    def _excludes_init(self, cube) -> bool:
        """I and cube unsatisfiable (I is one concrete state)."""
        return any(self._init_value[abs(l)] != (l > 0) for l in cube)

    def _model_cube(self, model) -> Cube:
        return tuple(v if model[v] else -v for v in self._current)

    def _model_inputs(self, model) -> tuple[int, ...]:
        return tuple(int(model[v]) for v in self._inputs)

    # -- queries ---------------------------------------------------------------------

    def _rel_ind(self, level: int, cube: Cube):
        """SAT check of F_level and not-cube and T and cube'.

        Returns ("unsat", core_shrunk_cube) or ("sat", model).
        """
        solver = self.solvers[level]
        act = solver.add_var()
        solver.add_clause([-act] + [-l for l in cube])
        assumptions = [act] + [self._prime(l) for l in cube]
        self.stats["queries"] += 1
        sat = solver.solve(assumptions)
        if sat:
            model = solver.model()
            solver.add_clause([-act])
            return "sat", model
        core = solver.core()
        solver.add_clause([-act])
        shrunk = tuple(l for l in cube if self._prime(l) in core)
        if not self._excludes_init(shrunk):
            keep = min((l for l in cube if self._init_value[abs(l)] != (l > 0)),
                       key=abs)
            shrunk = tuple(sorted(shrunk + (keep,), key=abs))
        return "unsat", shrunk

    def _get_bad(self, level: int):
        """Model of F_level and prop and bad, or None."""
        if self.ts.bad_lit is None:
            if not self.ts.bad_const:
                return None
            self.stats["queries"] += 1
            return self.solvers[level].model() if self.solvers[level].solve() else None
        self.stats["queries"] += 1
        solver = self.solvers[level]
        if solver.solve([self.ts.bad_lit]):
            return solver.model()
        return None

    def _is_blocked(self, cube_set: frozenset, level: int) -> bool:
        for clause in self.frames[level]:
            ok = True
            for lit in clause:
                if -lit not in cube_set:
                    ok = False
                    break
            if ok:
                return True
        return False

    # -- spec'd operations --------------------------------------------------------------

    def generalize(self, cube: Cube, frame_index: int) -> Cube:
        """Drop literals while the cube stays excluded from init and its
        negation stays inductive relative to F_frame_index.

        Single pass in descending variable-activity order; every drop is
        re-checked against initiation before the relative-induction query.
        """
        solver = self.solvers[frame_index]
        order = sorted(cube, key=lambda l: (-solver.activity_of(abs(l)), abs(l)))
        current = list(cube)
        for lit in order:
            if len(current) <= 1:
                break
            candidate = [l for l in current if l != lit]
            if not self._excludes_init(candidate):
                continue
            status, shrunk = self._rel_ind(frame_index, tuple(candidate))
            if status == "unsat":
                current = list(shrunk)
                self.stats["generalization_drops"] += 1
        return tuple(sorted(current, key=abs))

    def propagate_clauses(self) -> int | None:
        """One forward sweep: push every clause whose consecution holds to
        the next frame; returns the first fixpoint index, if any."""
        for i in range(1, len(self.frames) - 1):
            for clause in list(self.frames[i].keys()):
                if clause not in self.frames[i] or clause in self.frames[i + 1]:
                    continue
                assumptions = [-self._prime(l) for l in sorted(clause, key=abs)]
                self.stats["queries"] += 1
                if not self.solvers[i].solve(assumptions):
                    self.add_frame_clause(clause, i + 1)
                    self.stats["clauses_pushed"] += 1
            if set(self.frames[i]) == set(self.frames[i + 1]):
                return i
        return None

    def extract_certificate(self, fixpoint_index: int) -> Certificate:
        """Map the fixpoint frame's clauses back to AIGER latch literals."""
        i = fixpoint_index
        if i + 1 >= len(self.frames) or \
                set(self.frames[i]) != set(self.frames[i + 1]):
            raise NotAFixpoint(f"frames {i} and {i + 1} differ")
        lits_of = self.ts.varmap.latch_aiger_lits
        index_of = {v: k for k, v in enumerate(self._current)}
        clauses = []
        for clause in self.frames[i]:
            aig_clause = tuple(sorted(
                lits_of[index_of[abs(l)]] | (1 if l < 0 else 0) for l in clause))
            clauses.append(aig_clause)
        clauses.sort(key=lambda cl: (len(cl), cl))
        return Certificate(tuple(clauses))

    # -- counterexamples -----------------------------------------------------------------

    def _counterexample(self, model, obligation) -> Counterexample:
        inputs = [self._model_inputs(model)]
        ob = obligation
        while ob is not None:
            inputs.append(ob.step_inputs)
            ob = ob.parent
        return Counterexample(self.ts.reset_values, tuple(inputs),
                              self.ts.safety_index)

    def _base_checks(self) -> Counterexample | None:
        ts = self.ts
        zeros = (0,) * len(self._inputs)
        if ts.bad_lit is None:
            if ts.bad_const:
                return Counterexample(ts.reset_values, (zeros,), ts.safety_index)
            return None
        solver = SatSolver(seed=self.limits.seed)
        solver.ensure_vars(ts.num_vars)
        for cl in itertools.chain(ts.init, ts.prop_defs):
            solver.add_clause(cl)
        self.stats["queries"] += 1
        if solver.solve([ts.bad_lit]):
            return Counterexample(ts.reset_values,
                                  (self._model_inputs(solver.model()),),
                                  ts.safety_index)
        solver = SatSolver(seed=self.limits.seed)
        solver.ensure_vars(ts.num_vars)
        for cl in itertools.chain(ts.init, ts.trans):
            solver.add_clause(cl)
        pp = primed_property(ts, ts.num_vars + 1)
        solver.ensure_vars(pp.next_var - 1)
        for cl in pp.clauses:
            solver.add_clause(cl)
        self.stats["queries"] += 1
        if solver.solve([pp.bad_lit]):
            model = solver.model()
            step1 = tuple(int(model.get(pp.rename.get(v, 0), False))
                          for v in self._inputs)
            return Counterexample(ts.reset_values,
                                  (self._model_inputs(model), step1),
                                  ts.safety_index)
        return None

    # -- main loop --------------------------------------------------------------------------

    def _block_all(self, root_cube: Cube, root_inputs, level: int):
        """Discharge the proof obligations spawned by one bad state at the
        frontier; returns a counterexample if one is reachable."""
        counter = itertools.count()
        root = _Obligation(root_cube, root_inputs, None)
        queue = [(level, len(root_cube), next(counter), root)]
        while queue:
            frame, _, _, ob = heapq.heappop(queue)
            self._check_budget()
            if frame > self.frontier:
                continue
            if self._is_blocked(ob.cube_set, frame):
                if frame < level:
                    heapq.heappush(queue, (frame + 1, len(ob.cube), next(counter), ob))
                continue
            status, payload = self._rel_ind(frame - 1, ob.cube)
            if status == "unsat":
                generalized = self.generalize(payload, frame - 1)
                self.add_frame_clause([-l for l in generalized], frame)
                self.stats["cubes_blocked"] += 1
                if frame < level:
                    heapq.heappush(queue, (frame + 1, len(ob.cube), next(counter), ob))
            else:
                model = payload
                pred_cube = self._model_cube(model)
                if not self._excludes_init(pred_cube):
                    # the predecessor is the initial state: the obligation
                    # chain is a concrete run from reset to the bad state
                    return self._counterexample(model, ob)
                pred = _Obligation(pred_cube, self._model_inputs(model), ob)
                heapq.heappush(queue, (frame - 1, len(pred.cube), next(counter), pred))
                heapq.heappush(queue, (frame, len(ob.cube), next(counter), ob))
        return None

    def prove(self):
        """Run to a Certificate or Counterexample (or raise ResourceLimit)."""
        self._start = time.monotonic()
        cex = self._base_checks()
        if cex is not None:
            return cex
        self._new_frame()  # F_1
        while True:
            self._check_budget()
            level = self.frontier
            model = self._get_bad(level)
            if model is not None:
                cex = self._block_all(self._model_cube(model),
                                      self._model_inputs(model), level)
                if cex is not None:
                    return cex
                continue
            self._new_frame()
            fixpoint = self.propagate_clauses()
            if self.limits.debug_invariants:
                self.check_frame_invariants()
            if fixpoint is not None:
                return self.extract_certificate(fixpoint)

    # -- debugging ---------------------------------------------------------------------------

    def check_frame_invariants(self) -> None:
        """SAT-checked frame invariants: containment, consecution between
        adjacent frames, and interior-frame safety."""
        for i in range(1, len(self.frames) - 1):
            assert set(self.frames[i + 1]) <= set(self.frames[i]), \
                f"containment broken between frames {i} and {i + 1}"
        for i in range(len(self.frames) - 1):
            for clause in self.frames[i + 1]:
                assumptions = [-self._prime(l) for l in sorted(clause, key=abs)]
                assert not self.solvers[i].solve(assumptions), \
                    f"consecution broken for a clause of frame {i + 1}"
        if self.ts.bad_lit is not None:
            for i in range(len(self.frames) - 1):
                assert not self.solvers[i].solve([self.ts.bad_lit]), \
                    f"interior frame {i} intersects the error states"


def prove(ts: TransitionSystem, limits: ProveLimits | None = None):
    """Prove the encoded safety property; Certificate or Counterexample."""
    return Ic3Engine(ts, limits).prove()
