"""Consumer-side validation: three SAT queries decide a shipped certificate.

``validate`` checks that a certificate F is an inductive strengthening of
the selected safety property for the shipped circuit:

    initiation:     I and not-F           unsatisfiable
    consecution:    F and T and not-F'    unsatisfiable
    strengthening:  F and prop and bad    unsatisfiable

Tampered inputs are expected inputs: every failure is a Verdict, never an
exception. ``reach_bruteforce`` is the independent ground-truth oracle used
by the test and acceptance suites (exact BFS over the state graph with all
inputs enumerated per step); it is not part of the shipped workflow.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import aiger as aig_mod
from .aiger import Aig, Witness, gate_topo_order, lit_is_const, lit_var
from .certificate import BoundCertificate, Certificate, bind
from .encode import TransitionSystem, encode, negate_tseitin, prime, resolve_safety
from .errors import CertificateError, NoSuchSafetyBit, PchError, TooManyStateBits
from .sat import SatSolver

QUERY_NAMES = ("initiation", "consecution", "strengthening")


@dataclass(frozen=True)
class QueryResult:
    name: str
    sat: bool
    micros: int


@dataclass(frozen=True)
class Verdict:
    """Outcome of certificate validation.

    ``status`` is "valid", "invalid", or "rejected". Invalid verdicts carry
    the first failed query and a satisfying model of that query's formula;
    rejected verdicts carry the bind/digest/arity reason. All three queries
    always run to completion so the reported timings are honest.
    """

    status: str
    failed_query: str | None = None
    witness: dict[int, bool] | None = None
    reason: str | None = None
    queries: tuple[QueryResult, ...] = ()

    @property
    def is_valid(self) -> bool:
        return self.status == "valid"

    def report_lines(self) -> list[str]:
        lines = [f"{q.name} {'SAT' if q.sat else 'UNSAT'} {q.micros}" for q in self.queries]
        lines.append(f"verdict {self.status}"
                     + (f" {self.failed_query}" if self.failed_query else "")
                     + (f" ({self.reason})" if self.reason else ""))
        return lines


def _timed(fn):
    start = time.perf_counter_ns()
    result = fn()
    return result, (time.perf_counter_ns() - start) // 1000


def _query_initiation(ts: TransitionSystem, bound: BoundCertificate,
                      strategy: str, seed: int):
    if not bound.clauses:
        return False, None
    solver = SatSolver(seed=seed)
    solver.ensure_vars(ts.num_vars)
    for cl in ts.init:
        solver.add_clause(cl)
    if strategy == "split":
        for cl in bound.clauses:
            if solver.solve([-l for l in cl]):
                return True, solver.model()
        return False, None
    neg = negate_tseitin(bound.clauses, ts.num_vars + 1)
    solver.ensure_vars(neg.next_var - 1)
    for cl in neg.clauses:
        solver.add_clause(cl)
    if solver.solve():
        return True, solver.model()
    return False, None


def _query_consecution(ts: TransitionSystem, bound: BoundCertificate,
                       strategy: str, seed: int):
    if not bound.clauses:
        return False, None
    solver = SatSolver(seed=seed)
    solver.ensure_vars(ts.num_vars)
    for cl in bound.clauses:
        solver.add_clause(cl)
    for cl in ts.trans:
        solver.add_clause(cl)
    primed = [prime(cl, ts.varmap) for cl in bound.clauses]
    if strategy == "split":
        for cl in primed:
            if solver.solve([-l for l in cl]):
                return True, solver.model()
        return False, None
    neg = negate_tseitin(primed, ts.num_vars + 1)
    solver.ensure_vars(neg.next_var - 1)
    for cl in neg.clauses:
        solver.add_clause(cl)
    if solver.solve():
        return True, solver.model()
    return False, None


def _query_strengthening(ts: TransitionSystem, bound: BoundCertificate, seed: int):
    if ts.bad_lit is None and not ts.bad_const:
        return False, None
    solver = SatSolver(seed=seed)
    solver.ensure_vars(ts.num_vars)
    for cl in bound.clauses:
        solver.add_clause(cl)
    for cl in ts.prop_defs:
        solver.add_clause(cl)
    sat = solver.solve([] if ts.bad_lit is None else [ts.bad_lit])
    if sat:
        return True, solver.model()
    return False, None


def validate(aig: Aig, safety_index: int, cert: Certificate,
             strategy: str = "split", check_digest: bool = True,
             seed: int = 0) -> Verdict:
    """Decide whether a shipped certificate is an inductive strengthening.

    ``strategy`` handles the negated certificate in the first two queries:
    "split" runs one assumption-based check per certificate clause,
    "tseitin" a single check over a selector encoding. Both return
    identical outcomes.
    """
    if strategy not in ("split", "tseitin"):
        raise ValueError(f"unknown strategy {strategy!r}")
    try:
        resolve_safety(aig, safety_index)
        bound = bind(cert, aig, check_digest=check_digest)
        ts = encode(aig, safety_index)
    except (CertificateError, NoSuchSafetyBit) as exc:
        return Verdict(status="rejected", reason=f"{type(exc).__name__}: {exc}")

    results = []
    failures = []
    (sat1, model1), us1 = _timed(lambda: _query_initiation(ts, bound, strategy, seed))
    results.append(QueryResult("initiation", sat1, us1))
    if sat1:
        failures.append(("initiation", model1))
    (sat2, model2), us2 = _timed(lambda: _query_consecution(ts, bound, strategy, seed))
    results.append(QueryResult("consecution", sat2, us2))
    if sat2:
        failures.append(("consecution", model2))
    (sat3, model3), us3 = _timed(lambda: _query_strengthening(ts, bound, seed))
    results.append(QueryResult("strengthening", sat3, us3))
    if sat3:
        failures.append(("strengthening", model3))

    if not failures:
        return Verdict(status="valid", queries=tuple(results))
    name, model = failures[0]
    return Verdict(status="invalid", failed_query=name, witness=model,
                   queries=tuple(results))


def recheck_invalid(aig: Aig, safety_index: int, cert: Certificate,
                    verdict: Verdict) -> bool:
    """Independently confirm an Invalid witness by clause evaluation."""
    if verdict.status != "invalid" or verdict.witness is None:
        return False
    model = verdict.witness

    def sat_clause(cl):
        return any(model.get(abs(l)) == (l > 0) for l in cl)

    def falsified(cl):
        return all(model.get(abs(l)) == (l < 0) for l in cl)

    bound = bind(cert, aig, check_digest=False)
    ts = encode(aig, safety_index)
    if verdict.failed_query == "initiation":
        return all(sat_clause(c) for c in ts.init) and \
            any(falsified(c) for c in bound.clauses)
    if verdict.failed_query == "consecution":
        primed = [prime(c, ts.varmap) for c in bound.clauses]
        return all(sat_clause(c) for c in bound.clauses) and \
            all(sat_clause(c) for c in ts.trans) and \
            any(falsified(c) for c in primed)
    if verdict.failed_query == "strengthening":
        bad_ok = ts.bad_const if ts.bad_lit is None \
            else model.get(abs(ts.bad_lit)) == (ts.bad_lit > 0)
        return all(sat_clause(c) for c in bound.clauses) and \
            all(sat_clause(c) for c in ts.prop_defs) and bad_ok
    return False


# --- Exhaustive reachability oracle ----------------------------------------------


@dataclass(frozen=True)
class ReachResult:
    safe: bool
    witness: Witness | None = None
    num_states: int = 0


def _replicate(pattern: int, width_bits: int, copies: int) -> int:
    """``copies`` contiguous copies of a ``width_bits``-wide bit pattern."""
    result = 0
    chunk = pattern
    size = 1
    placed = 0
    n = copies
    while n:
        if n & 1:
            result |= chunk << (placed * width_bits)
            placed += size
        n >>= 1
        if n:
            chunk |= chunk << (size * width_bits)
            size *= 2
    return result


def _bits_to_int(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def _int_to_bits(value: int, nbits: int) -> np.ndarray:
    raw = value.to_bytes((nbits + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:nbits]


def reach_bruteforce(aig: Aig, safety_index: int = 0,
                     state_bit_limit: int = 16) -> ReachResult:
    """Exact BFS over the reachable state graph, all inputs per step.

    Evaluates a whole frontier level bit-parallel: every (state, input
    vector) pair of the level occupies one bit position of a big-integer
    value per wire. Shortest counterexamples come out first.
    """
    n_latch = len(aig.latches)
    if n_latch > state_bit_limit:
        raise TooManyStateBits(
            f"{n_latch} latches exceed the state bit limit {state_bit_limit}")
    _, bad_lit = resolve_safety(aig, safety_index)
    n_in = len(aig.inputs)
    combos = 1 << n_in
    order = gate_topo_order(aig)

    input_patterns = []
    for i in range(n_in):
        ones_run = (1 << (1 << i)) - 1
        pattern = _replicate(ones_run << (1 << i), 1 << (i + 1), combos >> (i + 1))
        input_patterns.append(pattern)

    # last position using each variable, for value freeing during evaluation
    last_use: dict[int, int] = {}
    for pos, g in enumerate(order):
        for r in (g.rhs0, g.rhs1):
            if not lit_is_const(r):
                last_use[lit_var(r)] = pos
    tail = len(order)
    for latch in aig.latches:
        if not lit_is_const(latch.next):
            last_use[lit_var(latch.next)] = tail
    if not lit_is_const(bad_lit):
        last_use[lit_var(bad_lit)] = tail

    init_state = 0
    for i, latch in enumerate(aig.latches):
        init_state |= latch.reset << i

    def input_vector(combo):
        return tuple((combo >> i) & 1 for i in range(n_in))

    parents: dict[int, tuple[int, int] | None] = {init_state: None}
    frontier = [init_state]
    max_chunk = max(1, (1 << 21) // combos)
    use_uint64 = n_latch <= 63

    def build_trace(state, combo):
        path = []
        cur = state
        while parents[cur] is not None:
            prev, via = parents[cur]
            path.append(via)
            cur = prev
        path.reverse()
        path.append(combo)
        inputs = tuple(input_vector(c) for c in path)
        return Witness(tuple((init_state >> i) & 1 for i in range(n_latch)),
                       inputs, safety_index)

    while frontier:
        next_frontier: list[int] = []
        for base in range(0, len(frontier), max_chunk):
            chunk = frontier[base:base + max_chunk]
            n = len(chunk)
            total = n * combos
            ones = (1 << total) - 1
            values: dict[int, int] = {}
            for i, lit in enumerate(aig.inputs):
                values[lit_var(lit)] = _replicate(input_patterns[i], combos, n)
            if n_latch:
                if use_uint64:
                    states_np = np.array(chunk, dtype=np.uint64)
                for i, latch in enumerate(aig.latches):
                    if use_uint64:
                        bits = ((states_np >> np.uint64(i)) & np.uint64(1)).astype(np.uint8)
                    else:
                        bits = np.fromiter(((s >> i) & 1 for s in chunk),
                                           dtype=np.uint8, count=n)
                    values[lit_var(latch.current)] = _bits_to_int(
                        np.repeat(bits, combos))

            def value_of(lit):
                if lit_is_const(lit):
                    return ones if lit else 0
                v = values[lit_var(lit)]
                return v ^ ones if lit & 1 else v

            for pos, g in enumerate(order):
                values[lit_var(g.lhs)] = value_of(g.rhs0) & value_of(g.rhs1)
                for r in (g.rhs0, g.rhs1):
                    rv = 0 if lit_is_const(r) else lit_var(r)
                    if rv and last_use.get(rv) == pos:
                        values.pop(rv, None)

            bad_mask = value_of(bad_lit)
            if bad_mask:
                m = (bad_mask & -bad_mask).bit_length() - 1
                return ReachResult(False, build_trace(chunk[m // combos], m % combos),
                                   len(parents))

            if n_latch == 0:
                continue  # stateless circuit: single state, nothing to expand
            if use_uint64:
                succ = np.zeros(total, dtype=np.uint64)
                for i, latch in enumerate(aig.latches):
                    bits = _int_to_bits(value_of(latch.next), total)
                    succ |= bits.astype(np.uint64) << np.uint64(i)
                uniq, first = np.unique(succ, return_index=True)
                for state, idx in zip(uniq.tolist(), first.tolist()):
                    if state not in parents:
                        parents[state] = (chunk[idx // combos], idx % combos)
                        next_frontier.append(state)
            else:
                cols = [_int_to_bits(value_of(l.next), total) for l in aig.latches]
                matrix = np.stack(cols, axis=1)
                packed = np.packbits(matrix, axis=1, bitorder="little")
                for row_idx in range(total):
                    state = int.from_bytes(packed[row_idx].tobytes(), "little")
                    if state not in parents:
                        parents[state] = (chunk[row_idx // combos], row_idx % combos)
                        next_frontier.append(state)
        frontier = next_frontier
        if n_latch == 0:
            break
    return ReachResult(True, None, len(parents))
