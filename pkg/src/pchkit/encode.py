"""CNF encoding of a circuit plus a selected safety bit.

Produces the initial-state formula I (unit clauses over current-state latch
variables), the transition relation T (Tseitin clauses for every AND gate
plus next-state equalities), and the property: the bad bit's defining
clauses restricted to its combinational cone, with the bad literal itself.

Solver variable numbering is canonical: inputs first, then current-state
latches, then gates, then next-state latches, each in circuit order.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import aiger
from .aiger import Aig, lit_is_const, lit_is_negated, lit_var
from .errors import NonStateVariable, NoSuchSafetyBit, UndefinedReset

Clause = tuple[int, ...]
Cnf = tuple[Clause, ...]


def resolve_safety(aig_: Aig, safety_index: int) -> tuple[str, int]:
    """Resolve a safety index to ("bad"|"output", literal).

    Bad bits take precedence; without a B section, outputs are the safety
    bits (pre-1.9 convention).
    """
    if aig_.bads:
        if 0 <= safety_index < len(aig_.bads):
            return "bad", aig_.bads[safety_index]
        raise NoSuchSafetyBit(
            f"safety index {safety_index} out of range for {len(aig_.bads)} bad bits")
    if 0 <= safety_index < len(aig_.outputs):
        return "output", aig_.outputs[safety_index]
    raise NoSuchSafetyBit(
        f"safety index {safety_index} out of range for {len(aig_.outputs)} outputs")


@dataclass(frozen=True)
class VarMap:
    """Bijection between circuit structures and solver variables."""

    input_vars: tuple[int, ...]
    current_vars: tuple[int, ...]
    gate_vars: dict[int, int]         # AIGER gate variable -> solver variable
    next_vars: tuple[int, ...]
    aiger_var_to_solver: dict[int, int]
    latch_index_of_var: dict[int, int]  # AIGER latch variable -> latch index
    latch_aiger_lits: tuple[int, ...]   # current-state AIGER literal per latch
    num_vars: int

    def solver_lit(self, aiger_lit: int) -> int:
        """Signed solver literal for a non-constant AIGER literal."""
        var = self.aiger_var_to_solver[lit_var(aiger_lit)]
        return -var if lit_is_negated(aiger_lit) else var

    @property
    def current_to_next(self) -> dict[int, int]:
        return dict(zip(self.current_vars, self.next_vars))


def build_varmap(aig_: Aig) -> VarMap:
    nxt = 1
    input_vars = []
    a2s: dict[int, int] = {}
    for lit in aig_.inputs:
        a2s[lit_var(lit)] = nxt
        input_vars.append(nxt)
        nxt += 1
    current_vars = []
    latch_index: dict[int, int] = {}
    for idx, latch in enumerate(aig_.latches):
        a2s[lit_var(latch.current)] = nxt
        latch_index[lit_var(latch.current)] = idx
        current_vars.append(nxt)
        nxt += 1
    gate_vars: dict[int, int] = {}
    for gate in aig_.ands:
        a2s[lit_var(gate.lhs)] = nxt
        gate_vars[lit_var(gate.lhs)] = nxt
        nxt += 1
    next_vars = []
    for _ in aig_.latches:
        next_vars.append(nxt)
        nxt += 1
    return VarMap(tuple(input_vars), tuple(current_vars), gate_vars,
                  tuple(next_vars), a2s, latch_index,
                  tuple(l.current for l in aig_.latches), nxt - 1)


@dataclass(frozen=True)
class TransitionSystem:
    """CNF view of a circuit: I, T, and the safety bit's definition.

    ``bad_lit`` is the signed solver literal asserting the bad bit, or None
    when the bad bit is the constant given by ``bad_const``. The property P
    is the negation of the bad bit.
    """

    varmap: VarMap
    init: Cnf
    trans: Cnf
    prop_defs: Cnf
    bad_lit: int | None
    bad_const: bool
    num_vars: int
    safety_index: int = 0
    reset_values: tuple[int, ...] = ()

    @property
    def prop_lit(self) -> int | None:
        return None if self.bad_lit is None else -self.bad_lit


def _gate_clauses(gate, varmap: VarMap) -> list[Clause]:
    """Tseitin clauses for one AND gate, with constant operands simplified."""
    g = varmap.gate_vars[lit_var(gate.lhs)]
    r0, r1 = gate.rhs0, gate.rhs1  # normalized: constants sort to rhs1
    if lit_is_const(r0):  # both constant
        value = (r0 == 1) and (r1 == 1)
        return [(g,)] if value else [(-g,)]
    a = varmap.solver_lit(r0)
    if lit_is_const(r1):
        if r1 == 0:
            return [(-g,)]
        return [(-g, a), (g, -a)]
    b = varmap.solver_lit(r1)
    return [(-g, a), (-g, b), (g, -a, -b)]


def _cone_gate_vars(aig_: Aig, root_lit: int) -> set[int]:
    """AIGER gate variables in the combinational cone of a literal."""
    by_var = {lit_var(g.lhs): g for g in aig_.ands}
    cone: set[int] = set()
    stack = [lit_var(root_lit)] if not lit_is_const(root_lit) else []
    while stack:
        var = stack.pop()
        gate = by_var.get(var)
        if gate is None or var in cone:
            continue
        cone.add(var)
        for operand in (gate.rhs0, gate.rhs1):
            if not lit_is_const(operand):
                stack.append(lit_var(operand))
    return cone


def encode(aig_: Aig, safety_index: int = 0) -> TransitionSystem:
    """Encode a circuit and one safety bit as (I, T, property)."""
    _, bad_aiger = resolve_safety(aig_, safety_index)
    varmap = build_varmap(aig_)

    init = []
    for idx, latch in enumerate(aig_.latches):
        if latch.reset not in (0, 1):
            raise UndefinedReset(f"latch {latch.current} has reset {latch.reset}")
        var = varmap.current_vars[idx]
        init.append((var,) if latch.reset else (-var,))

    trans: list[Clause] = []
    for gate in aiger.gate_topo_order(aig_):
        trans.extend(_gate_clauses(gate, varmap))
    for idx, latch in enumerate(aig_.latches):
        nvar = varmap.next_vars[idx]
        if lit_is_const(latch.next):
            trans.append((nvar,) if latch.next == 1 else (-nvar,))
        else:
            s = varmap.solver_lit(latch.next)
            trans.append((-nvar, s))
            trans.append((nvar, -s))

    prop_defs: list[Clause] = []
    cone = _cone_gate_vars(aig_, bad_aiger)
    for gate in aiger.gate_topo_order(aig_):
        if lit_var(gate.lhs) in cone:
            prop_defs.extend(_gate_clauses(gate, varmap))

    if lit_is_const(bad_aiger):
        bad_lit, bad_const = None, bad_aiger == 1
    else:
        bad_lit, bad_const = varmap.solver_lit(bad_aiger), False
    return TransitionSystem(varmap, tuple(init), tuple(trans), tuple(prop_defs),
                            bad_lit, bad_const, varmap.num_vars, safety_index,
                            tuple(l.reset for l in aig_.latches))


def prime(clause, varmap: VarMap) -> Clause:
    """Map a clause over current-state variables to next-state variables."""
    mapping = varmap.current_to_next
    out = []
    for lit in clause:
        nvar = mapping.get(abs(lit))
        if nvar is None:
            raise NonStateVariable(f"literal {lit} is not a current-state latch variable")
        out.append(-nvar if lit < 0 else nvar)
    return tuple(out)


@dataclass(frozen=True)
class PrimedProperty:
    clauses: Cnf
    bad_lit: int | None
    next_var: int
    rename: dict[int, int]


def primed_property(ts: TransitionSystem, first_free: int) -> PrimedProperty:
    """The property definition over next-state variables.

    Latch variables map current -> next; input and gate variables get fresh
    copies starting at ``first_free``. The rename map covers every variable
    the renamed clauses mention.
    """
    rename: dict[int, int] = dict(ts.varmap.current_to_next)
    nxt = first_free

    def mapped(lit: int) -> int:
        nonlocal nxt
        var = abs(lit)
        new = rename.get(var)
        if new is None:
            new = nxt
            rename[var] = new
            nxt += 1
        return -new if lit < 0 else new

    clauses = tuple(tuple(mapped(l) for l in cl) for cl in ts.prop_defs)
    bad = None if ts.bad_lit is None else mapped(ts.bad_lit)
    return PrimedProperty(clauses, bad, nxt, rename)


@dataclass(frozen=True)
class NegatedCnf:
    """Selector-based encoding of the negation of a CNF formula.

    Each selector t_i implies its source clause is falsified; the final
    clause requires at least one selector, so the whole set is satisfiable
    with a context G exactly when G and the negated formula are.
    """

    clauses: Cnf
    selectors: tuple[int, ...]
    next_var: int


def negate_tseitin(formula, first_free: int) -> NegatedCnf:
    """Encode the negation of a nonempty CNF with fresh selector variables."""
    formula = tuple(tuple(cl) for cl in formula)
    if not formula:
        raise ValueError("negate_tseitin requires a nonempty formula")
    selectors = []
    clauses: list[Clause] = []
    nxt = first_free
    for cl in formula:
        t = nxt
        nxt += 1
        selectors.append(t)
        for lit in cl:
            clauses.append((-t, -lit))
    clauses.append(tuple(selectors))
    return NegatedCnf(tuple(clauses), tuple(selectors), nxt)


def evaluate_clauses(clauses, model: dict[int, bool]) -> bool:
    """True iff every clause has a literal satisfied by the model."""
    for cl in clauses:
        for lit in cl:
            val = model.get(abs(lit))
            if val is None:
                continue
            if val == (lit > 0):
                break
        else:
            return False
    return True
