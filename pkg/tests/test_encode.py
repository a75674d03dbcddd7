from itertools import product

import pytest
from hypothesis import given

from pchkit.aiger import lit_var, parse_ascii, simulate
from pchkit.encode import (
    build_varmap,
    encode,
    evaluate_clauses,
    negate_tseitin,
    prime,
    primed_property,
)
from pchkit.errors import NonStateVariable, NoSuchSafetyBit
from pchkit.sat import SatSolver

from .conftest import small_aigs
from ._oracles import enum_models, enum_sat, eval_step

CONST_ZERO = "aag 1 0 1 1 0\n2 2\n2\n"
AND2 = "aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n"


def test_encode_constant_zero_latch():
    ts = encode(parse_ascii(CONST_ZERO), 0)
    x = ts.varmap.current_vars[0]
    xn = ts.varmap.next_vars[0]
    assert ts.init == ((-x,),)
    assert set(ts.trans) == {(-xn, x), (xn, -x)}
    assert ts.prop_defs == ()
    assert ts.bad_lit == x and ts.prop_lit == -x
    # two-state truth table: I and bad is unsat; T admits exactly 0->0, 1->1
    assert enum_sat(ts.num_vars, list(ts.init) + [[ts.bad_lit]]) is None
    transitions = {(m[x], m[xn]) for m in enum_models(ts.num_vars, list(ts.trans))}
    assert transitions == {(False, False), (True, True)}


def test_encode_constant_false_bad():
    ts = encode(parse_ascii("aag 0 0 0 0 0 1\n0\n"), 0)
    assert ts.init == () and ts.trans == () and ts.prop_defs == ()
    assert ts.bad_lit is None and ts.bad_const is False
    assert ts.prop_lit is None


def test_encode_and_gate_prop_defs():
    ts = encode(parse_ascii(AND2), 0)
    assert len(ts.prop_defs) == 3  # exactly the Tseitin clauses of one gate
    assert set(ts.prop_defs) <= set(ts.trans)


def test_encode_no_such_safety_bit():
    with pytest.raises(NoSuchSafetyBit):
        encode(parse_ascii(AND2), 5)


def test_prime_examples():
    ts = encode(parse_ascii("aag 2 0 2 1 0\n2 4\n4 2\n2\n"), 0)
    x0, x1 = ts.varmap.current_vars
    y0, y1 = ts.varmap.next_vars
    assert prime((-x0, x1), ts.varmap) == (-y0, y1)
    assert prime((), ts.varmap) == ()


def test_prime_rejects_non_state_variable():
    ts = encode(parse_ascii("aag 2 1 1 1 0\n2\n4 2\n4\n"), 0)
    with pytest.raises(NonStateVariable):
        prime((ts.varmap.input_vars[0],), ts.varmap)


def test_negate_tseitin_single_literal():
    # f = {(x)} with x = var 1: clauses {(-t, -x), (t)}
    neg = negate_tseitin([(1,)], first_free=2)
    t = neg.selectors[0]
    assert set(neg.clauses) == {(-t, -1), (t,)}
    # satisfiable exactly when x is false
    assert enum_sat(neg.next_var - 1, list(neg.clauses) + [[-1]]) is not None
    assert enum_sat(neg.next_var - 1, list(neg.clauses) + [[1]]) is None


def test_negate_tseitin_contradiction_is_tautology():
    neg = negate_tseitin([(1,), (-1,)], first_free=2)
    for context in ([[1]], [[-1]]):
        assert enum_sat(neg.next_var - 1, list(neg.clauses) + context) is not None


def test_negate_tseitin_with_context():
    # f = {(x or y), (not x or y)} under context {(y)}: not f forces not y
    neg = negate_tseitin([(1, 2), (-1, 2)], first_free=3)
    assert enum_sat(neg.next_var - 1, list(neg.clauses) + [[2]]) is None
    assert enum_sat(neg.next_var - 1, list(neg.clauses)) is not None


@given(small_aigs(max_inputs=2, max_latches=2, max_gates=4, with_bads=True))
def test_encode_deterministic(a):
    if not a.bads and not a.outputs:
        return
    assert encode(a, 0) == encode(a, 0)


def _propagate_units(clauses, fixed):
    """Unit propagation closure; test-local, independent of the solver."""
    assign = dict(fixed)
    changed = True
    while changed:
        changed = False
        for cl in clauses:
            unknown = []
            satisfied = False
            for lit in cl:
                val = assign.get(abs(lit))
                if val is None:
                    unknown.append(lit)
                elif val == (lit > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if len(unknown) == 1:
                lit = unknown[0]
                assign[abs(lit)] = lit > 0
                changed = True
            elif not unknown:
                raise AssertionError("conflict during unit propagation")
    return assign


@given(small_aigs(max_inputs=2, max_latches=2, max_gates=4))
def test_functional_consistency(a):
    """Unit propagation on T fixes gates and next-state to simulated values."""
    if not a.bads and not a.outputs:
        a = a.__class__(**{**a.__dict__, "outputs": (0,)})
    ts = encode(a, 0)
    vm = ts.varmap
    n_in, n_latch = len(vm.input_vars), len(vm.current_vars)
    for bits in product([0, 1], repeat=n_in + n_latch):
        ins, state_bits = bits[:n_in], bits[n_in:]
        fixed = {vm.input_vars[k]: bool(ins[k]) for k in range(n_in)}
        fixed.update({vm.current_vars[k]: bool(state_bits[k]) for k in range(n_latch)})
        assign = _propagate_units(list(ts.trans), fixed)
        state = {lit_var(l.current): state_bits[k] for k, l in enumerate(a.latches)}
        _, _, nxt = eval_step(a, state, ins)
        for k, latch in enumerate(a.latches):
            assert assign[vm.next_vars[k]] == bool(nxt[lit_var(latch.current)])
        for gvar, svar in vm.gate_vars.items():
            assert svar in assign  # every gate is fixed


@given(small_aigs(max_inputs=2, max_latches=2, max_gates=4))
def test_property_matches_simulation(a):
    """A state satisfies the property under all inputs iff no input drives
    the bad bit in simulation from that state."""
    if not a.bads and not a.outputs:
        return
    ts = encode(a, 0)
    vm = ts.varmap
    n_in, n_latch = len(vm.input_vars), len(vm.current_vars)
    for state_bits in product([0, 1], repeat=n_latch):
        sim_bad = False
        for ins in product([0, 1], repeat=n_in):
            state = {lit_var(l.current): state_bits[k] for k, l in enumerate(a.latches)}
            outs, bads, _ = eval_step(a, state, ins)
            fired = (bads if a.bads else outs)[0]
            if fired:
                sim_bad = True
        if ts.bad_lit is None:
            cnf_bad = ts.bad_const
        else:
            fixed = [[vm.current_vars[k]] if state_bits[k] else [-vm.current_vars[k]]
                     for k in range(n_latch)]
            cnf_bad = enum_sat(ts.num_vars,
                               list(ts.prop_defs) + fixed + [[ts.bad_lit]]) is not None
        assert cnf_bad == sim_bad


def test_varmap_injective():
    ts = encode(parse_ascii("aag 4 1 2 1 1\n2\n4 8\n6 4\n6\n8 4 6\n"), 0)
    vm = ts.varmap
    all_vars = list(vm.input_vars) + list(vm.current_vars) + \
        list(vm.gate_vars.values()) + list(vm.next_vars)
    assert len(all_vars) == len(set(all_vars)) == vm.num_vars


def test_primed_property_fresh_variables():
    ts = encode(parse_ascii(AND2), 0)
    pp = primed_property(ts, ts.num_vars + 1)
    assert len(pp.clauses) == len(ts.prop_defs)
    assert pp.next_var > ts.num_vars + 1  # inputs and the gate got fresh copies
    assert pp.bad_lit is not None and abs(pp.bad_lit) > ts.num_vars
    used = {abs(l) for cl in pp.clauses for l in cl}
    assert used <= set(pp.rename.values())


def test_evaluate_clauses():
    model = {1: True, 2: False}
    assert evaluate_clauses([(1, 2), (-2,)], model)
    assert not evaluate_clauses([(2,)], model)
