"""Independent brute-force oracles used only by the test suite.

These deliberately avoid the package's solver, encoder, and reachability
code paths so cross-checks stay meaningful.
"""

from itertools import product

from pchkit.aiger import lit_is_const, lit_is_negated, lit_var


def enum_models(nvars, clauses):
    """Yield every total assignment (dict var->bool) satisfying the clauses."""
    for bits in product([False, True], repeat=nvars):
        model = {v + 1: bits[v] for v in range(nvars)}
        if all(any(model[abs(l)] == (l > 0) for l in cl) for cl in clauses):
            yield model


def enum_sat(nvars, clauses):
    """First satisfying assignment or None."""
    return next(enum_models(nvars, clauses), None)


def eval_step(aig, state, inputs):
    """Evaluate one step by direct gate interpretation.

    ``state`` maps latch variable -> bit. Returns (outputs, bads, next_state).
    Gates are evaluated by fixpoint iteration so no topological sort of the
    production code is reused.
    """
    values = dict(state)
    for lit, bit in zip(aig.inputs, inputs):
        values[lit_var(lit)] = bit & 1

    def ev(lit):
        if lit_is_const(lit):
            return lit
        v = values.get(lit_var(lit))
        if v is None:
            return None
        return v ^ (lit & 1)

    remaining = list(aig.ands)
    while remaining:
        progressed = False
        left = []
        for g in remaining:
            a, b = ev(g.rhs0), ev(g.rhs1)
            if a is None or b is None:
                left.append(g)
            else:
                values[lit_var(g.lhs)] = a & b
                progressed = True
        assert progressed, "cyclic circuit in oracle"
        remaining = left
    outs = tuple(ev(l) for l in aig.outputs)
    bads = tuple(ev(l) for l in aig.bads)
    nxt = {lit_var(l.current): ev(l.next) for l in aig.latches}
    return outs, bads, nxt


def naive_reach(aig, safety_index=0, max_states=200_000):
    """Plain BFS reachability via the step interpreter.

    Returns ("unsafe", witness_inputs) with the input vectors of a shortest
    bad run, or ("safe", None).
    """
    use_bads = bool(aig.bads)
    n_in = len(aig.inputs)
    init = {lit_var(l.current): l.reset for l in aig.latches}

    def key(state):
        return tuple(sorted(state.items()))

    seen = {key(init): None}
    frontier = [(init, [])]
    while frontier:
        nxt_frontier = []
        for state, path in frontier:
            for combo in product([0, 1], repeat=n_in):
                outs, bads, nxt = eval_step(aig, state, combo)
                fired = (bads if use_bads else outs)[safety_index]
                if fired:
                    return "unsafe", path + [combo]
                k = key(nxt)
                if k not in seen:
                    seen[k] = True
                    assert len(seen) <= max_states, "oracle state budget exceeded"
                    nxt_frontier.append((nxt, path + [combo]))
        frontier = nxt_frontier
    return "safe", None
