import hypothesis
from hypothesis import strategies as st

from pchkit.aiger import Aig, AndGate, Latch, lit_is_const, lit_var, make_aig

hypothesis.settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
hypothesis.settings.load_profile("default")


@st.composite
def small_aigs(draw, max_inputs=3, max_latches=3, max_gates=6,
               min_inputs=0, min_latches=0, n_outputs=None, with_bads=True):
    """Random canonical circuits: inputs, then latches, then gates in order."""
    n_in = draw(st.integers(min_inputs, max_inputs))
    n_latch = draw(st.integers(min_latches, max_latches))
    n_gate = draw(st.integers(0, max_gates))

    inputs = [2 * (k + 1) for k in range(n_in)]
    latch_curs = [2 * (n_in + k + 1) for k in range(n_latch)]
    pool = [0, 1] + inputs + latch_curs
    ands = []
    for k in range(n_gate):
        lhs = 2 * (n_in + n_latch + k + 1)
        r0 = draw(st.sampled_from(pool))
        r1 = draw(st.sampled_from(pool))
        neg0, neg1 = draw(st.booleans()), draw(st.booleans())
        ands.append(AndGate(lhs, r0 ^ neg0, r1 ^ neg1))
        pool.append(lhs)

    latches = []
    for cur in latch_curs:
        nxt = draw(st.sampled_from(pool)) ^ draw(st.booleans())
        reset = draw(st.integers(0, 1))
        latches.append(Latch(cur, nxt, reset))

    n_out = draw(st.integers(0, 2)) if n_outputs is None else n_outputs
    outputs = [draw(st.sampled_from(pool)) ^ draw(st.booleans()) for _ in range(n_out)]
    bads = []
    if with_bads and draw(st.booleans()):
        bads = [draw(st.sampled_from(pool)) ^ draw(st.booleans())]
    return make_aig(n_in + n_latch + n_gate, inputs, latches, outputs, bads, ands)


@st.composite
def cnf_formulas(draw, max_vars=8, max_clauses=12, max_len=4):
    n = draw(st.integers(1, max_vars))
    n_cl = draw(st.integers(0, max_clauses))
    clauses = []
    for _ in range(n_cl):
        length = draw(st.integers(1, max_len))
        cl = []
        for _ in range(length):
            v = draw(st.integers(1, n))
            cl.append(-v if draw(st.booleans()) else v)
        clauses.append(cl)
    return n, clauses
