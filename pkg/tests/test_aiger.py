import pytest
from hypothesis import given

from pchkit import aiger
from pchkit.aiger import (
    Aig,
    AigBuilder,
    AndGate,
    Latch,
    Witness,
    circuit_digest,
    lit_neg,
    make_aig,
    parse_ascii,
    parse_binary,
    serialize_ascii,
    serialize_binary,
    simulate,
)
from pchkit.errors import (
    CountMismatch,
    DuplicateDefinition,
    InputArityMismatch,
    MalformedHeader,
    NonMonotoneAndIndex,
    TruncatedDeltaStream,
    UndefinedReset,
    UndefinedVariableReference,
)

from .conftest import small_aigs
from ._oracles import eval_step

TOGGLE = "aag 1 0 1 1 0\n2 3\n2\n"
AND2 = "aag 3 2 0 1 1\n2\n4\n6\n6 2 4\n"


def test_lit_helpers_involutive():
    for lit in range(0, 40):
        assert lit_neg(lit_neg(lit)) == lit


def test_parse_empty_circuit():
    a = parse_ascii("aag 0 0 0 0 0\n")
    assert a.max_var == 0
    assert a.inputs == () and a.latches == () and a.ands == ()


def test_parse_and_example():
    a = parse_ascii(AND2)
    assert a.inputs == (2, 4)
    assert a.outputs == (6,)
    assert a.ands == (AndGate(6, 4, 2),)  # operands normalized rhs0 >= rhs1
    assert simulate(a, [(1, 1)]).outputs == ((1,),)
    assert simulate(a, [(1, 0)]).outputs == ((0,),)


def test_parse_toggle_and_simulate_four_steps():
    # next state is the latch's own negation: the output alternates from 0
    a = parse_ascii(TOGGLE)
    assert a.latches == (Latch(2, 3, 0),)
    trace = simulate(a, [()] * 4)
    assert [o[0] for o in trace.outputs] == [0, 1, 0, 1]


def test_parse_errors():
    with pytest.raises(MalformedHeader):
        parse_ascii("aig 0 0 0 0 0\n")
    with pytest.raises(MalformedHeader):
        parse_ascii("aag 1 0 0 0 0\n")  # M != I+L+A
    with pytest.raises(MalformedHeader):
        parse_ascii("aag 0 0 0 0 0 0 0\n")  # constraint section unsupported
    with pytest.raises(CountMismatch):
        parse_ascii("aag 2 2 0 0 0\n2\n")  # missing one input line
    with pytest.raises(DuplicateDefinition):
        parse_ascii("aag 2 2 0 0 0\n2\n2\n")
    with pytest.raises(UndefinedVariableReference):
        parse_ascii("aag 1 1 0 1 0\n2\n4\n")
    with pytest.raises(UndefinedReset):
        parse_ascii("aag 1 0 1 0 0\n2 3 2\n")  # uninitialized reset
    with pytest.raises(CountMismatch):
        parse_ascii("aag 0 0 0 0 0\njunk\n")


def test_combinational_cycle_rejected():
    with pytest.raises(UndefinedVariableReference):
        make_aig(2, [], [], [], [], [AndGate(2, 4, 4), AndGate(4, 2, 2)])


def test_serialize_empty_and_toggle():
    assert serialize_ascii(parse_ascii("aag 0 0 0 0 0\n")) == b"aag 0 0 0 0 0\n"
    assert serialize_ascii(parse_ascii(TOGGLE)) == TOGGLE.encode()


def test_comments_and_symbols_preserved():
    text = AND2 + "i0 foo\no0 result\nc\nhello\nworld\n"
    a = parse_ascii(text)
    assert a.symbols == ("i0 foo", "o0 result")
    assert a.comments == ("hello", "world")
    assert parse_ascii(serialize_ascii(a)) == a


@given(small_aigs())
def test_ascii_round_trip(a):
    assert parse_ascii(serialize_ascii(a)) == a


@given(small_aigs())
def test_binary_round_trip(a):
    b = parse_binary(serialize_binary(a))
    # generated circuits are canonical, so the round trip is the identity
    assert b == a


def test_binary_and_example_matches_ascii():
    a = parse_ascii(AND2)
    assert parse_binary(serialize_binary(a)) == a


def test_binary_truncation():
    data = serialize_binary(parse_ascii(AND2))
    with pytest.raises(TruncatedDeltaStream):
        parse_binary(data[:-1])


def test_binary_nonmonotone():
    # gate 6 with delta0 = 0 claims rhs0 == lhs
    data = b"aig 3 2 0 1 1\n6\n" + bytes([0, 0])
    with pytest.raises(NonMonotoneAndIndex):
        parse_binary(data)


@given(small_aigs(max_inputs=2, max_latches=2, max_gates=4))
def test_binary_ascii_simulation_agreement(a):
    from_ascii = parse_ascii(serialize_ascii(a))
    from_bin = parse_binary(serialize_binary(a))
    seq = [tuple((s + k) % 2 for k in range(len(a.inputs))) for s in range(4)]
    assert simulate(from_ascii, seq) == simulate(from_bin, seq)


@given(small_aigs(max_inputs=2, max_latches=2, max_gates=4))
def test_simulate_matches_interpreter_oracle(a):
    seq = [tuple((s * 3 + k) % 2 for k in range(len(a.inputs))) for s in range(3)]
    trace = simulate(a, seq)
    state = {aiger.lit_var(l.current): l.reset for l in a.latches}
    for step, vec in enumerate(seq):
        outs, bads, state = eval_step(a, state, vec)
        assert trace.outputs[step] == outs
        assert trace.bads[step] == bads


def test_simulate_determinism_and_arity():
    a = parse_ascii(AND2)
    seq = [(1, 0), (0, 1), (1, 1)]
    assert simulate(a, seq) == simulate(a, seq)
    with pytest.raises(InputArityMismatch):
        simulate(a, [(1,)])


def test_mod4_counter_bad_at_three():
    # two-bit counter, bad at state 3: trace 0,0,0 then 1 at step 3
    from pchkit.circuits import gen_counter

    a = gen_counter(2, 3)
    trace = simulate(a, [()] * 4)
    assert [b[0] for b in trace.bads] == [0, 0, 0, 1]


def test_builder_basics():
    b = AigBuilder()
    x = b.input()
    y = b.input()
    g = b.and_(x, y)
    assert b.and_(y, x) == g  # structural hashing
    assert b.and_(x, 0) == 0 and b.and_(x, 1) == x
    assert b.and_(x, lit_neg(x)) == 0
    b.output(g)
    a = b.build()
    assert a.num_ands == 1 and a.outputs == (g,)


def test_witness_text_and_length():
    w = Witness(init=(0, 1), inputs=((1,), (0,)))
    assert w.to_text() == "1\nb0\n01\n1\n0\n.\n"
    assert w.length == 1


def test_digest_ignores_metadata():
    a = parse_ascii(AND2)
    b = parse_ascii(AND2 + "c\nnote\n")
    assert circuit_digest(a) == circuit_digest(b)
    c = parse_ascii("aag 3 2 0 1 1\n2\n4\n7\n6 2 4\n")
    assert circuit_digest(a) != circuit_digest(c)
