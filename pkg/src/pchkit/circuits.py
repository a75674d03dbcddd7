"""Benchmark circuit generators and tamper mutators.

The multiplier pair gives two functionally equivalent but structurally
distinct sequential shift-add multipliers for equivalence miters; counters
give parameterized safe/unsafe reachability instances; the mutators produce
seeded, format-preserving tampered artifacts for the threat-model suite.
"""

from __future__ import annotations

import random

from .aiger import (
    Aig,
    AigBuilder,
    AndGate,
    Latch,
    gate_topo_order,
    lit_neg,
    lit_var,
    make_aig,
    var_lit,
)
from .certificate import Certificate
from .errors import BadValueOutOfRange, EmptyCertificate, NoGates


def gen_counter(width: int, bad_value: int | None = None) -> Aig:
    """Width-bit binary up-counter from 0, wrapping at 2**width.

    Outputs are the state bits (so counters can be fed to miters). The bad
    bit fires exactly in state ``bad_value``; without one it is constant
    FALSE and the instance is trivially safe.
    """
    if width < 1:
        raise ValueError("counter width must be >= 1")
    if bad_value is not None and not 0 <= bad_value < (1 << width):
        raise BadValueOutOfRange(f"bad value {bad_value} does not fit in {width} bits")
    b = AigBuilder()
    bits = [b.latch() for _ in range(width)]
    carry = 1
    for j in range(width):
        b.set_next(bits[j], b.xor_(bits[j], carry))
        carry = b.and_(bits[j], carry)
    for bit in bits:
        b.output(bit)
    if bad_value is None:
        b.bad(0)
    else:
        hit = 1
        for j in range(width):
            want = bits[j] if (bad_value >> j) & 1 else lit_neg(bits[j])
            hit = b.and_(hit, want)
        b.bad(hit)
    return b.build()


def _shift_add_multiplier(width: int, doubled_accumulator: bool) -> Aig:
    """One sequential shift-add multiplier, width x width -> 2*width bits.

    Operands load at step 0 (merged with the first add), each following step
    adds the left-shifted multiplicand when the current multiplier bit is
    set, and the done flag rises after ``width`` steps with the product held
    on the outputs. Every product output is gated by the done flag.

    With ``doubled_accumulator`` the partial-sum register stores twice the
    running sum: the adder reads the register through a right-shift tap and
    the sum is written back one position up. The observable behavior is
    identical; the latch structure is not (one extra accumulator bit and a
    shifted store path).
    """
    b = AigBuilder()
    a_in = [b.input() for _ in range(width)]
    b_in = [b.input() for _ in range(width)]
    acc = [b.latch() for _ in range(2 * width + (1 if doubled_accumulator else 0))]
    mcand = [b.latch() for _ in range(2 * width)]
    mult = [b.latch() for _ in range(width)]
    timer = [b.latch(reset=1 if k == 0 else 0) for k in range(width)]
    done = b.latch()

    t0 = timer[0]
    busy = b.or_tree(timer)
    tap = acc[1:] if doubled_accumulator else acc

    sel = b.mux(t0, b_in[0], mult[0])
    carry = 0
    total = []
    for j in range(2 * width):
        row = b.mux(t0, a_in[j], mcand[j]) if j < width else b.and_(lit_neg(t0), mcand[j])
        add = b.and_(sel, row)
        held = b.and_(lit_neg(t0), tap[j])
        half = b.xor_(held, add)
        total.append(b.xor_(half, carry))
        carry = b.or_(b.and_(held, add), b.and_(carry, half))

    for j in range(2 * width):
        b.set_next(tap[j], b.mux(busy, total[j], tap[j]))
    if doubled_accumulator:
        b.set_next(acc[0], b.and_(lit_neg(busy), acc[0]))

    # multiplicand shifts left every cycle; the load is already pre-shifted
    for j in range(2 * width):
        load = a_in[j - 1] if 1 <= j <= width else 0
        prev = mcand[j - 1] if j >= 1 else 0
        b.set_next(mcand[j], b.mux(t0, load, prev))
    # multiplier shifts right, low bit first
    for j in range(width):
        load = b_in[j + 1] if j + 1 < width else 0
        prev = mult[j + 1] if j + 1 < width else 0
        b.set_next(mult[j], b.mux(t0, load, prev))

    b.set_next(timer[0], 0)
    for k in range(1, width):
        b.set_next(timer[k], timer[k - 1])
    b.set_next(done, b.or_(done, timer[width - 1]))

    for j in range(2 * width):
        b.output(b.and_(tap[j], done))
    b.output(done)
    return b.build()


def gen_multiplier_pair(width: int) -> tuple[Aig, Aig]:
    """Specification/implementation pair of sequential multipliers.

    The specification shifts the multiplicand left over a plain accumulator;
    the implementation shifts its partial sum right through a doubled
    accumulator register. Identical I/O behavior, different latch
    structures.
    """
    if width < 2:
        raise ValueError("multiplier width must be >= 2")
    spec = _shift_add_multiplier(width, doubled_accumulator=False)
    impl = _shift_add_multiplier(width, doubled_accumulator=True)
    return spec, impl


# --- Tamper mutators -----------------------------------------------------------

_CERT_KINDS = ("flip", "delete", "add", "swap")


def mutate_certificate(cert: Certificate, seed: int) -> Certificate:
    """Apply one seeded mutation to a certificate.

    Draw order: mutation kind uniformly over applicable kinds in the order
    flip / delete / add / swap, then the site uniformly. Kinds: flip one
    literal's negation; delete one clause; add a clause of 1-3 fresh random
    literals over the certificate's own variables; swap two variables
    throughout. The digest is left untouched: proof tampering does not
    change the circuit.
    """
    if not cert.clauses:
        raise EmptyCertificate("cannot mutate an empty certificate")
    rng = random.Random(seed)
    clauses = [list(cl) for cl in cert.clauses]
    universe = sorted({lit_var(lit) for cl in clauses for lit in cl})
    kinds = [k for k in _CERT_KINDS if k != "swap" or len(universe) >= 2]
    kind = rng.choice(kinds)
    if kind == "flip":
        ci = rng.randrange(len(clauses))
        li = rng.randrange(len(clauses[ci]))
        clauses[ci][li] ^= 1
    elif kind == "delete":
        del clauses[rng.randrange(len(clauses))]
    elif kind == "add":
        n = rng.randint(1, min(3, len(universe)))
        chosen = rng.sample(universe, n)
        clauses.append([var_lit(v, bool(rng.randint(0, 1))) for v in chosen])
    else:
        x, y = rng.sample(universe, 2)
        table = {x: y, y: x}
        clauses = [[var_lit(table.get(lit_var(l), lit_var(l)), bool(l & 1)) for l in cl]
                   for cl in clauses]
    return Certificate(tuple(tuple(cl) for cl in clauses), cert.digest, cert.comments)


def mutate_circuit(aig: Aig, seed: int) -> Aig:
    """Apply one seeded structural mutation, keeping the circuit well formed.

    Kinds (uniform over applicable, in order): flip one AND operand's
    negation; rewire one AND operand to another variable defined earlier in
    topological order; flip one latch reset bit. Input and output counts
    never change, so tampered circuits still miter.
    """
    if not aig.ands:
        raise NoGates("circuit mutation requires at least one AND gate")
    rng = random.Random(seed)
    kinds = ["flip_operand", "rewire"] + (["flip_reset"] if aig.latches else [])
    kind = rng.choice(kinds)
    gates = list(aig.ands)
    latches = list(aig.latches)
    if kind == "flip_reset":
        li = rng.randrange(len(latches))
        latch = latches[li]
        latches[li] = Latch(latch.current, latch.next, latch.reset ^ 1)
    else:
        gi = rng.randrange(len(gates))
        side = rng.randrange(2)
        gate = gates[gi]
        operands = [gate.rhs0, gate.rhs1]
        if kind == "rewire":
            order = gate_topo_order(aig)
            upstream = []
            for g in order:
                if g.lhs == gate.lhs:
                    break
                upstream.append(lit_var(g.lhs))
            candidates = sorted(
                {lit_var(l) for l in aig.inputs}
                | {lit_var(l.current) for l in latches}
                | set(upstream)
                - {lit_var(operands[side])})
            if candidates:
                new_var = rng.choice(candidates)
                operands[side] = var_lit(new_var, bool(operands[side] & 1))
            else:
                operands[side] ^= 1  # no rewire target; degrade to a flip
        else:
            operands[side] ^= 1
        gates[gi] = AndGate(gate.lhs, operands[0], operands[1])
    return make_aig(aig.max_var, aig.inputs, latches, aig.outputs, aig.bads,
                    gates, aig.symbols, aig.comments)
