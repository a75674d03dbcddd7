"""Sequential equivalence miters.

The miter feeds one shared input list into both circuits, keeps their latch
sets disjoint, XORs each output pair, and ORs the XORs into a single bad
bit. No unrolling: the machines run side by side from their reset states,
and the comparison includes step 0.
"""

from __future__ import annotations

from .aiger import Aig, AigBuilder, lit_is_const, lit_is_negated, lit_var, gate_topo_order
from .encode import resolve_safety
from .errors import InputCountMismatch, OutputCountMismatch


def _instantiate(builder: AigBuilder, circuit: Aig, shared_inputs,
                 latch_lits) -> dict[int, int]:
    """Copy one circuit into the builder; returns old-var -> new-literal."""
    varmap: dict[int, int] = {}
    for old, new in zip(circuit.inputs, shared_inputs):
        varmap[lit_var(old)] = new
    for latch, new in zip(circuit.latches, latch_lits):
        varmap[lit_var(latch.current)] = new

    def ml(lit):
        if lit_is_const(lit):
            return lit
        return varmap[lit_var(lit)] ^ (lit & 1)

    for gate in gate_topo_order(circuit):
        varmap[lit_var(gate.lhs)] = builder.and_(ml(gate.rhs0), ml(gate.rhs1))
    for latch, new in zip(circuit.latches, latch_lits):
        builder.set_next(new, ml(latch.next))
    return varmap


def build_equivalence_miter(spec: Aig, impl: Aig) -> Aig:
    """Combine two circuits into one checker whose bad bit fires on any
    step where their outputs differ."""
    if len(spec.inputs) != len(impl.inputs):
        raise InputCountMismatch(
            f"spec has {len(spec.inputs)} inputs, impl has {len(impl.inputs)}")
    if len(spec.outputs) != len(impl.outputs):
        raise OutputCountMismatch(
            f"spec has {len(spec.outputs)} outputs, impl has {len(impl.outputs)}")

    b = AigBuilder()
    shared = [b.input() for _ in spec.inputs]
    spec_latches = [b.latch(l.reset) for l in spec.latches]
    impl_latches = [b.latch(l.reset) for l in impl.latches]

    spec_map = _instantiate(b, spec, shared, spec_latches)
    impl_map = _instantiate(b, impl, shared, impl_latches)

    def ml(varmap, lit):
        if lit_is_const(lit):
            return lit
        return varmap[lit_var(lit)] ^ (lit & 1)

    xors = [b.xor_(ml(spec_map, s), ml(impl_map, i))
            for s, i in zip(spec.outputs, impl.outputs)]
    b.bad(b.or_tree(xors))
    return b.build()


def select_safety(aig: Aig, index: int) -> tuple[Aig, int]:
    """Validate the safety index against the circuit; identity otherwise."""
    resolve_safety(aig, index)
    return aig, index
