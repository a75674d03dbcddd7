"""AIGER circuit representation, parsing, serialization, and simulation.

Both the ASCII ("aag") and binary ("aig") formats are supported, including
the bad-state ("B") section. Constraint, justice, and fairness sections are
out of scope and rejected. Latches reset to 0 unless explicitly declared 1;
uninitialized resets are rejected rather than guessed.

Literals follow the AIGER encoding: variable ``v`` has positive literal
``2*v`` and negated literal ``2*v + 1``; literal 0 is constant FALSE and
literal 1 constant TRUE.
"""

from __future__ import annotations

import dataclasses
import hashlib
import re
from dataclasses import dataclass

from .errors import (
    AigerError,
    CountMismatch,
    DuplicateDefinition,
    InputArityMismatch,
    MalformedHeader,
    NonMonotoneAndIndex,
    TruncatedDeltaStream,
    UndefinedReset,
    UndefinedVariableReference,
)

FALSE = 0
TRUE = 1


def lit_var(lit: int) -> int:
    """Variable index of a literal."""
    return lit >> 1


def lit_neg(lit: int) -> int:
    """Negation of a literal (involutive)."""
    return lit ^ 1


def lit_is_negated(lit: int) -> bool:
    return bool(lit & 1)


def lit_is_const(lit: int) -> bool:
    return lit < 2


def var_lit(var: int, negated: bool = False) -> int:
    """Positive (or negated) literal of a variable."""
    return (var << 1) | int(negated)


@dataclass(frozen=True)
class Latch:
    """One state bit: current-state literal, next-state literal, reset value."""

    current: int
    next: int
    reset: int = 0


@dataclass(frozen=True)
class AndGate:
    """AND gate ``lhs = rhs0 & rhs1``; operands normalized to rhs0 >= rhs1."""

    lhs: int
    rhs0: int
    rhs1: int

    def __post_init__(self):
        if self.rhs0 < self.rhs1:
            r0, r1 = self.rhs1, self.rhs0
            object.__setattr__(self, "rhs0", r0)
            object.__setattr__(self, "rhs1", r1)


_make_and = AndGate


@dataclass(frozen=True)
class Aig:
    """Immutable and-inverter graph with latches, outputs, and bad bits.

    ``symbols`` and ``comments`` are opaque metadata: preserved through
    parse/serialize round trips, never interpreted.
    """

    max_var: int
    inputs: tuple[int, ...] = ()
    latches: tuple[Latch, ...] = ()
    outputs: tuple[int, ...] = ()
    bads: tuple[int, ...] = ()
    ands: tuple[AndGate, ...] = ()
    symbols: tuple[str, ...] = ()
    comments: tuple[str, ...] = ()

    @property
    def num_inputs(self) -> int:
        return len(self.inputs)

    @property
    def num_latches(self) -> int:
        return len(self.latches)

    @property
    def num_ands(self) -> int:
        return len(self.ands)


def make_aig(max_var, inputs, latches, outputs, bads, ands,
             symbols=(), comments=()) -> Aig:
    """Construct an Aig with normalized gates and validated invariants."""
    aig = Aig(
        max_var=max_var,
        inputs=tuple(inputs),
        latches=tuple(latches),
        outputs=tuple(outputs),
        bads=tuple(bads),
        ands=tuple(_make_and(g.lhs, g.rhs0, g.rhs1) if isinstance(g, AndGate)
                   else _make_and(*g) for g in ands),
        symbols=tuple(symbols),
        comments=tuple(comments),
    )
    check_valid(aig)
    return aig


def check_valid(aig: Aig) -> None:
    """Check all structural invariants; raises an AigerError subclass."""
    m = aig.max_var
    if m != len(aig.inputs) + len(aig.latches) + len(aig.ands):
        raise MalformedHeader(
            f"max_var {m} != inputs {len(aig.inputs)} + latches "
            f"{len(aig.latches)} + ands {len(aig.ands)}")
    defined: dict[int, str] = {}

    def define(lit, role):
        if lit_is_const(lit) or lit_is_negated(lit):
            raise AigerError(f"{role} must be defined by an even non-constant "
                             f"literal, got {lit}")
        v = lit_var(lit)
        if v > m:
            raise UndefinedVariableReference(f"{role} literal {lit} exceeds max_var {m}")
        if v in defined:
            raise DuplicateDefinition(f"variable {v} defined as both {defined[v]} and {role}")
        defined[v] = role

    for lit in aig.inputs:
        define(lit, "input")
    for latch in aig.latches:
        define(latch.current, "latch")
        if latch.reset not in (0, 1):
            raise UndefinedReset(f"latch {latch.current} has reset {latch.reset}")
    for gate in aig.ands:
        define(gate.lhs, "and")
        if gate.rhs0 < gate.rhs1:
            raise AigerError(f"gate {gate.lhs} operands not normalized")

    def check_ref(lit, what):
        if not lit_is_const(lit) and lit_var(lit) not in defined:
            raise UndefinedVariableReference(f"{what} references undefined literal {lit}")

    for latch in aig.latches:
        check_ref(latch.next, "latch next-state")
    for lit in aig.outputs:
        check_ref(lit, "output")
    for lit in aig.bads:
        check_ref(lit, "bad bit")
    for gate in aig.ands:
        check_ref(gate.rhs0, f"gate {gate.lhs}")
        check_ref(gate.rhs1, f"gate {gate.lhs}")
    gate_topo_order(aig)  # raises on combinational cycles


def gate_topo_order(aig: Aig) -> list[AndGate]:
    """AND gates in dependency order, stable w.r.t. circuit order.

    Circuits whose gate list is already topological come back unchanged.
    Raises on combinational cycles.
    """
    import heapq

    position = {lit_var(g.lhs): k for k, g in enumerate(aig.ands)}
    indeg = {}
    users: dict[int, list[int]] = {}
    for g in aig.ands:
        v = lit_var(g.lhs)
        deps = {lit_var(r) for r in (g.rhs0, g.rhs1)
                if not lit_is_const(r) and lit_var(r) in position}
        indeg[v] = len(deps)
        for d in deps:
            users.setdefault(d, []).append(v)
    ready = [position[lit_var(g.lhs)] for g in aig.ands if indeg[lit_var(g.lhs)] == 0]
    heapq.heapify(ready)
    order: list[AndGate] = []
    while ready:
        g = aig.ands[heapq.heappop(ready)]
        order.append(g)
        for u in users.get(lit_var(g.lhs), ()):
            indeg[u] -= 1
            if indeg[u] == 0:
                heapq.heappush(ready, position[u])
    if len(order) != len(aig.ands):
        raise UndefinedVariableReference("combinational cycle in AND gates")
    return order


# --- ASCII format --------------------------------------------------------------

def parse_ascii(data: bytes | str) -> Aig:
    """Parse an ASCII ("aag") AIGER file."""
    text = data.decode("latin-1") if isinstance(data, (bytes, bytearray)) else data
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedHeader("empty file")
    fields = lines[0].split()
    if len(fields) < 6 or fields[0] != "aag":
        raise MalformedHeader(f"bad header: {lines[0]!r}")
    if len(fields) > 7:
        raise MalformedHeader("constraint/justice/fairness sections are unsupported")
    try:
        m, i, l, o, a = (int(x) for x in fields[1:6])
        b = int(fields[6]) if len(fields) == 7 else 0
    except ValueError:
        raise MalformedHeader(f"non-numeric header field: {lines[0]!r}") from None
    if min(m, i, l, o, a, b) < 0:
        raise MalformedHeader("negative header field")

    pos = 1

    def take(section):
        nonlocal pos
        if pos >= len(lines):
            raise CountMismatch(f"file ends inside {section} section")
        line = lines[pos]
        pos += 1
        return line

    def parse_lit(tok, section):
        try:
            lit = int(tok)
        except ValueError:
            raise AigerError(f"non-numeric literal {tok!r} in {section} section") from None
        if lit < 0:
            raise AigerError(f"negative literal in {section} section")
        return lit

    inputs = tuple(parse_lit(take("input"), "input") for _ in range(i))
    latches = []
    for _ in range(l):
        toks = take("latch").split()
        if len(toks) not in (2, 3):
            raise CountMismatch(f"latch line needs 2 or 3 fields: {toks!r}")
        cur = parse_lit(toks[0], "latch")
        nxt = parse_lit(toks[1], "latch")
        reset = 0
        if len(toks) == 3:
            r = parse_lit(toks[2], "latch")
            if r == cur:
                raise UndefinedReset(f"latch {cur} declares an uninitialized reset")
            if r not in (0, 1):
                raise UndefinedReset(f"latch {cur} has invalid reset {r}")
            reset = r
        latches.append(Latch(cur, nxt, reset))
    outputs = tuple(parse_lit(take("output"), "output") for _ in range(o))
    bads = tuple(parse_lit(take("bad"), "bad") for _ in range(b))
    ands = []
    for _ in range(a):
        toks = take("and").split()
        if len(toks) != 3:
            raise CountMismatch(f"and line needs 3 fields: {toks!r}")
        lhs, r0, r1 = (parse_lit(t, "and") for t in toks)
        ands.append(_make_and(lhs, r0, r1))

    symbols, comments = _parse_trailer(lines, pos)
    return make_aig(m, inputs, tuple(latches), outputs, bads, tuple(ands),
                    symbols, comments)


_SYMBOL_RE = re.compile(r"^[ilob]\d+ ")


def _parse_trailer(lines, pos):
    symbols = []
    while pos < len(lines) and _SYMBOL_RE.match(lines[pos]):
        symbols.append(lines[pos])
        pos += 1
    comments = []
    if pos < len(lines):
        if lines[pos] != "c":
            raise CountMismatch(f"unexpected trailing line: {lines[pos]!r}")
        comments = lines[pos + 1:]
    return tuple(symbols), tuple(comments)


def serialize_ascii(aig: Aig) -> bytes:
    """Serialize to ASCII form; inverse of parse_ascii on valid circuits."""
    out = [f"aag {aig.max_var} {len(aig.inputs)} {len(aig.latches)} "
           f"{len(aig.outputs)} {len(aig.ands)}"]
    if aig.bads:
        out[0] += f" {len(aig.bads)}"
    for lit in aig.inputs:
        out.append(str(lit))
    for latch in aig.latches:
        line = f"{latch.current} {latch.next}"
        if latch.reset != 0:
            line += f" {latch.reset}"
        out.append(line)
    for lit in aig.outputs:
        out.append(str(lit))
    for lit in aig.bads:
        out.append(str(lit))
    for g in aig.ands:
        out.append(f"{g.lhs} {g.rhs0} {g.rhs1}")
    out.extend(aig.symbols)
    if aig.comments:
        out.append("c")
        out.extend(aig.comments)
    return ("\n".join(out) + "\n").encode("latin-1")


def circuit_digest(aig: Aig) -> str:
    """SHA-256 hex fingerprint of the functional content of a circuit.

    Symbols and comments are metadata and excluded, so cosmetic edits do not
    change the fingerprint while any structural edit does.
    """
    stripped = dataclasses.replace(aig, symbols=(), comments=())
    return hashlib.sha256(serialize_ascii(stripped)).hexdigest()


# --- Binary format --------------------------------------------------------------

def parse_binary(data: bytes) -> Aig:
    """Parse a binary ("aig") AIGER file."""
    if isinstance(data, str):
        data = data.encode("latin-1")
    pos = 0

    def take_line(section):
        nonlocal pos
        end = data.find(b"\n", pos)
        if end < 0:
            raise CountMismatch(f"file ends inside {section} section")
        line = data[pos:end].decode("latin-1")
        pos = end + 1
        return line

    header = take_line("header").split()
    if len(header) < 6 or header[0] != "aig":
        raise MalformedHeader(f"bad header: {header!r}")
    if len(header) > 7:
        raise MalformedHeader("constraint/justice/fairness sections are unsupported")
    try:
        m, i, l, o, a = (int(x) for x in header[1:6])
        b = int(header[6]) if len(header) == 7 else 0
    except ValueError:
        raise MalformedHeader(f"non-numeric header field: {header!r}") from None
    if m != i + l + a:
        raise MalformedHeader(f"binary header requires M = I + L + A, got {header!r}")

    inputs = tuple(var_lit(v) for v in range(1, i + 1))
    latches = []
    for idx in range(l):
        toks = take_line("latch").split()
        if len(toks) not in (1, 2):
            raise CountMismatch(f"latch line needs 1 or 2 fields: {toks!r}")
        cur = var_lit(i + 1 + idx)
        try:
            nxt = int(toks[0])
            reset = int(toks[1]) if len(toks) == 2 else 0
        except ValueError:
            raise AigerError(f"non-numeric latch field: {toks!r}") from None
        if reset == cur:
            raise UndefinedReset(f"latch {cur} declares an uninitialized reset")
        if reset not in (0, 1):
            raise UndefinedReset(f"latch {cur} has invalid reset {reset}")
        latches.append(Latch(cur, nxt, reset))
    def take_lit(section):
        tok = take_line(section)
        try:
            return int(tok)
        except ValueError:
            raise AigerError(f"non-numeric literal {tok!r} in {section} section") from None

    outputs = tuple(take_lit("output") for _ in range(o))
    bads = tuple(take_lit("bad") for _ in range(b))

    def decode_delta():
        nonlocal pos
        value = 0
        shift = 0
        while True:
            if pos >= len(data):
                raise TruncatedDeltaStream("binary AND section truncated")
            byte = data[pos]
            pos += 1
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7

    ands = []
    for idx in range(a):
        lhs = var_lit(i + l + 1 + idx)
        delta0 = decode_delta()
        delta1 = decode_delta()
        rhs0 = lhs - delta0
        rhs1 = rhs0 - delta1
        if delta0 == 0 or rhs1 < 0:
            raise NonMonotoneAndIndex(
                f"gate {lhs} violates lhs > rhs0 >= rhs1 (deltas {delta0}, {delta1})")
        ands.append(_make_and(lhs, rhs0, rhs1))

    trailer = data[pos:].decode("latin-1").split("\n")
    if trailer and trailer[-1] == "":
        trailer.pop()
    symbols, comments = _parse_trailer(trailer, 0) if trailer else ((), ())
    return make_aig(m, inputs, tuple(latches), outputs, bads, tuple(ands),
                    symbols, comments)


def serialize_binary(aig: Aig) -> bytes:
    """Serialize to binary form, renumbering variables canonically.

    Binary AIGER forces inputs, latches, and topologically ordered gates into
    consecutive variable slots; circuits already in that order round-trip to
    a structurally identical Aig.
    """
    remap = {0: 0}
    nxt = 1
    for lit in aig.inputs:
        remap[lit_var(lit)] = nxt
        nxt += 1
    for latch in aig.latches:
        remap[lit_var(latch.current)] = nxt
        nxt += 1
    order = gate_topo_order(aig)
    for g in order:
        remap[lit_var(g.lhs)] = nxt
        nxt += 1

    def ml(lit):
        return var_lit(remap[lit_var(lit)], lit_is_negated(lit)) if lit > 1 else lit

    i, l, o, a = len(aig.inputs), len(aig.latches), len(aig.outputs), len(aig.ands)
    head = f"aig {i + l + a} {i} {l} {o} {a}"
    if aig.bads:
        head += f" {len(aig.bads)}"
    out = bytearray(head.encode() + b"\n")
    for latch in aig.latches:
        line = str(ml(latch.next))
        if latch.reset != 0:
            line += f" {latch.reset}"
        out += line.encode() + b"\n"
    for lit in aig.outputs:
        out += str(ml(lit)).encode() + b"\n"
    for lit in aig.bads:
        out += str(ml(lit)).encode() + b"\n"

    def encode_delta(value):
        while value & ~0x7F:
            out.append((value & 0x7F) | 0x80)
            value >>= 7
        out.append(value)

    for g in order:
        lhs, r0, r1 = ml(g.lhs), ml(g.rhs0), ml(g.rhs1)
        if r0 < r1:
            r0, r1 = r1, r0
        encode_delta(lhs - r0)
        encode_delta(r0 - r1)
    for sym in aig.symbols:
        out += sym.encode("latin-1") + b"\n"
    if aig.comments:
        out += b"c\n"
        for c in aig.comments:
            out += c.encode("latin-1") + b"\n"
    return bytes(out)


def load(path: str) -> Aig:
    """Read a circuit file, dispatching on the aag/aig header."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(b"aig "):
        return parse_binary(data)
    return parse_ascii(data)


def dump(aig: Aig, path: str, binary: bool | None = None) -> None:
    """Write a circuit file; format from the extension unless forced."""
    if binary is None:
        binary = path.endswith(".aig")
    data = serialize_binary(aig) if binary else serialize_ascii(aig)
    with open(path, "wb") as fh:
        fh.write(data)


# --- Simulation -----------------------------------------------------------------

@dataclass(frozen=True)
class SimTrace:
    """Per-step output and bad-bit values of a simulation run."""

    outputs: tuple[tuple[int, ...], ...]
    bads: tuple[tuple[int, ...], ...]


def simulate(aig: Aig, input_seq) -> SimTrace:
    """Simulate from reset: at each step evaluate combinational logic on the
    current state and input vector, record outputs/bads, then clock latches.
    """
    order = gate_topo_order(aig)
    values = [0] * (aig.max_var + 1)
    state = {lit_var(latch.current): latch.reset for latch in aig.latches}

    def ev(lit):
        if lit < 2:
            return lit
        return values[lit >> 1] ^ (lit & 1)

    outs = []
    bads = []
    for step, vec in enumerate(input_seq):
        vec = tuple(vec)
        if len(vec) != len(aig.inputs):
            raise InputArityMismatch(
                f"step {step}: expected {len(aig.inputs)} input bits, got {len(vec)}")
        for lit, bit in zip(aig.inputs, vec):
            values[lit_var(lit)] = bit & 1
        for v, bit in state.items():
            values[v] = bit
        for g in order:
            values[lit_var(g.lhs)] = ev(g.rhs0) & ev(g.rhs1)
        outs.append(tuple(ev(lit) for lit in aig.outputs))
        bads.append(tuple(ev(lit) for lit in aig.bads))
        state = {lit_var(latch.current): ev(latch.next) for latch in aig.latches}
    return SimTrace(tuple(outs), tuple(bads))


# --- Witness traces --------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """Input trace driving a bad bit to 1 at the final step.

    ``length`` counts transitions: a bad bit asserted in the very first step
    gives length 0 with a single input vector.
    """

    init: tuple[int, ...]
    inputs: tuple[tuple[int, ...], ...]
    property_index: int = 0

    @property
    def length(self) -> int:
        return len(self.inputs) - 1

    def to_text(self) -> str:
        lines = ["1", f"b{self.property_index}",
                 "".join(str(b) for b in self.init)]
        for vec in self.inputs:
            lines.append("".join(str(b) for b in vec))
        lines.append(".")
        return "\n".join(lines) + "\n"


def check_witness(aig: Aig, witness: Witness, safety_index: int = 0) -> bool:
    """Replay a witness; true iff the selected bad bit fires at the last step."""
    from .encode import resolve_safety  # local import to avoid a cycle

    kind, _ = resolve_safety(aig, safety_index)
    if tuple(witness.init) != tuple(l.reset for l in aig.latches):
        return False
    trace = simulate(aig, witness.inputs)
    series = trace.bads if kind == "bad" else trace.outputs
    fired = [step[safety_index] for step in series]
    return bool(fired) and fired[-1] == 1


# --- Construction helper ----------------------------------------------------------

class AigBuilder:
    """Builds canonical circuits: inputs, then latches, then gates.

    ``and_`` folds constants and duplicate structure, so generated circuits
    stay lean and deterministic. Gate allocation locks the input/latch
    sections; declare all state before building logic.
    """

    def __init__(self):
        self._next_var = 1
        self._inputs: list[int] = []
        self._latches: list[list] = []  # [current, next_or_None, reset]
        self._ands: list[AndGate] = []
        self._by_latch: dict[int, int] = {}
        self._cache: dict[tuple[int, int], int] = {}
        self._outputs: list[int] = []
        self._bads: list[int] = []
        self._locked = False

    def input(self) -> int:
        assert not self._locked, "declare inputs before building logic"
        lit = var_lit(self._next_var)
        self._next_var += 1
        self._inputs.append(lit)
        return lit

    def latch(self, reset: int = 0) -> int:
        assert not self._locked, "declare latches before building logic"
        lit = var_lit(self._next_var)
        self._next_var += 1
        self._by_latch[lit] = len(self._latches)
        self._latches.append([lit, None, reset])
        return lit

    def set_next(self, latch_lit: int, next_lit: int) -> None:
        self._latches[self._by_latch[latch_lit]][1] = next_lit

    def and_(self, a: int, b: int) -> int:
        if a < b:
            a, b = b, a
        if b == FALSE or a == lit_neg(b):
            return FALSE
        if b == TRUE or a == b:
            return a
        key = (a, b)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        self._locked = True
        lit = var_lit(self._next_var)
        self._next_var += 1
        self._ands.append(_make_and(lit, a, b))
        self._cache[key] = lit
        return lit

    def or_(self, a: int, b: int) -> int:
        return lit_neg(self.and_(lit_neg(a), lit_neg(b)))

    def xor_(self, a: int, b: int) -> int:
        return self.or_(self.and_(a, lit_neg(b)), self.and_(lit_neg(a), b))

    def mux(self, sel: int, then: int, other: int) -> int:
        return self.or_(self.and_(sel, then), self.and_(lit_neg(sel), other))

    def or_tree(self, lits) -> int:
        """Balanced OR over a list of literals; empty list gives FALSE."""
        layer = list(lits)
        if not layer:
            return FALSE
        while len(layer) > 1:
            nxt = [self.or_(layer[k], layer[k + 1]) for k in range(0, len(layer) - 1, 2)]
            if len(layer) % 2:
                nxt.append(layer[-1])
            layer = nxt
        return layer[0]

    def output(self, lit: int) -> None:
        self._outputs.append(lit)

    def bad(self, lit: int) -> None:
        self._bads.append(lit)

    def build(self, comments=()) -> Aig:
        latches = []
        for cur, nxt, reset in self._latches:
            assert nxt is not None, f"latch {cur} has no next-state literal"
            latches.append(Latch(cur, nxt, reset))
        return make_aig(self._next_var - 1, self._inputs, latches,
                        self._outputs, self._bads, self._ands, comments=comments)
