"""Shippable proof files: a CNF over latch state variables.

The on-disk format is DIMACS-like but uses AIGER literals: optional ``c``
comment lines, then a ``p pch <num_clauses>`` header, then one clause per
line as space-separated decimal AIGER literals terminated by ``0``. A
comment ``c circuit-sha256 <hex>`` carries an optional fingerprint of the
circuit the proof was generated for; validation checks it when present and
falls back to pure SAT-based rejection when absent.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .aiger import Aig, circuit_digest, lit_is_negated, lit_var
from .encode import VarMap, build_varmap
from .errors import (
    ClauseCountMismatch,
    DigestMismatch,
    MalformedHeader,
    NonLatchVariable,
    NonNumericLiteral,
)

_DIGEST_PREFIX = "c circuit-sha256 "


@dataclass(frozen=True)
class Certificate:
    """Clauses of AIGER literals over latch current-state variables."""

    clauses: tuple[tuple[int, ...], ...]
    digest: str | None = None
    comments: tuple[str, ...] = ()

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def with_digest(self, aig: Aig) -> "Certificate":
        return replace(self, digest=circuit_digest(aig))


def write_certificate(cert: Certificate) -> bytes:
    lines = [f"c {c}" if c else "c" for c in cert.comments]
    if cert.digest is not None:
        lines.append(_DIGEST_PREFIX + cert.digest)
    lines.append(f"p pch {len(cert.clauses)}")
    for cl in cert.clauses:
        lines.append(" ".join(str(l) for l in cl) + " 0")
    return ("\n".join(lines) + "\n").encode("ascii")


def read_certificate(data: bytes | str) -> Certificate:
    text = data.decode("ascii", errors="replace") if isinstance(data, (bytes, bytearray)) else data
    digest = None
    comments = []
    declared = None
    clauses = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            if declared is not None:
                raise MalformedHeader("comment after certificate header")
            if line.startswith(_DIGEST_PREFIX):
                digest = line[len(_DIGEST_PREFIX):].strip()
            else:
                comments.append(line[2:] if line.startswith("c ") else "")
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 3 or fields[0] != "p" or fields[1] != "pch":
                raise MalformedHeader(f"bad certificate header: {line!r}")
            try:
                declared = int(fields[2])
            except ValueError:
                raise MalformedHeader(f"bad certificate header: {line!r}") from None
            continue
        if declared is None:
            raise MalformedHeader("clause body before 'p pch' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise NonNumericLiteral(f"non-numeric literal {tok!r}") from None
            if lit < 0:
                raise NonNumericLiteral(f"negative literal {lit}; AIGER literals are unsigned")
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if declared is None:
        raise MalformedHeader("missing 'p pch' header")
    if pending:
        raise ClauseCountMismatch("unterminated final clause")
    if len(clauses) != declared:
        raise ClauseCountMismatch(
            f"header declares {declared} clauses, body has {len(clauses)}")
    return Certificate(tuple(clauses), digest, tuple(comments))


@dataclass(frozen=True)
class BoundCertificate:
    """Certificate mapped to a circuit's solver variables."""

    cert: Certificate
    clauses: tuple[tuple[int, ...], ...]  # signed solver literals, current-state
    varmap: VarMap


def bind(cert: Certificate, aig: Aig, varmap: VarMap | None = None,
         check_digest: bool = True) -> BoundCertificate:
    """Map AIGER literals to current-state solver literals.

    Rejects certificates whose digest disagrees with the circuit (cheap
    tamper fast path, no SAT query) and certificates mentioning variables
    that are not latches of the circuit.
    """
    if check_digest and cert.digest is not None:
        actual = circuit_digest(aig)
        if cert.digest != actual:
            raise DigestMismatch(
                f"certificate fingerprint {cert.digest[:12]}… does not match "
                f"circuit {actual[:12]}…")
    if varmap is None:
        varmap = build_varmap(aig)
    mapped = []
    for cl in cert.clauses:
        out = []
        for lit in cl:
            var = lit_var(lit)
            idx = varmap.latch_index_of_var.get(var)
            if idx is None:
                raise NonLatchVariable(
                    f"certificate literal {lit} is not over a latch variable")
            sv = varmap.current_vars[idx]
            out.append(-sv if lit_is_negated(lit) else sv)
        mapped.append(tuple(out))
    return BoundCertificate(cert, tuple(mapped), varmap)
