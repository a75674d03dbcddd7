"""Exception hierarchy shared across the toolkit.

Every error raised on malformed or adversarial input derives from
:class:`PchError` so the CLI can map failures to exit codes uniformly.
"""


class PchError(Exception):
    """Base class for all toolkit errors."""


# --- AIGER parsing / structural errors ---------------------------------------

class AigerError(PchError):
    """Base class for circuit format and structure errors."""


class MalformedHeader(AigerError):
    """Header line is absent, inconsistent, or uses unsupported sections."""


class DuplicateDefinition(AigerError):
    """A variable is defined more than once (input, latch, or AND lhs)."""


class UndefinedVariableReference(AigerError):
    """A literal references a variable with no definition, or the AND graph is cyclic."""


class CountMismatch(AigerError):
    """Declared section lengths disagree with the actual file contents."""


class TruncatedDeltaStream(AigerError):
    """Binary AND section ended in the middle of a delta-encoded gate."""


class NonMonotoneAndIndex(AigerError):
    """Binary AND section violates lhs > rhs0 >= rhs1 ordering."""


class UndefinedReset(AigerError):
    """A latch declares an uninitialized reset value; only 0 and 1 are supported."""


class InputArityMismatch(AigerError):
    """A simulation input vector does not match the circuit's input count."""


# --- Encoding errors ----------------------------------------------------------

class NoSuchSafetyBit(PchError):
    """The requested safety index addresses no bad bit or output."""


class NonStateVariable(PchError):
    """A literal expected to range over latch state variables does not."""


# --- SAT backend errors -------------------------------------------------------

class UnallocatedVariable(PchError):
    """A clause or assumption references a variable the session never allocated."""


# --- Miter errors -------------------------------------------------------------

class InputCountMismatch(PchError):
    """Specification and implementation differ in input count; no miter exists."""


class OutputCountMismatch(PchError):
    """Specification and implementation differ in output count; no miter exists."""


# --- Proof generation errors --------------------------------------------------

class ResourceLimit(PchError):
    """Configured conflict or wall-clock budget exceeded before a verdict."""


class NotAFixpoint(PchError):
    """Certificate extraction requested at frames with unequal clause sets."""


# --- Certificate errors -------------------------------------------------------

class CertificateError(PchError):
    """Base class for certificate file and binding errors."""


class ClauseCountMismatch(CertificateError):
    """Certificate header clause count disagrees with the body."""


class NonNumericLiteral(CertificateError):
    """Certificate body contains a token that is not a decimal literal."""


class NonLatchVariable(CertificateError):
    """Certificate references a variable that is not a latch of the bound circuit."""


class DigestMismatch(CertificateError):
    """Certificate circuit fingerprint does not match the shipped circuit."""


# --- Generator / mutation errors ----------------------------------------------

class BadValueOutOfRange(PchError):
    """Counter bad value does not fit in the requested width."""


class EmptyCertificate(PchError):
    """Certificate mutation requires at least one clause."""


class NoGates(PchError):
    """Circuit mutation requires at least one AND gate."""


class TooManyStateBits(PchError):
    """Exhaustive reachability refused: latch count exceeds the state bit limit."""
