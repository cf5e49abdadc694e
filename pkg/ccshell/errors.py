"""Exception hierarchy for ccshell.

Failed properties are not exceptions: verifiers return violation values.
Everything here signals malformed input, a broken precondition or an
exhausted search budget.
"""

from __future__ import annotations


class CCShellError(Exception):
    """Base class for every error raised by ccshell."""


# ---------------------------------------------------------------------------
# Complexes and rings
# ---------------------------------------------------------------------------


class ComplexError(CCShellError):
    pass


class InvalidRing(ComplexError):
    pass


class InvalidScalar(ComplexError):
    pass


class DanglingReference(ComplexError):
    pass


class EmptyTopDegree(ComplexError):
    pass


class EmptyInput(ComplexError):
    pass


class IndexOutOfRange(ComplexError):
    pass


class BoundaryConditionViolated(ComplexError):
    """∂_ν ∘ ∂_{ν+1} has a nonzero column.

    ``degree`` is ν and ``column`` the 1-based index of the offending
    basis element of degree ν+1.
    """

    def __init__(self, degree: int, column: int) -> None:
        self.degree = degree
        self.column = column
        super().__init__(
            f"boundary condition violated: d_{degree} o d_{degree + 1} "
            f"is nonzero on column {column}"
        )


# ---------------------------------------------------------------------------
# Linear algebra, classification, homology
# ---------------------------------------------------------------------------


class LinalgError(CCShellError):
    pass


class InvalidTarget(LinalgError):
    pass


class ClassificationError(CCShellError):
    pass


class NotMaximal(ClassificationError):
    pass


class OrderingConventionViolated(ClassificationError):
    pass


class FirstPosition(ClassificationError):
    pass


class StrictlyPrecriticalPresent(ClassificationError):
    pass


class HomologyError(CCShellError):
    pass


class InvalidAugmentation(HomologyError):
    pass


# ---------------------------------------------------------------------------
# Certificates and searches
# ---------------------------------------------------------------------------


class CertificateError(CCShellError):
    pass


class MalformedCertificate(CertificateError):
    pass


class InvalidInput(CertificateError):
    pass


class InvalidCertificate(CertificateError):
    pass


class SearchBudgetExceeded(CCShellError):
    """The node budget ran out before the search could decide."""

    def __init__(self, nodes: int) -> None:
        self.nodes = nodes
        super().__init__(f"search budget of {nodes} nodes exceeded")


# ---------------------------------------------------------------------------
# Documents and oracles
# ---------------------------------------------------------------------------


class DocumentError(CCShellError):
    pass


class ParseError(DocumentError):
    def __init__(self, line: int, column: int, reason: str) -> None:
        self.line = line
        self.column = column
        self.reason = reason
        super().__init__(f"line {line}, column {column}: {reason}")


class ValidationError(DocumentError):
    def __init__(
        self, reason: str, degree: int | None = None, column: str | None = None
    ) -> None:
        self.reason = reason
        self.degree = degree
        self.column = column
        super().__init__(reason)


class OracleError(CCShellError):
    pass


class TooLarge(OracleError):
    pass
