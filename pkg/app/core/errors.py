"""
Errors raised by the holoweb services.

Every input-related failure derives from ``HolowebError``, itself a
``ValueError``, so callers that only care about "bad input" can catch the
builtin. The job layer maps these to exit code 2 and the HTTP layer to 400.
"""


class HolowebError(ValueError):
    """Base class for every rejected input or degenerate construction."""


class PolynomialSyntaxError(HolowebError):
    """
    Raised when polynomial text does not follow the grammar.

    Attributes:
        position (int): Zero-based character offset in the parsed text.
        line (int): One-based line number.
        column (int): One-based column number.
    """

    def __init__(self, message: str, text: str = "", position: int = 0, line_offset: int = 0) -> None:
        self.position = position
        self.line = text.count("\n", 0, position) + 1 + line_offset
        self.column = position - (text.rfind("\n", 0, position) + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column})")


class UnknownIdentifierError(PolynomialSyntaxError):
    """Raised when an identifier is not part of the declared variable list."""


class FormatError(HolowebError):
    """Raised when a web / first-integral file header or layout is malformed."""


class DegreeError(HolowebError):
    """Raised when an operation needs a larger degree in some variable."""


class NotAnInvolutionError(HolowebError):
    pass


class NotHomogeneousError(HolowebError):
    pass


class SquareFactorError(HolowebError):
    """Raised when a form or polynomial carries a repeated factor."""


class CommonFactorError(HolowebError):
    """Raised when all coefficients of a form share a non-unit factor."""


class ChartSearchExhaustedError(HolowebError):
    def __init__(self, budget: int) -> None:
        self.budget = budget
        super().__init__(f"no linear change among {budget} candidate shears makes the dx_n^k coefficient nonzero at 0")


class DegenerateSymbolError(HolowebError):
    pass


class NonTransversePlaneError(HolowebError):
    pass


class DegenerateWebError(HolowebError):
    pass


class ZeroResultantError(HolowebError):
    pass


class NotNormalizableError(HolowebError):
    pass


class NonRealValueError(HolowebError):
    pass


class RootFinderError(HolowebError):
    pass


class LeafTraceError(HolowebError):
    """
    Base class for aborted leaf traces.

    Attributes:
        trace: The partial trace recorded before the abort, when available.
    """

    def __init__(self, message: str, trace=None) -> None:
        self.trace = trace
        super().__init__(message)


class StartNotOnSurfaceError(LeafTraceError):
    pass


class ResidualExceededError(LeafTraceError):
    pass


class NearCriminantError(LeafTraceError):
    pass


class NotSingularError(HolowebError):
    pass


class DegenerateChartError(HolowebError):
    pass


class ConsistencyError(RuntimeError):
    """Raised when an identity that holds by construction fails."""
