"""
sktpol - Errors
Exception hierarchy shared by the models, the parser and the command layer
"""

from typing import Any, Optional


class SktpolError(ValueError):
    """Base class for every error raised on bad input or a violated precondition"""


class DimensionMismatchError(SktpolError):
    """Matrix and vector shapes do not fit together"""


class BidegreeError(SktpolError):
    """A form has the wrong (bi)degree for the requested operation"""


class ValidationError(SktpolError):
    """
    A structure-equation presentation failed one of its checks

    Carries the name of the failed check, the offending generator and the
    nonzero residual so that the report can name them.
    """

    def __init__(self, check: str, generator: str, residual: Any):
        self.check = check
        self.generator = generator
        self.residual = residual
        super().__init__(f"{check} failed on {generator}: residual {residual}")


class NotInNumeratorError(SktpolError):
    """The form is not closed for the cohomology model it is reduced in"""


class NotClosedError(SktpolError):
    """A d-closed (or dbar-closed) form was required"""


class NotPositiveError(SktpolError):
    """A Hermitian matrix is not positive definite"""


class NotSktError(SktpolError):
    """The metric is not pluriclosed"""


class NotPrimitiveError(SktpolError):
    """
    A Bott-Chern class was expected to be primitive

    The Aeppli image of the class is kept on the exception.
    """

    def __init__(self, message: str, image: Any = None):
        self.image = image
        super().__init__(message)


class MissingAlphaError(SktpolError):
    """The equation dbar(omega) = ddbar(alpha) has no invariant solution"""


class MissingVolumeError(SktpolError):
    """No holomorphic volume form is available"""


class DegenerateCoframeError(SktpolError):
    """The deformed coframe and its conjugate are linearly dependent"""


class IntegrabilityError(SktpolError):
    """
    The deformed almost complex structure is not integrable

    The (0,2) components of the deformed differentials are kept on the
    exception as ``defect``.
    """

    def __init__(self, message: str, defect: Optional[list] = None):
        self.defect = defect or []
        super().__init__(message)


class ManifoldFileError(SktpolError):
    """Syntax error in a structure-equation file, with line and column"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownManifoldError(SktpolError):
    """Neither a builtin name nor a readable file"""
