"""
Exception hierarchy shared by the tensor algebra, system and CLI layers
"""

from typing import Optional


class MltiError(Exception):
    """Base class for every error raised by this package"""


class ShapeMismatch(MltiError):
    pass


class NotSquare(ShapeMismatch):
    pass


class DimensionMismatch(ShapeMismatch):
    pass


class NonMonotoneGrid(MltiError):
    pass


class ConsistencyError(MltiError):
    """Imaginary residue too large for a result that must be real"""


class ConvergenceFailure(MltiError):
    pass


class MatrixOverflow(MltiError):
    pass


class EvaluatorFailure(MltiError):
    pass


class Unsupported(MltiError):
    pass


class SliceError(MltiError):
    """Error tied to one DFT-domain slice; ``slice_number`` is 1-based"""

    def __init__(self, slice_number: Optional[int], message: str):
        self.slice_number = slice_number
        self.detail = message
        super().__init__(f"slice {slice_number}: {message}" if slice_number else message)


class SingularTensor(SliceError):
    pass


class DefectiveSlice(SliceError):
    pass


class Uncontrollable(SliceError):
    pass


class ConjugacyViolation(SliceError):
    pass


class ParseError(MltiError):
    """Malformed system file; ``field`` names the offending location"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
