"""Exception hierarchy for epdiff-spectral

Argument problems subclass ``ValueError`` so callers that only know the
standard library still catch them; numerical failures subclass
``ArithmeticError`` and carry the location where they happened.
"""

from typing import Any, Dict, Optional, Tuple


class EPDiffError(Exception):
    """Base class for all library errors"""


class InvalidArgumentError(EPDiffError, ValueError):
    """An argument is outside its documented range"""


class GridMismatchError(InvalidArgumentError):
    """Two fields or a field and an operator live on incompatible grids"""


class ConfigError(InvalidArgumentError):
    """A run configuration is incomplete or inconsistent"""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class SymmetryError(EPDiffError):
    """A field that must be real-valued violates Hermitian symmetry"""

    def __init__(self, message: str, defect: Optional[float] = None):
        super().__init__(message)
        self.defect = defect


class BlowUpError(EPDiffError, ArithmeticError):
    """A Runge-Kutta stage produced NaN or Inf"""

    def __init__(self, time: float, stage: int, message: Optional[str] = None):
        self.time = time
        self.stage = stage
        super().__init__(
            message or f"non-finite values in stage {stage} at t={time:.17g}"
        )

    def to_dict(self) -> Dict[str, Any]:
        """Location of the blow-up as a plain dictionary"""
        return {"time": self.time, "stage": self.stage, "message": str(self)}


class FlowDegeneracyError(EPDiffError, ArithmeticError):
    """A transported Jacobian lost orientation (det <= 0)"""

    def __init__(self, time: float, point: Tuple[float, ...], det: float):
        self.time = time
        self.point = point
        self.det = det
        coords = ", ".join(f"{x:.6g}" for x in point)
        super().__init__(
            f"Jacobian determinant {det:.6g} <= 0 at x=({coords}), t={time:.17g}"
        )
