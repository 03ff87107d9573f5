"""
Exceptions raised by the analysis pipelines.
Each carries a stable code used by the CLI exit status and the HTTP detail.
"""
from typing import Optional

from polarlab.config import get_exit_code


class PolarLabError(Exception):
    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    @property
    def exit_code(self) -> int:
        return get_exit_code(self.code)

    def to_dict(self) -> dict:
        return {"code": self.code, "exit_code": self.exit_code, "message": self.message}


class InvalidSpinorError(PolarLabError, ValueError):
    code = "invalid_spinor"


class InvalidUnitaryError(PolarLabError, ValueError):
    code = "invalid_unitary"


class NonHermitianError(PolarLabError, ValueError):
    code = "non_hermitian"


class NonRotationError(PolarLabError, ValueError):
    code = "non_rotation"


class NonAntisymmetricError(PolarLabError, ValueError):
    code = "non_antisymmetric"


class InvalidSpectrumError(PolarLabError, ValueError):
    code = "invalid_spectrum"


class InvalidEnsembleError(PolarLabError, ValueError):
    code = "invalid_ensemble"


class NonPhysicalError(PolarLabError):
    code = "nonphysical"


class NoCoherentCoreError(PolarLabError):
    """Holonomy undefined: no dominant coherent component."""
    code = "no_coherent_core"


class PhaseUndefinedError(PolarLabError):
    code = "phase_undefined"


class ParseError(PolarLabError, ValueError):
    code = "parse_error"

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if row is not None:
            location = f" (row {row}" + (f", column {column})" if column is not None else ")")
        super().__init__(message + location)
        self.row = row
        self.column = column

    def to_dict(self) -> dict:
        data = super().to_dict()
        data["row"] = self.row
        data["column"] = self.column
        return data


class InvalidKrausError(PolarLabError, ValueError):
    code = "invalid_kraus"
