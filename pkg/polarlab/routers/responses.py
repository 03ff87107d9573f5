"""
Translate pipeline errors into HTTP errors.
"""
from typing import Any, Dict, List, Optional

from fastapi import HTTPException
from pydantic import BaseModel, Field, ValidationError

from polarlab.config import Tolerances
from polarlab.schemas import AnalysisRequest, ReportDocument

# Inputs the caller can fix
BAD_REQUEST_CODES = {
    "parse_error",
    "invalid_spinor",
    "invalid_unitary",
    "non_hermitian",
    "non_rotation",
    "non_antisymmetric",
    "invalid_spectrum",
    "invalid_ensemble",
    "invalid_kraus",
}
# Well-formed input the analysis cannot complete
UNPROCESSABLE_CODES = {"nonphysical", "no_coherent_core", "phase_undefined"}


class ProbeBody(BaseModel):
    probes: List[List[float]] = Field(default_factory=list)
    tolerances: Tolerances = Field(default_factory=Tolerances)


def status_for(code: str) -> int:
    if code in BAD_REQUEST_CODES:
        return 400
    if code in UNPROCESSABLE_CODES:
        return 422
    return 500


def checked(report: ReportDocument) -> Dict[str, Any]:
    """Report as JSON, or the HTTP error its error section maps to"""
    if report.error is not None:
        error = report.error
        raise HTTPException(
            status_code=status_for(error["code"]),
            detail={"code": error["code"], "message": error["message"]},
        )
    return report.ordered()


def build_request(mode: str, source: str = "request", **fields: Optional[Any]) -> AnalysisRequest:
    fields = {k: v for k, v in fields.items() if v is not None}
    try:
        return AnalysisRequest(mode=mode, input_path=source, **fields)
    except ValidationError as e:
        raise HTTPException(status_code=400, detail={"code": "parse_error", "message": str(e)})
