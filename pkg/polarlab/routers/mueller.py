"""
Mueller matrix endpoints - validate and analyze
"""
import hashlib
import json
from typing import List, Optional

from fastapi import APIRouter, File, Form, HTTPException, UploadFile
from pydantic import Field

from polarlab.errors import PolarLabError
from polarlab.routers.responses import ProbeBody, build_request, checked, status_for
from polarlab.schemas import ReportDocument
from polarlab.services import file_manager as fm
from polarlab.services.analyzer import get_analyzer

router = APIRouter(prefix="/api/mueller", tags=["mueller"])


class MuellerBody(ProbeBody):
    mueller: List = Field(..., description="row-major 16 reals or a 4x4 nested list")


def run_mueller(mode: str, body: MuellerBody) -> ReportDocument:
    req = build_request(mode, probes=body.probes, tolerances=body.tolerances)
    doc = {"mueller": body.mueller}
    analyzer = get_analyzer().with_tolerances(body.tolerances)
    try:
        report = analyzer.run_loaded(req, doc, None, "request", fm.document_digest(doc))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Analysis failed: {e}")
    return report


@router.post("/validate")
async def validate_mueller(body: MuellerBody):
    """Physical realizability verdict; NONPHYSICAL is a verdict here, not an error"""
    report = run_mueller("validate", body)
    if report.validity is None:
        checked(report)
    return report.validity


@router.post("/analyze")
async def analyze_mueller(body: MuellerBody):
    """Full characteristic analysis with holonomy and probe phases"""
    return checked(run_mueller("mueller-analyze", body))


@router.post("/upload")
async def upload_mueller(file: UploadFile = File(...), probes: Optional[str] = Form(None)):
    """Analyze an uploaded CSV grid or JSON document"""
    content = await file.read()
    name = file.filename or "upload"
    try:
        probe_list = json.loads(probes) if probes else []
        text = content.decode("utf-8")
        structured = name.lower().endswith(".json") or text.lstrip().startswith("{")
        mueller = fm.parse_mueller_text(text, structured)
    except PolarLabError as e:
        raise HTTPException(status_code=status_for(e.code), detail={"code": e.code, "message": e.message})
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise HTTPException(status_code=400, detail={"code": "parse_error", "message": str(e)})

    req = build_request("mueller-analyze", source=name, probes=probe_list)
    try:
        report = get_analyzer().run_loaded(req, None, mueller, name, hashlib.sha256(content).hexdigest())
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Upload analysis failed: {e}")
    return checked(report)
