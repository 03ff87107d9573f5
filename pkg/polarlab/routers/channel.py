"""
Qubit channel endpoints - Kraus or Choi input
"""
from typing import List, Optional

from fastapi import APIRouter, HTTPException

from polarlab.routers.responses import ProbeBody, build_request, checked
from polarlab.services import file_manager as fm
from polarlab.services.analyzer import get_analyzer

router = APIRouter(prefix="/api/channel", tags=["channel"])


class ChannelBody(ProbeBody):
    kraus: Optional[List] = None
    choi: Optional[List] = None


@router.post("/analyze")
async def analyze_channel(body: ChannelBody):
    """TP check, channel core and generator"""
    if (body.kraus is None) == (body.choi is None):
        raise HTTPException(status_code=400, detail={"code": "parse_error", "message": "Give exactly one of 'kraus' or 'choi'"})
    doc = {"kraus": body.kraus} if body.kraus is not None else {"choi": body.choi}

    req = build_request("channel-analyze", probes=body.probes, tolerances=body.tolerances)
    try:
        report = get_analyzer().with_tolerances(body.tolerances).run_loaded(req, doc, None, "request", fm.document_digest(doc))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Channel analysis failed: {e}")
    return checked(report)
