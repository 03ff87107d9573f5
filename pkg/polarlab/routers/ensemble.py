"""
Ensemble endpoints - synthesis and streamed visibility sweeps
"""
from io import BytesIO
from typing import List, Optional

from fastapi import APIRouter, HTTPException, Query
from fastapi.responses import StreamingResponse
from pydantic import Field

from polarlab.config import BUILTIN_FAMILIES
from polarlab.errors import PolarLabError
from polarlab.routers.responses import ProbeBody, build_request, checked, status_for
from polarlab.schemas import GridSpec
from polarlab.services import file_manager as fm
from polarlab.services.analyzer import get_analyzer

router = APIRouter(prefix="/api/ensemble", tags=["ensemble"])


class SynthBody(ProbeBody):
    jones_ensemble: Optional[List] = None
    seed: Optional[int] = None
    rank: int = Field(4, ge=1, le=4)


@router.post("/synth")
async def synth_ensemble(body: SynthBody):
    """Mueller matrix from a Jones ensemble (or a seed), with oracle visibilities"""
    if body.jones_ensemble is None and body.seed is None:
        raise HTTPException(status_code=400, detail={"code": "parse_error", "message": "Give 'jones_ensemble' or 'seed'"})
    doc = {"jones_ensemble": body.jones_ensemble} if body.jones_ensemble is not None else None

    req = build_request("synth", probes=body.probes, seed=body.seed, rank=body.rank, tolerances=body.tolerances)
    digest = fm.document_digest(doc if doc is not None else {"seed": body.seed, "rank": body.rank})
    try:
        report = get_analyzer().with_tolerances(body.tolerances).run_loaded(req, doc, None, "request", digest)
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Synthesis failed: {e}")
    return checked(report)


@router.get("/sweep")
async def sweep_family(
    family: str = Query(BUILTIN_FAMILIES[0]),
    start: float = 0.0,
    stop: float = 3.0,
    count: int = Query(200, ge=1),
    probe: Optional[str] = Query(None, description="spinor re,im,re,im or Bloch x,y,z"),
):
    """Visibility curve of a builtin family as CSV"""
    if family not in BUILTIN_FAMILIES:
        raise HTTPException(status_code=404, detail=f"Unknown family '{family}'")
    try:
        probes = [fm.parse_probe_text(probe)] if probe else []
    except PolarLabError as e:
        raise HTTPException(status_code=status_for(e.code), detail={"code": e.code, "message": e.message})

    req = build_request("sweep", source=None, family=family, probes=probes,
                        grid=GridSpec(start=start, stop=stop, count=count))
    try:
        report = get_analyzer().run_loaded(req, None, None, family, fm.document_digest({"family": family}))
    except Exception as e:
        raise HTTPException(status_code=500, detail=f"Sweep failed: {e}")
    checked(report)

    buffer = BytesIO(fm.sweep_to_csv(report.sweep).encode("utf-8"))
    return StreamingResponse(
        buffer,
        media_type="text/csv",
        headers={"Content-Disposition": f"attachment; filename={family}_sweep.csv"},
    )
