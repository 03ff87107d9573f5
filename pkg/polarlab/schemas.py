"""
Request and report documents shared by the CLI and the HTTP service.
"""
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from polarlab.config import BUILTIN_FAMILIES, Tolerances, get_section_index

Mode = Literal["mueller-analyze", "channel-analyze", "synth", "validate", "sweep"]
ReportFormat = Literal["structured-report", "table"]


class GridSpec(BaseModel):
    start: float
    stop: float
    count: int = Field(ge=1)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """'start:stop:count'"""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"Grid must look like start:stop:count, got '{text}'")
        return cls(start=float(parts[0]), stop=float(parts[1]), count=int(parts[2]))


class AnalysisRequest(BaseModel):
    mode: Mode
    input_path: Optional[str] = None
    probes: List[List[float]] = Field(default_factory=list)
    grid: Optional[GridSpec] = None
    family: Optional[str] = None
    output_path: Optional[str] = None
    format: ReportFormat = "structured-report"
    seed: Optional[int] = None
    rank: int = Field(4, ge=1, le=4)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @field_validator("probes")
    @classmethod
    def check_probes(cls, probes: List[List[float]]) -> List[List[float]]:
        for probe in probes:
            if len(probe) not in (3, 4):
                raise ValueError("Probe must be a spinor [re, im, re, im] or a Bloch vector [x, y, z]")
        return probes

    @field_validator("family")
    @classmethod
    def check_family(cls, family: Optional[str]) -> Optional[str]:
        if family is not None and family not in BUILTIN_FAMILIES:
            raise ValueError(f"Unknown family '{family}'. Known: {BUILTIN_FAMILIES}")
        return family

    @model_validator(mode="after")
    def check_mode_fields(self) -> "AnalysisRequest":
        needs_input = self.mode in ("mueller-analyze", "channel-analyze", "validate")
        if needs_input and not self.input_path:
            raise ValueError(f"Mode '{self.mode}' requires an input path")
        if self.mode == "synth" and not self.input_path and self.seed is None:
            raise ValueError("Mode 'synth' requires an ensemble file or a seed")
        if self.mode == "sweep":
            if self.grid is None:
                raise ValueError("Mode 'sweep' requires a grid")
            if not self.input_path and not self.family:
                raise ValueError("Mode 'sweep' requires an ensemble family or a retarder_family file")
        return self


class ReportDocument(BaseModel):
    """One document per run; field order is the fixed section order."""
    meta: Dict[str, Any]
    validity: Optional[Dict[str, Any]] = None
    spectrum: Optional[Dict[str, Any]] = None
    purity: Optional[Dict[str, Any]] = None
    components: Optional[Dict[str, Any]] = None
    discriminant: Optional[Dict[str, Any]] = None
    holonomy: Optional[Dict[str, Any]] = None
    phases: Optional[List[Dict[str, Any]]] = None
    channel: Optional[Dict[str, Any]] = None
    sweep: Optional[List[Dict[str, Any]]] = None
    error: Optional[Dict[str, Any]] = None

    @property
    def exit_code(self) -> int:
        return 0 if self.error is None else int(self.error.get("exit_code", 1))

    def sections(self) -> List[Tuple[str, Any]]:
        return sorted(self.model_dump(exclude_none=True).items(), key=lambda item: get_section_index(item[0]))

    def ordered(self) -> Dict[str, Any]:
        return dict(self.sections())
