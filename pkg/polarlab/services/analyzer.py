"""
Analysis service: runs the Mueller, channel, ensemble and sweep pipelines and
assembles their results into report sections.
Errors stop a pipeline but keep the sections computed so far.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from polarlab.channel_lab import (
    KrausSet,
    channel_core,
    check_trace_preservation,
    choi_from_kraus,
    partial_trace_output,
)
from polarlab.characteristic import CharacteristicDecomposition, characteristic_decompose
from polarlab.coherency import ValidityReport, mueller_to_cov, validate_mueller
from polarlab.config import VERSION, Tolerances
from polarlab.ensemble_lab import (
    JonesEnsemble,
    ensemble_to_mueller,
    ensemble_visibility,
    get_family,
    make_grid,
    random_physical_mueller,
    sweep_visibility,
    visibility_sample,
)
from polarlab.errors import NonPhysicalError, ParseError, PolarLabError
from polarlab.holonomy import (
    HolonomyReport,
    PhaseSample,
    axis_probe,
    core_visibility,
    extract_amg,
    phase_sweep,
)
from polarlab.matrix_kernels import so3_exp
from polarlab.pauli_core import IDENTITY2, bloch_to_spinor, spinor_to_bloch, su2_to_so3
from polarlab.schemas import AnalysisRequest, ReportDocument
from polarlab.services import file_manager as fm

logger = logging.getLogger(__name__)

Sections = Dict[str, Any]


def max_abs(a) -> float:
    return float(np.max(np.abs(np.asarray(a))))


# ==================== SECTION BUILDERS ====================

def validity_section(report: ValidityReport) -> Dict[str, Any]:
    return {
        "verdict": report.verdict.value,
        "eigenvalues": report.eigenvalues,
        "min_eigenvalue": report.min_eigenvalue,
        "clamped_eigenvalues": report.clamped_eigenvalues,
        "offending_magnitude": report.offending_magnitude,
        "reason": report.reason,
        "rank": report.rank if report.is_physical else None,
    }


def spectrum_section(h_hat: np.ndarray, lambdas, eigenvectors, jones_list, degenerate_flags) -> Dict[str, Any]:
    vecs = np.asarray(eigenvectors)
    lambdas = np.asarray(lambdas)
    reconstruction = (vecs * lambdas) @ vecs.conj().T
    return {
        "lambdas": lambdas,
        "degenerate_flags": list(degenerate_flags),
        "jones": jones_list,
        "orthonormality_residual": max_abs(vecs.conj().T @ vecs - np.eye(vecs.shape[1])),
        "reconstruction_residual": max_abs(reconstruction - h_hat),
    }


def purity_section(purity, weights=None) -> Dict[str, Any]:
    section = {"P1": purity.P1, "P2": purity.P2, "P3": purity.P3}
    if weights is not None:
        section["weights"] = list(weights)
    return section


def components_section(decomp: CharacteristicDecomposition, tol: float, hermitian_tol: float) -> Dict[str, Any]:
    verdicts = {
        name: validate_mueller(m, tol=tol, hermitian_tol=hermitian_tol).verdict.value
        for name, m in (("M_J", decomp.M_J), ("M_2", decomp.M_2), ("M_3", decomp.M_3), ("M_delta0", decomp.M_delta0))
    }
    if decomp.M_np is not None:
        verdicts["M_np"] = validate_mueller(decomp.M_np, tol=tol, hermitian_tol=hermitian_tol).verdict.value
    return {
        "m00": decomp.m00,
        "M_hat": decomp.mueller_normalized,
        "M_J": decomp.M_J,
        "M_2": decomp.M_2,
        "M_3": decomp.M_3,
        "M_delta0": decomp.M_delta0,
        "M_np": decomp.M_np,
        "M_disc": decomp.M_disc,
        "disc_weight": decomp.disc_weight,
        "dominant_jones": decomp.dominant_jones,
        "unique_core": not decomp.no_coherent_core,
        "reconstruction_residual": decomp.reconstruction_residual(),
        "grouping_residual": decomp.grouping_residual(),
        "verdicts": verdicts,
    }


def discriminant_section(rho_disc: np.ndarray, nonregular: bool) -> Dict[str, Any]:
    return {
        "rho_disc": rho_disc,
        "trace": float(np.trace(rho_disc).real),
        "max_imaginary": max_abs(np.asarray(rho_disc).imag),
        "nonregular": nonregular,
    }


def holonomy_section(report: HolonomyReport, m_j3: np.ndarray) -> Dict[str, Any]:
    return {
        "m_R": report.m_R,
        "m_D": report.m_D,
        "G_a": report.G_a,
        "axis": report.axis_angle.axis,
        "angle": report.axis_angle.angle,
        "U_canonical": report.U_canonical,
        "P1": report.P1,
        "flags": report.flags,
        "polar_residual": max_abs(report.m_R @ report.m_D - m_j3),
        "exp_residual": max_abs(so3_exp(report.G_a) - report.m_R),
        "lift_residual": max_abs(su2_to_so3(report.U_canonical) - report.m_R),
    }


def phase_entry(psi: np.ndarray, sample: PhaseSample) -> Dict[str, Any]:
    """Phase is always reported together with its modulus"""
    return {
        "probe_spinor": psi,
        "probe_bloch": sample.probe,
        "geometric_phase": sample.geometric_phase,
        "coherent_visibility_modulus": sample.coherent_visibility_modulus,
    }


def oracle_entry(psi: np.ndarray, visibility: complex, tol: float) -> Dict[str, Any]:
    sample = visibility_sample(0.0, visibility, tol)
    return {
        "probe_spinor": psi,
        "probe_bloch": spinor_to_bloch(psi),
        "visibility": sample.visibility,
        "arg": sample.arg,
        "modulus": sample.modulus,
    }


# ==================== SERVICE ====================

class Analyzer:
    """
    Runs one pipeline per request.
    Tolerances are fixed per instance; the module defaults are authoritative.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        self.tolerances = tolerances or Tolerances()

    def with_tolerances(self, tolerances: Tolerances) -> "Analyzer":
        if tolerances == self.tolerances:
            return self
        return Analyzer(tolerances)

    def probe_spinors(self, probes: Sequence[Sequence[float]]) -> List[np.ndarray]:
        return [fm.parse_probe(p) for p in probes]

    def meta(self, mode: str, source: str, digest: str) -> Dict[str, Any]:
        return {
            "tool": "polarlab",
            "version": VERSION,
            "mode": mode,
            "input": source,
            "input_digest": digest,
            "tolerances": self.tolerances.model_dump(),
        }

    # ---------- pipelines (fill `sections` in place, raise on failure) ----------

    def validate(self, mueller: np.ndarray, sections: Sections) -> ValidityReport:
        validity = validate_mueller(mueller, tol=self.tolerances.clamp, hermitian_tol=self.tolerances.hermitian)
        sections["validity"] = validity_section(validity)
        if not validity.is_physical:
            raise NonPhysicalError(
                f"Mueller matrix is not physically realizable ({validity.reason}, "
                f"offending magnitude {validity.offending_magnitude:.3e})"
            )
        return validity

    def analyze_mueller(self, mueller: np.ndarray, probes: Sequence, sections: Sections):
        t = self.tolerances
        self.validate(mueller, sections)

        decomp = characteristic_decompose(
            mueller,
            clamp_tol=t.clamp,
            coherent_core_tol=t.coherent_core,
            gap_tol=t.degenerate_gap,
            nonregular_tol=t.nonregular,
            hermitian_tol=t.hermitian,
        )
        spectral = decomp.spectral
        sections["spectrum"] = spectrum_section(
            mueller_to_cov(decomp.mueller_normalized),
            spectral.lambdas / spectral.lambdas.sum(),
            spectral.eigenvectors,
            spectral.jones_list,
            spectral.degenerate_flags,
        )
        sections["purity"] = purity_section(decomp.purity, decomp.weights)
        sections["components"] = components_section(decomp, t.clamp, t.hermitian)
        sections["discriminant"] = discriminant_section(decomp.discriminant, decomp.nonregular_flag)

        report = extract_amg(decomp, singular_tol=t.singular, pi_tol=t.pi_branch)
        sections["holonomy"] = holonomy_section(report, decomp.M_J[1:, 1:])

        psis = self.probe_spinors(probes) or [axis_probe(report)]
        sections["phases"] = []
        for psi, sample in zip(psis, phase_sweep(decomp, report, psis, tol=t.phase_undefined)):
            sections["phases"].append(phase_entry(psi, sample))

    def analyze_channel(self, doc: Dict[str, Any], probes: Sequence, sections: Sections):
        t = self.tolerances
        kraus: Optional[KrausSet] = None
        if "kraus" in doc:
            kraus = fm.parse_kraus_document(doc)
            choi = choi_from_kraus(kraus)
            rho, completeness = choi.rho, choi.completeness_deviation
        elif "choi" in doc:
            rho, completeness = fm.parse_choi_document(doc, tol=t.hermitian), None
        else:
            raise ParseError("Channel document needs a 'kraus' or 'choi' key")

        tp, tp_deviation = check_trace_preservation(rho, tol=t.tp)
        channel = {
            "source": "kraus" if kraus is not None else "choi",
            "kraus_count": len(kraus.ops) if kraus is not None else None,
            "completeness_deviation": completeness,
            "choi": rho,
            "choi_trace": float(np.trace(rho).real),
            "input_marginal": partial_trace_output(rho),
            "trace_preserving": tp,
            "tp_deviation": tp_deviation,
        }
        sections["channel"] = channel

        core = channel_core(
            rho,
            clamp_tol=t.clamp,
            coherent_core_tol=t.coherent_core,
            gap_tol=t.degenerate_gap,
            tp_tol=t.tp,
            nonregular_tol=t.nonregular,
            hermitian_tol=t.hermitian,
        )
        sections["purity"] = purity_section(core.purity)
        sections["discriminant"] = discriminant_section(core.discriminant, core.nonregular_flag)
        channel.update({
            "lambdas": core.lambdas,
            "pauli_transfer": core.mueller,
            "K_dominant": core.K_dominant,
            "tp_core": core.tp_core_flag,
            "dissipative": core.dissipative_flag,
            "V_unitary": core.V_unitary,
            "P_positive": core.P_positive,
            "polar_degenerate": core.polar_degenerate,
            "polar_residual": max_abs(core.V_unitary @ core.P_positive - core.K_dominant),
            "global_phase": core.global_phase,
            "axis": core.su2_generator.axis,
            "angle": core.su2_generator.angle,
            "pi_branch": core.su2_generator.pi_branch_flag,
            "U_canonical": core.U_canonical,
        })

        u = core.U_canonical
        psis = self.probe_spinors(probes)
        if not psis:
            psis = [IDENTITY2[:, 0] if core.su2_generator.angle == 0.0 else bloch_to_spinor(core.su2_generator.axis)]
        sections["phases"] = []
        for psi in psis:
            sample = core_visibility(u, core.K_dominant, core.P1, psi, tol=t.phase_undefined)
            sections["phases"].append(phase_entry(psi, sample))

    def synth(self, ensemble: Optional[JonesEnsemble], seed: Optional[int], rank: int,
              probes: Sequence, sections: Sections):
        components: Dict[str, Any] = {}
        if ensemble is not None:
            mueller = ensemble_to_mueller(ensemble)
            components.update({"source": "jones_ensemble", "members": len(ensemble.members),
                               "weights": ensemble.weights})
        else:
            mueller = random_physical_mueller(seed, rank=rank)
            components.update({"source": "seed", "seed": seed, "rank": rank})
        components["mueller"] = mueller
        sections["components"] = components
        self.validate(mueller, sections)

        if ensemble is not None and probes:
            sections["phases"] = [
                oracle_entry(psi, ensemble_visibility(ensemble, psi), self.tolerances.phase_undefined)
                for psi in self.probe_spinors(probes)
            ]

    def sweep(self, builder: Callable[[float], JonesEnsemble], grid: np.ndarray, psi: np.ndarray,
              sections: Sections):
        curve = sweep_visibility(builder, grid, psi, tol=self.tolerances.phase_undefined)
        sections["sweep"] = fm.curve_rows(curve)

    # ---------- request orchestration ----------

    def _load(self, req: AnalysisRequest) -> Tuple[Optional[Dict[str, Any]], Optional[np.ndarray], str, str]:
        """(structured document, Mueller grid, source name, digest)"""
        if not req.input_path:
            source = req.family or (f"seed:{req.seed}" if req.seed is not None else "")
            return None, None, source, fm.document_digest({"family": req.family, "seed": req.seed, "rank": req.rank})
        path = Path(req.input_path)
        text = fm.read_text(path)
        digest = fm.input_digest(path)
        if fm.is_structured(path, text):
            return fm.parse_document_text(text), None, path.name, digest
        if req.mode in ("mueller-analyze", "validate"):
            return None, fm.parse_mueller_grid(text), path.name, digest
        raise ParseError(f"Mode '{req.mode}' needs a structured document, got a plain grid")

    def run_request(self, req: AnalysisRequest) -> ReportDocument:
        try:
            doc, grid_matrix, source, digest = self._load(req)
        except PolarLabError as e:
            logger.info(f"{req.mode} stopped while loading: {e.code}: {e.message}")
            sections: Sections = {"meta": self.meta(req.mode, req.input_path or "", ""), "error": e.to_dict()}
            return ReportDocument(**fm.to_jsonable(sections))
        return self.run_loaded(req, doc, grid_matrix, source, digest)

    def run_loaded(self, req: AnalysisRequest, doc: Optional[Dict[str, Any]], grid_matrix: Optional[np.ndarray],
                   source: str, digest: str) -> ReportDocument:
        """Run on already-parsed input; used directly by the HTTP layer"""
        sections: Sections = {"meta": self.meta(req.mode, source, digest)}
        try:
            self.run_document(req, doc, grid_matrix, sections)
        except PolarLabError as e:
            logger.info(f"{req.mode} stopped: {e.code}: {e.message}")
            sections["error"] = e.to_dict()
        return ReportDocument(**fm.to_jsonable(sections))

    def run_document(self, req: AnalysisRequest, doc: Optional[Dict[str, Any]],
                     grid_matrix: Optional[np.ndarray], sections: Sections):
        mode = req.mode
        if mode in ("mueller-analyze", "validate"):
            mueller = grid_matrix if grid_matrix is not None else fm.parse_mueller_document(doc)
            if mode == "validate":
                self.validate(mueller, sections)
            else:
                self.analyze_mueller(mueller, req.probes, sections)
        elif mode == "channel-analyze":
            self.analyze_channel(doc, req.probes, sections)
        elif mode == "synth":
            ensemble = fm.parse_ensemble_document(doc) if doc is not None else None
            self.synth(ensemble, req.seed, req.rank, req.probes, sections)
        elif mode == "sweep":
            builder = get_family(req.family) if doc is None else fm.parse_retarder_family_document(doc)
            probes = self.probe_spinors(req.probes) or [IDENTITY2[:, 0]]
            self.sweep(builder, make_grid(req.grid.start, req.grid.stop, req.grid.count), probes[0], sections)

    def run_batch(self, req: AnalysisRequest, directory: Path, max_workers: int = 4) -> List[Tuple[Path, ReportDocument]]:
        """One independent report per supported file in the directory"""
        files = fm.list_input_files(directory)
        if not files:
            logger.warning(f"No input files found in {directory}")
            return []

        def run_one(path: Path) -> ReportDocument:
            return self.run_request(req.model_copy(update={"input_path": str(path)}))

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            reports = list(pool.map(run_one, files))
        return list(zip(files, reports))


# Singleton instance (lazy loaded)
_analyzer: Optional[Analyzer] = None


def get_analyzer() -> Analyzer:
    """Get or create the analyzer singleton"""
    global _analyzer
    if _analyzer is None:
        _analyzer = Analyzer()
    return _analyzer
