"""
Antisymmetric Mueller generator of the pure characteristic core, its
canonical SU(2) lift, and interferometric phase/visibility at probe states.

Phases are arg(<psi|U|psi>) for the det = 1 lift, wrapped to (-pi, pi].
The lift carries no global dynamical phase, so no subtraction is applied.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from polarlab.characteristic import CharacteristicDecomposition
from polarlab.config import PHASE_UNDEFINED_TOL, PI_BRANCH_TOL, SINGULAR_TOL
from polarlab.errors import NoCoherentCoreError, PhaseUndefinedError
from polarlab.matrix_kernels import AxisAngle, polar3, so3_log, su2_exp
from polarlab.pauli_core import as_spinor, bloch_to_spinor, check_unitary, spinor_to_bloch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HolonomyReport:
    m_R: np.ndarray
    m_D: np.ndarray
    G_a: np.ndarray
    axis_angle: AxisAngle
    U_canonical: np.ndarray
    P1: float
    dominant_jones: np.ndarray
    degenerate_flag: bool = False

    @property
    def pi_branch_flag(self) -> bool:
        return self.axis_angle.pi_branch_flag

    @property
    def flags(self) -> dict:
        return {
            "degenerate": self.degenerate_flag,
            "pi_branch": self.pi_branch_flag,
            "no_coherent_core": False,
        }


@dataclass(frozen=True)
class PhaseSample:
    probe: np.ndarray
    geometric_phase: float
    coherent_visibility_modulus: float


def wrap_phase(phase: float) -> float:
    """Wrap to (-pi, pi]"""
    wrapped = float(np.angle(np.exp(1j * phase)))
    if wrapped <= -np.pi:
        wrapped += 2.0 * np.pi
    return wrapped


def complex_phase(z: complex) -> float:
    return wrap_phase(float(np.angle(z)))


def extract_amg(
    decomp: CharacteristicDecomposition,
    singular_tol: float = SINGULAR_TOL,
    pi_tol: float = PI_BRANCH_TOL,
) -> HolonomyReport:
    """Polar-decompose the 3x3 block of M^_J and take the log of its rotation factor"""
    if decomp.no_coherent_core:
        reason = "degenerate dominant eigenvalue" if decomp.core_degenerate else f"P1 = {decomp.purity.P1:.3e}"
        raise NoCoherentCoreError(f"Holonomy undefined: no coherent core ({reason})")

    m_j = decomp.M_J[1:, 1:]
    factors = polar3(m_j, singular_tol=singular_tol)
    g_a, axis_angle = so3_log(factors.rotation, pi_tol=pi_tol)
    u_canonical = su2_exp(axis_angle.angle, axis_angle.axis)

    return HolonomyReport(
        m_R=factors.rotation,
        m_D=factors.stretch,
        G_a=g_a,
        axis_angle=axis_angle,
        U_canonical=u_canonical,
        P1=decomp.purity.P1,
        dominant_jones=decomp.dominant_jones,
        degenerate_flag=factors.degenerate_flag,
    )


def pancharatnam_phase(u, psi, tol: float = PHASE_UNDEFINED_TOL) -> PhaseSample:
    """arg and modulus of <psi|U|psi>"""
    u = check_unitary(u)
    psi = as_spinor(psi)
    overlap = np.vdot(psi, u @ psi)
    modulus = float(abs(overlap))
    if modulus < tol:
        raise PhaseUndefinedError(f"Phase undefined: |<psi|U|psi>| = {modulus:.3e}")
    return PhaseSample(
        probe=spinor_to_bloch(psi),
        geometric_phase=complex_phase(overlap),
        coherent_visibility_modulus=modulus,
    )


def coherent_visibility(
    decomp: CharacteristicDecomposition,
    report: HolonomyReport,
    psi,
    tol: float = PHASE_UNDEFINED_TOL,
) -> PhaseSample:
    """
    Phase from the canonical lift; modulus P1 * |<psi|J0 psi>| / ||J0 psi||,
    i.e. the coherent weight times the degree of coherence of the core.
    """
    return core_visibility(report.U_canonical, report.dominant_jones, decomp.purity.P1, psi, tol=tol)


def core_visibility(u_canonical, dominant, p1: float, psi, tol: float = PHASE_UNDEFINED_TOL) -> PhaseSample:
    """Shared by Mueller and channel cores: dominant is a Jones or Kraus representative"""
    psi = as_spinor(psi)
    sample = pancharatnam_phase(u_canonical, psi, tol=tol)
    evolved = np.asarray(dominant, dtype=complex) @ psi
    amplitude = float(np.linalg.norm(evolved))
    coherence = 0.0 if amplitude < tol else float(abs(np.vdot(psi, evolved))) / amplitude
    return PhaseSample(
        probe=sample.probe,
        geometric_phase=sample.geometric_phase,
        coherent_visibility_modulus=p1 * min(coherence, 1.0),
    )


def axis_probe(report: HolonomyReport) -> np.ndarray:
    """Spinor aligned with the rotation axis, (1, 0) for the identity"""
    if report.axis_angle.angle == 0.0:
        return np.array([1.0, 0.0], dtype=complex)
    return bloch_to_spinor(report.axis_angle.axis)


def phase_sweep(
    decomp: CharacteristicDecomposition,
    report: HolonomyReport,
    probes: Iterable,
    tol: float = PHASE_UNDEFINED_TOL,
) -> List[PhaseSample]:
    """Evaluate a batch of probes; order follows the input"""
    return [coherent_visibility(decomp, report, psi, tol=tol) for psi in probes]
