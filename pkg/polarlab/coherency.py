"""
Mueller <-> covariance conversions, physical realizability, and the ordered
spectral pure components.

Covariance convention: H = 1/4 sum_ij m_ij (SIGMA_i kron conj(SIGMA_j)).
With this choice an eigenvector v reshapes row-major straight into a Jones
matrix (row = output index, column = input index), and H coincides with the
trace-normalized Choi state of rho -> J rho J^dag for unitary J.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from polarlab.config import CLAMP_TOL, DEGENERATE_GAP_TOL, HERMITIAN_TOL
from polarlab.errors import NonPhysicalError
from polarlab.matrix_kernels import HermitianSpectrum, hermitian_eig
from polarlab.pauli_core import SIGMA

logger = logging.getLogger(__name__)

# BASIS[i, j] = SIGMA_i kron conj(SIGMA_j)
BASIS = np.array([[np.kron(SIGMA[i], SIGMA[j].conj()) for j in range(4)] for i in range(4)])


class Verdict(str, Enum):
    PHYSICAL = "PHYSICAL"
    NONPHYSICAL = "NONPHYSICAL"


@dataclass(frozen=True)
class ValidityReport:
    verdict: Verdict
    eigenvalues: np.ndarray
    min_eigenvalue: float
    clamped_eigenvalues: Optional[np.ndarray] = None
    offending_magnitude: float = 0.0
    reason: str = ""

    @property
    def is_physical(self) -> bool:
        return self.verdict is Verdict.PHYSICAL

    @property
    def rank(self) -> int:
        values = self.clamped_eigenvalues if self.clamped_eigenvalues is not None else self.eigenvalues
        scale = max(float(np.sum(np.abs(values))), 1e-300)
        return int(np.sum(values > CLAMP_TOL * scale))


@dataclass(frozen=True)
class SpectralComponents:
    lambdas: np.ndarray
    jones_list: List[np.ndarray]
    eigenvectors: np.ndarray
    degenerate_flags: Tuple[bool, ...] = field(default_factory=tuple)

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]


def mueller_to_cov(mueller) -> np.ndarray:
    mueller = np.asarray(mueller, dtype=float)
    return 0.25 * np.einsum("ij,ijab->ab", mueller, BASIS)


def cov_to_mueller(h) -> np.ndarray:
    """m_ij = Tr(H (SIGMA_i kron conj(SIGMA_j)))"""
    h = np.asarray(h, dtype=complex)
    return np.einsum("ab,ijba->ij", h, BASIS).real


def vec_jones(jones) -> np.ndarray:
    """Row-major vectorization: (output, input) -> 2 * output + input"""
    return np.asarray(jones, dtype=complex).reshape(4)


def unvec_jones(vector) -> np.ndarray:
    return np.asarray(vector, dtype=complex).reshape(2, 2)


def clamp_spectrum(eigenvalues: np.ndarray, trace: float, tol: float = CLAMP_TOL) -> np.ndarray:
    """Zero small negatives and rescale so the eigenvalues keep summing to the trace"""
    clamped = np.where(eigenvalues < 0.0, 0.0, eigenvalues)
    total = clamped.sum()
    if total > 0 and np.any(eigenvalues < 0.0):
        logger.debug(f"Clamped {int(np.sum(eigenvalues < 0.0))} negative eigenvalue(s)")
        clamped = clamped * (trace / total)
    return clamped


def validate_mueller(mueller, tol: float = CLAMP_TOL, hermitian_tol: float = HERMITIAN_TOL) -> ValidityReport:
    """Cloude test: physical iff the covariance matrix is PSD (within tolerance)"""
    mueller = np.asarray(mueller, dtype=float)
    if not np.all(np.isfinite(mueller)):
        nan = np.full(4, np.nan)
        return ValidityReport(Verdict.NONPHYSICAL, nan, float("nan"), reason="non-finite entries")
    m00 = float(mueller[0, 0])
    spectrum = hermitian_eig(mueller_to_cov(mueller), hermitian_tol=hermitian_tol)
    eigenvalues = spectrum.eigenvalues
    min_eig = float(eigenvalues[-1])

    if m00 <= 0:
        return ValidityReport(
            Verdict.NONPHYSICAL, eigenvalues, min_eig,
            offending_magnitude=abs(m00), reason="m00 must be positive",
        )
    if min_eig < -tol * m00:
        return ValidityReport(
            Verdict.NONPHYSICAL, eigenvalues, min_eig,
            offending_magnitude=-min_eig, reason="negative covariance eigenvalue",
        )
    clamped = clamp_spectrum(eigenvalues, m00, tol)
    return ValidityReport(Verdict.PHYSICAL, eigenvalues, min_eig, clamped_eigenvalues=clamped)


def spectral_components(
    h,
    tol: float = CLAMP_TOL,
    hermitian_tol: float = HERMITIAN_TOL,
    gap_tol: float = DEGENERATE_GAP_TOL,
) -> SpectralComponents:
    """
    Eigen-decomposition of H with each eigenvector reshaped into a Jones matrix
    normalized to Tr(J^dag J) = 2 (unit mean intensity).
    """
    h = np.asarray(h, dtype=complex)
    spectrum: HermitianSpectrum = hermitian_eig(h, hermitian_tol=hermitian_tol, gap_tol=gap_tol)
    trace = float(np.trace(h).real)
    if spectrum.eigenvalues[-1] < -tol * max(trace, 1e-300):
        raise NonPhysicalError(f"Covariance matrix has eigenvalue {spectrum.eigenvalues[-1]:.3e}")
    lambdas = clamp_spectrum(spectrum.eigenvalues, trace, tol)
    jones_list = [np.sqrt(2.0) * unvec_jones(spectrum.vector(k)) for k in range(h.shape[0])]
    return SpectralComponents(
        lambdas=lambdas,
        jones_list=jones_list,
        eigenvectors=spectrum.eigenvectors,
        degenerate_flags=spectrum.degenerate_gaps,
    )
