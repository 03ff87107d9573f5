"""
Indices of polarimetric purity and the characteristic decomposition

    M^ = P1 M^_J + (P2 - P1) M^_(2) + (P3 - P2) M^_(3) + (1 - P3) M^_D0

together with the grouped non-pure component, the discriminant remainder of
the covariance matrix and the nonregularity flag.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from polarlab.config import (
    CLAMP_TOL,
    COHERENT_CORE_TOL,
    DEGENERATE_GAP_TOL,
    HERMITIAN_TOL,
    NONREGULAR_TOL,
    PURE_TOL,
    SPECTRUM_SUM_TOL,
)
from polarlab.coherency import (
    SpectralComponents,
    mueller_to_cov,
    spectral_components,
    validate_mueller,
)
from polarlab.errors import InvalidSpectrumError, NonPhysicalError
from polarlab.pauli_core import jones_to_mueller

logger = logging.getLogger(__name__)

IDEAL_DEPOLARIZER = np.diag([1.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True)
class PurityIndices:
    P1: float
    P2: float
    P3: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.P1, self.P2, self.P3)


@dataclass(frozen=True)
class CharacteristicDecomposition:
    mueller_normalized: np.ndarray
    m00: float
    purity: PurityIndices
    spectral: SpectralComponents
    M_J: np.ndarray
    M_2: np.ndarray
    M_3: np.ndarray
    M_delta0: np.ndarray
    M_np: Optional[np.ndarray]
    M_disc: np.ndarray
    discriminant: np.ndarray
    nonregular_flag: bool
    no_coherent_core: bool
    core_degenerate: bool
    degenerate_flags: Tuple[bool, ...] = field(default_factory=tuple)

    @property
    def weights(self) -> Tuple[float, float, float, float]:
        p1, p2, p3 = self.purity.as_tuple()
        return (p1, p2 - p1, p3 - p2, 1.0 - p3)

    @property
    def disc_weight(self) -> float:
        return self.purity.P3 - self.purity.P1

    @property
    def dominant_jones(self) -> np.ndarray:
        return self.spectral.jones_list[0]

    def reconstruct(self) -> np.ndarray:
        w = self.weights
        return w[0] * self.M_J + w[1] * self.M_2 + w[2] * self.M_3 + w[3] * self.M_delta0

    def reconstruction_residual(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.mueller_normalized)))

    def grouping_residual(self) -> float:
        """Residual of M^ = P1 M^_J + (1 - P1) M^_np"""
        p1 = self.purity.P1
        if self.M_np is None:
            grouped = self.M_J
        else:
            grouped = p1 * self.M_J + (1.0 - p1) * self.M_np
        return float(np.max(np.abs(grouped - self.mueller_normalized)))


def compute_ipp(lambdas, tol: float = SPECTRUM_SUM_TOL) -> PurityIndices:
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (4,):
        raise InvalidSpectrumError(f"Expected 4 eigenvalues, got {lam.size}")
    if np.any(np.diff(lam) > tol):
        raise InvalidSpectrumError(f"Eigenvalues are not in descending order: {lam.tolist()}")
    if lam[-1] < -tol:
        raise InvalidSpectrumError(f"Negative eigenvalue {lam[-1]:.3e}")
    if abs(lam.sum() - 1.0) > tol:
        raise InvalidSpectrumError(f"Eigenvalues must sum to 1, got {lam.sum():.12f}")
    l0, l1, l2, l3 = lam
    return PurityIndices(
        P1=float(l0 - l1),
        P2=float(l0 + l1 - 2.0 * l2),
        P3=float(l0 + l1 + l2 - 3.0 * l3),
    )


def discriminant_component(
    h,
    spectral: SpectralComponents,
    purity: PurityIndices,
    tol: float = NONREGULAR_TOL,
) -> Tuple[np.ndarray, bool]:
    """
    rho_disc = H^ - P1 v0 v0^dag - (1 - P3) I/4, tested for imaginary
    content in the canonical covariance basis.
    """
    h = np.asarray(h, dtype=complex)
    h_hat = h / np.trace(h).real
    v0 = spectral.vector(0)
    n = h.shape[0]
    rho_disc = h_hat - purity.P1 * np.outer(v0, v0.conj()) - (1.0 - purity.P3) * np.eye(n) / n
    rho_disc = 0.5 * (rho_disc + rho_disc.conj().T)
    nonregular = bool(np.max(np.abs(rho_disc.imag)) > tol)
    return rho_disc, nonregular


def characteristic_decompose(
    mueller,
    clamp_tol: float = CLAMP_TOL,
    coherent_core_tol: float = COHERENT_CORE_TOL,
    gap_tol: float = DEGENERATE_GAP_TOL,
    nonregular_tol: float = NONREGULAR_TOL,
    hermitian_tol: float = HERMITIAN_TOL,
) -> CharacteristicDecomposition:
    mueller = np.asarray(mueller, dtype=float)
    validity = validate_mueller(mueller, tol=clamp_tol, hermitian_tol=hermitian_tol)
    if not validity.is_physical:
        raise NonPhysicalError(
            f"Mueller matrix is not physically realizable ({validity.reason}, "
            f"min covariance eigenvalue {validity.min_eigenvalue:.3e})"
        )

    m00 = float(mueller[0, 0])
    m_hat = mueller / m00
    h = mueller_to_cov(m_hat)
    spectral = spectral_components(h, tol=clamp_tol, hermitian_tol=hermitian_tol, gap_tol=gap_tol)
    lambdas = spectral.lambdas / spectral.lambdas.sum()
    purity = compute_ipp(lambdas)

    pure = [jones_to_mueller(j) for j in spectral.jones_list]
    m_j = pure[0]
    m_2 = (pure[0] + pure[1]) / 2.0
    m_3 = (pure[0] + pure[1] + pure[2]) / 3.0
    p1, p2, p3 = purity.as_tuple()

    m_disc = (p2 - p1) * m_2 + (p3 - p2) * m_3
    m_np = None
    if p1 < 1.0 - PURE_TOL:
        m_np = (m_disc + (1.0 - p3) * IDEAL_DEPOLARIZER) / (1.0 - p1)

    rho_disc, nonregular = discriminant_component(h, spectral, purity, tol=nonregular_tol)

    core_degenerate = bool(lambdas[0] - lambdas[1] < gap_tol)
    no_core = bool(p1 < coherent_core_tol or core_degenerate)
    if no_core:
        logger.info(f"No coherent core (P1 = {p1:.3e}); M^_J is not unique")

    return CharacteristicDecomposition(
        mueller_normalized=m_hat,
        m00=m00,
        purity=purity,
        spectral=spectral,
        M_J=m_j,
        M_2=m_2,
        M_3=m_3,
        M_delta0=IDEAL_DEPOLARIZER.copy(),
        M_np=m_np,
        M_disc=m_disc,
        discriminant=rho_disc,
        nonregular_flag=nonregular,
        no_coherent_core=no_core,
        core_degenerate=core_degenerate,
        degenerate_flags=spectral.degenerate_flags,
    )
