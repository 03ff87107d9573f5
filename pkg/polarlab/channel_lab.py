"""
Qubit channels through their Choi state.

Convention: rho_E = (E x id)(|Omega><Omega|) with normalized
|Omega> = (|00> + |11>)/sqrt(2), first tensor factor = output. This gives
trace 1 for CPTP maps and Tr_out(rho_E) = I/2 exactly, and makes rho_E equal
to the covariance matrix of the channel's Mueller (Pauli transfer) matrix.
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from polarlab.characteristic import PurityIndices, compute_ipp, discriminant_component
from polarlab.coherency import cov_to_mueller, spectral_components, vec_jones
from polarlab.config import (
    CLAMP_TOL,
    COHERENT_CORE_TOL,
    DEGENERATE_GAP_TOL,
    HERMITIAN_TOL,
    KRAUS_COMPLETENESS_WARN,
    NONREGULAR_TOL,
    TP_TOL,
)
from polarlab.errors import InvalidKrausError, NoCoherentCoreError, NonHermitianError, NonPhysicalError
from polarlab.matrix_kernels import AxisAngle, polar2, su2_exp, su2_log, su2_strip_phase
from polarlab.pauli_core import IDENTITY2, SIGMA, check_unitary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KrausSet:
    ops: List[np.ndarray]

    def __post_init__(self):
        if not self.ops:
            raise InvalidKrausError("Kraus set is empty")
        for op in self.ops:
            if np.asarray(op).shape != (2, 2):
                raise InvalidKrausError(f"Kraus operators must be 2x2, got {np.asarray(op).shape}")

    def completeness(self) -> np.ndarray:
        return sum(np.asarray(a).conj().T @ np.asarray(a) for a in self.ops)

    def completeness_deviation(self) -> float:
        return float(np.max(np.abs(self.completeness() - IDENTITY2)))


@dataclass(frozen=True)
class ChoiState:
    rho: np.ndarray
    completeness_deviation: float = 0.0

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)


@dataclass(frozen=True)
class ChannelCoreReport:
    lambdas: np.ndarray
    purity: PurityIndices
    K_dominant: np.ndarray
    tp_core_flag: bool
    V_unitary: np.ndarray
    P_positive: np.ndarray
    global_phase: float
    su2_generator: AxisAngle
    dissipative_flag: bool
    polar_degenerate: bool
    discriminant: np.ndarray
    nonregular_flag: bool
    mueller: np.ndarray

    @property
    def P1(self) -> float:
        return self.purity.P1

    @property
    def U_canonical(self) -> np.ndarray:
        return su2_exp(self.su2_generator.angle, self.su2_generator.axis)


# ==================== STANDARD KRAUS SETS ====================

def kraus_unitary(u) -> KrausSet:
    return KrausSet([check_unitary(u)])


def kraus_amplitude_damping(gamma: float) -> KrausSet:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"Damping probability must be in [0, 1], got {gamma}")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausSet([k0, k1])


def kraus_depolarizing(p: float) -> KrausSet:
    """rho -> (1 - p) rho + p I/2; p = 1 is completely depolarizing"""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Depolarizing probability must be in [0, 1], got {p}")
    ops = [np.sqrt(1.0 - 3.0 * p / 4.0) * SIGMA[0]] + [np.sqrt(p / 4.0) * SIGMA[k] for k in range(1, 4)]
    return KrausSet([op for op in ops if np.any(op != 0)])


# ==================== CHOI ====================

def choi_from_kraus(ks: KrausSet, warn_tol: float = KRAUS_COMPLETENESS_WARN) -> ChoiState:
    """rho = sum_i (A_i x I)|Omega><Omega|(A_i x I)^dag = 1/2 sum_i vec(A_i) vec(A_i)^dag"""
    rho = np.zeros((4, 4), dtype=complex)
    for op in ks.ops:
        v = vec_jones(op)
        rho += 0.5 * np.outer(v, v.conj())
    deviation = ks.completeness_deviation()
    if deviation > warn_tol:
        logger.warning(f"Kraus set is not complete (max |sum A^dag A - I| = {deviation:.3e}); channel is not CPTP")
    return ChoiState(rho=rho, completeness_deviation=deviation)


def partial_trace_output(rho) -> np.ndarray:
    """Trace out the first (output) factor"""
    return np.einsum("aiaj->ij", np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2))


def check_trace_preservation(rho, tol: float = TP_TOL) -> Tuple[bool, float]:
    rho = rho.rho if isinstance(rho, ChoiState) else np.asarray(rho, dtype=complex)
    deviation = float(np.max(np.abs(partial_trace_output(rho) - IDENTITY2 / 2.0)))
    return deviation < tol, deviation


def channel_core(
    rho,
    clamp_tol: float = CLAMP_TOL,
    coherent_core_tol: float = COHERENT_CORE_TOL,
    gap_tol: float = DEGENERATE_GAP_TOL,
    tp_tol: float = TP_TOL,
    nonregular_tol: float = NONREGULAR_TOL,
    hermitian_tol: float = HERMITIAN_TOL,
) -> ChannelCoreReport:
    """
    Dominant rank-one component of the Choi state reshaped into a Kraus
    representative K, and the rotation generator of its unitary polar factor.
    """
    rho = rho.rho if isinstance(rho, ChoiState) else np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise NonHermitianError(f"Choi state must be 4x4, got shape {rho.shape}")
    trace = float(np.trace(rho).real)
    if not np.all(np.isfinite(rho)) or trace <= 0:
        raise NonPhysicalError(f"Choi state must have positive trace, got {trace:.3e}")
    rho = rho / trace

    spectral = spectral_components(rho, tol=clamp_tol, hermitian_tol=hermitian_tol, gap_tol=gap_tol)
    lambdas = spectral.lambdas / spectral.lambdas.sum()
    purity = compute_ipp(lambdas)
    if purity.P1 < coherent_core_tol or lambdas[0] - lambdas[1] < gap_tol:
        raise NoCoherentCoreError(f"Channel has no coherent core (P1 = {purity.P1:.3e})")

    k = spectral.jones_list[0]
    tp_core = bool(np.max(np.abs(k.conj().T @ k - IDENTITY2)) < tp_tol)
    factors = polar2(k)
    w, alpha = su2_strip_phase(factors.unitary)
    generator = su2_log(w)
    rho_disc, nonregular = discriminant_component(rho, spectral, purity, tol=nonregular_tol)

    return ChannelCoreReport(
        lambdas=lambdas,
        purity=purity,
        K_dominant=k,
        tp_core_flag=tp_core,
        V_unitary=factors.unitary,
        P_positive=factors.positive,
        global_phase=alpha,
        su2_generator=generator,
        dissipative_flag=not tp_core,
        polar_degenerate=factors.degenerate_flag,
        discriminant=rho_disc,
        nonregular_flag=nonregular,
        mueller=cov_to_mueller(rho),
    )


def check_choi_hermitian(rho, tol: float) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    deviation = float(np.max(np.abs(rho - rho.conj().T)))
    if deviation > tol:
        raise NonHermitianError(f"Choi matrix is not Hermitian (max |rho - rho^dag| = {deviation:.3e})")
    return rho


def kraus_remix(ks: KrausSet, w) -> KrausSet:
    """A_i -> sum_j w_ij A_j for a unitary mixing matrix w"""
    w = np.asarray(w, dtype=complex)
    ops: Sequence[np.ndarray] = [np.asarray(a, dtype=complex) for a in ks.ops]
    return KrausSet([sum(w[i, j] * ops[j] for j in range(len(ops))) for i in range(w.shape[0])])
