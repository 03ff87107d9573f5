"""
Pauli/Stokes conventions and the spinor, Bloch, Jones and Mueller conversions
shared by every other module.

Basis (fixed once, polarization-optics ordering):
    SIGMA[0] = identity
    SIGMA[1] = diag(1, -1)                 horizontal/vertical
    SIGMA[2] = [[0, 1], [1, 0]]            +/-45 degrees
    SIGMA[3] = [[0, -1j], [1j, 0]]         circular (the purely imaginary one)

Stokes vectors are length-4 arrays with s0 first; the Bloch vector is the last
three components of a normalized Stokes vector.
"""
import logging

import numpy as np

from polarlab.config import NORM_TOL, UNITARY_TOL
from polarlab.errors import InvalidSpinorError, InvalidUnitaryError

logger = logging.getLogger(__name__)

SIGMA = np.array([
    [[1, 0], [0, 1]],
    [[1, 0], [0, -1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
], dtype=complex)

IDENTITY2 = SIGMA[0]


def as_spinor(psi, tol: float = NORM_TOL) -> np.ndarray:
    """Return psi as a complex pair, rejecting non-normalized input"""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (2,):
        raise InvalidSpinorError(f"Spinor must have 2 components, got {psi.size}")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > tol:
        raise InvalidSpinorError(f"Spinor is not normalized (|psi|^2 = {norm:.3e})")
    return psi


def check_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    """Return u as a complex 2x2 array, rejecting non-unitary input"""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise InvalidUnitaryError(f"Expected a 2x2 matrix, got shape {u.shape}")
    deviation = np.max(np.abs(u.conj().T @ u - IDENTITY2))
    if deviation > tol:
        raise InvalidUnitaryError(f"Matrix is not unitary (max |U^dag U - I| = {deviation:.3e})")
    return u


def spinor_to_bloch(psi) -> np.ndarray:
    """u_i = <psi|SIGMA_i|psi> for i = 1..3"""
    psi = as_spinor(psi)
    return np.array([np.vdot(psi, SIGMA[i] @ psi).real for i in range(1, 4)])


def bloch_to_spinor(u) -> np.ndarray:
    """
    Spinor on the north-pole-aligned section: c0 real and nonnegative.
    Non-unit vectors are rescaled onto the sphere.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape != (3,):
        raise InvalidSpinorError(f"Bloch vector must have 3 components, got {u.size}")
    norm = np.linalg.norm(u)
    if norm < NORM_TOL:
        raise InvalidSpinorError("Bloch vector has zero length")
    u = u / norm
    c0 = np.sqrt(max(0.0, (1.0 + u[0]) / 2.0))
    if c0 < 1e-12:
        return np.array([0.0, 1.0], dtype=complex)
    c1 = (u[1] + 1j * u[2]) / (2.0 * c0)
    psi = np.array([c0, c1], dtype=complex)
    return psi / np.linalg.norm(psi)


def stokes_from_spinor(psi) -> np.ndarray:
    """Normalized Stokes four-vector (1, u)"""
    return np.concatenate(([1.0], spinor_to_bloch(psi)))


def degree_of_polarization(s) -> float:
    s = np.asarray(s, dtype=float)
    if s[0] <= 0:
        return 0.0
    return float(np.linalg.norm(s[1:]) / s[0])


def jones_to_mueller(jones) -> np.ndarray:
    """m_ij = 1/2 Tr(SIGMA_i J SIGMA_j J^dag); insensitive to the global phase of J"""
    jones = np.asarray(jones, dtype=complex)
    jdag = jones.conj().T
    mueller = np.einsum("iab,bc,jcd,da->ij", SIGMA, jones, SIGMA, jdag)
    return 0.5 * mueller.real


def su2_to_so3(u) -> np.ndarray:
    """Adjoint representation R_ij = 1/2 Tr(SIGMA_i U SIGMA_j U^dag), i, j = 1..3"""
    u = check_unitary(u)
    return jones_to_mueller(u)[1:, 1:]


def apply_mueller(mueller, stokes) -> np.ndarray:
    return np.asarray(mueller, dtype=float) @ np.asarray(stokes, dtype=float)


def pauli_vector(axis) -> np.ndarray:
    """n . SIGMA for a real 3-vector n"""
    axis = np.asarray(axis, dtype=float)
    return np.einsum("k,kab->ab", axis, SIGMA[1:])


def retarder(phi: float, axis) -> np.ndarray:
    """exp(-i phi n.SIGMA / 2) for a unit axis n"""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.cos(phi / 2.0) * IDENTITY2 - 1j * np.sin(phi / 2.0) * pauli_vector(axis)
