"""
Dense numerical kernels for the small matrices used throughout polarlab:
cyclic Jacobi for Hermitian matrices, SVD-based polar decompositions,
and exponential/logarithm maps on SO(3) and SU(2).
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from polarlab.config import (
    ANTISYMMETRY_TOL,
    DEGENERATE_GAP_TOL,
    HERMITIAN_TOL,
    JACOBI_MAX_SWEEPS,
    JACOBI_TOL,
    PI_BRANCH_TOL,
    ROTATION_TOL,
    SINGULAR_TOL,
    UNITARY_TOL,
)
from polarlab.errors import NonAntisymmetricError, NonHermitianError, NonRotationError
from polarlab.pauli_core import IDENTITY2, SIGMA, check_unitary, pauli_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Descending eigenvalues with eigenvectors as columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate_gaps: Tuple[bool, ...]
    sweeps: int = 0

    @property
    def degenerate(self) -> bool:
        return any(self.degenerate_gaps)

    def vector(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]

    def reconstruct(self) -> np.ndarray:
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.conj().T


@dataclass(frozen=True)
class PolarFactors3:
    rotation: np.ndarray
    stretch: np.ndarray
    degenerate_flag: bool


@dataclass(frozen=True)
class PolarFactors2:
    unitary: np.ndarray
    positive: np.ndarray
    degenerate_flag: bool


@dataclass(frozen=True)
class AxisAngle:
    axis: np.ndarray
    angle: float
    pi_branch_flag: bool = False

    def generator(self) -> np.ndarray:
        return self.angle * hat(self.axis)


# ==================== HELPERS ====================

def hat(v) -> np.ndarray:
    """[v]x, the antisymmetric matrix with [v]x w = v x w"""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def vee(g) -> np.ndarray:
    """Inverse of hat on the antisymmetric part of g"""
    g = np.asarray(g, dtype=float)
    return 0.5 * np.array([g[2, 1] - g[1, 2], g[0, 2] - g[2, 0], g[1, 0] - g[0, 1]])


def _conventional_sign(axis: np.ndarray) -> np.ndarray:
    """First nonzero component positive"""
    for component in axis:
        if abs(component) > 1e-12:
            return axis if component > 0 else -axis
    return axis


def _gauge_fix(vec: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry real positive (ties -> lowest index)"""
    mags = np.abs(vec)
    k = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    if mags[k] == 0:
        return vec
    return vec * (np.conj(vec[k]) / mags[k])


# ==================== EIGENSOLVER ====================

def hermitian_eig(
    h,
    hermitian_tol: float = HERMITIAN_TOL,
    gap_tol: float = DEGENERATE_GAP_TOL,
    tol: float = JACOBI_TOL,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> HermitianSpectrum:
    """
    Cyclic complex Jacobi on a small Hermitian matrix.

    Each rotation first removes the phase of a[p, q] and then applies the
    real Jacobi rotation, so the accumulated transform stays unitary.
    Eigenvalues are returned in descending order with a deterministic
    eigenvector gauge.
    """
    a = np.array(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianError(f"Expected a square matrix, got shape {a.shape}")
    deviation = np.max(np.abs(a - a.conj().T))
    if deviation > hermitian_tol:
        raise NonHermitianError(f"Matrix is not Hermitian (max |H - H^dag| = {deviation:.3e})")
    a = 0.5 * (a + a.conj().T)

    n = a.shape[0]
    vecs = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, np.linalg.norm(a))
    sweeps = 0
    converged = False

    for sweeps in range(1, max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))
        if off < threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[p, q] = s
                g[q, p] = -s * np.conj(phase)
                g[q, q] = c * np.conj(phase)

                a = g.conj().T @ a @ g
                vecs = vecs @ g
    else:
        off = np.sqrt(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))
        converged = off < threshold

    if not converged:
        logger.warning(f"Jacobi did not converge after {max_sweeps} sweeps")
    logger.debug(f"Jacobi finished in {sweeps} sweeps")

    eigenvalues = np.diag(a).real
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vecs = vecs[:, order]
    vecs = np.column_stack([_gauge_fix(vecs[:, k]) for k in range(n)])

    gaps = tuple(bool(eigenvalues[k] - eigenvalues[k + 1] < gap_tol) for k in range(n - 1))
    return HermitianSpectrum(eigenvalues=eigenvalues, eigenvectors=vecs, degenerate_gaps=gaps, sweeps=sweeps)


# ==================== POLAR DECOMPOSITIONS ====================

def polar3(m, singular_tol: float = SINGULAR_TOL) -> PolarFactors3:
    """
    m = rotation @ stretch with rotation in SO(3) and stretch symmetric.
    For det(m) < 0 the stretch carries exactly one negative eigenvalue.
    """
    m = np.asarray(m, dtype=float)
    u, sigma, vt = np.linalg.svd(m)
    d = 1.0 if np.linalg.det(u @ vt) > 0 else -1.0
    signs = np.array([1.0, 1.0, d])
    rotation = (u * signs) @ vt
    stretch = (vt.T * (sigma * signs)) @ vt
    stretch = 0.5 * (stretch + stretch.T)
    degenerate = bool(sigma[-1] < singular_tol)
    if degenerate:
        logger.warning("Singular 3x3 block: rotation factor is not unique")
    return PolarFactors3(rotation=rotation, stretch=stretch, degenerate_flag=degenerate)


def polar2(k, singular_tol: float = SINGULAR_TOL) -> PolarFactors2:
    """K = V @ P with V unitary and P Hermitian PSD"""
    k = np.asarray(k, dtype=complex)
    w, sigma, vh = np.linalg.svd(k)
    unitary = w @ vh
    positive = (vh.conj().T * sigma) @ vh
    positive = 0.5 * (positive + positive.conj().T)
    return PolarFactors2(unitary=unitary, positive=positive, degenerate_flag=bool(sigma[-1] < singular_tol))


# ==================== SO(3) ====================

def check_rotation(r, tol: float = ROTATION_TOL) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise NonRotationError(f"Expected a 3x3 matrix, got shape {r.shape}")
    orth = np.max(np.abs(r.T @ r - np.eye(3)))
    det = np.linalg.det(r)
    if orth > tol or abs(det - 1.0) > tol:
        raise NonRotationError(f"Matrix is not in SO(3) (orthogonality {orth:.3e}, det {det:.6f})")
    return r


def so3_log(r, pi_tol: float = PI_BRANCH_TOL) -> Tuple[np.ndarray, AxisAngle]:
    """
    Principal logarithm of a rotation, theta in [0, pi].
    Near pi the axis comes from the symmetric part; its sign follows the
    antisymmetric part while that is resolvable, otherwise the first nonzero
    component is made positive.
    """
    r = check_rotation(r)
    w = vee(r)  # sin(theta) * n
    sin_theta = np.linalg.norm(w)
    cos_theta = np.clip((np.trace(r) - 1.0) / 2.0, -1.0, 1.0)
    theta = float(np.arctan2(sin_theta, cos_theta))

    if theta < np.pi - pi_tol:
        if sin_theta == 0.0:
            return np.zeros((3, 3)), AxisAngle(axis=np.zeros(3), angle=0.0)
        axis = w / sin_theta
        return theta * hat(axis), AxisAngle(axis=axis, angle=theta)

    sym = 0.5 * (r + r.T)
    outer = (sym - cos_theta * np.eye(3)) / (1.0 - cos_theta)
    k = int(np.argmax(np.diag(outer)))
    axis = outer[:, k] / np.sqrt(outer[k, k])
    axis = axis / np.linalg.norm(axis)
    alignment = float(axis @ w)
    if abs(alignment) > 1e-12:
        axis = axis if alignment > 0 else -axis
    else:
        axis = _conventional_sign(axis)
    return theta * hat(axis), AxisAngle(axis=axis, angle=theta, pi_branch_flag=True)


def so3_exp(g, tol: float = ANTISYMMETRY_TOL) -> np.ndarray:
    """Rodrigues form of exp(G) for antisymmetric G"""
    g = np.asarray(g, dtype=float)
    deviation = np.max(np.abs(g + g.T))
    if deviation > tol:
        raise NonAntisymmetricError(f"Generator is not antisymmetric (max |G + G^T| = {deviation:.3e})")
    theta = np.linalg.norm(vee(g))
    g2 = g @ g
    if theta < 1e-8:
        return np.eye(3) + g + 0.5 * g2
    return np.eye(3) + (np.sin(theta) / theta) * g + ((1.0 - np.cos(theta)) / theta ** 2) * g2


# ==================== SU(2) ====================

def su2_strip_phase(v, tol: float = UNITARY_TOL) -> Tuple[np.ndarray, float]:
    """V = exp(i alpha) W with det W = 1, alpha = arg(det V)/2 in (-pi/2, pi/2]"""
    v = check_unitary(v, tol)
    alpha = float(np.angle(np.linalg.det(v))) / 2.0
    if alpha <= -np.pi / 2:
        alpha += np.pi
    return v * np.exp(-1j * alpha), alpha


def su2_exp(angle: float, axis) -> np.ndarray:
    """cos(theta/2) I - i sin(theta/2) n.SIGMA"""
    return np.cos(angle / 2.0) * IDENTITY2 - 1j * np.sin(angle / 2.0) * pauli_vector(axis)


def su2_log(w, pi_tol: float = PI_BRANCH_TOL) -> AxisAngle:
    """
    (theta, n) with theta in [0, pi] such that +/-W = su2_exp(theta, n).
    The sign of W is absorbed so that the scalar part is nonnegative.
    """
    w = np.asarray(w, dtype=complex)
    a0 = 0.5 * np.trace(w).real
    a = np.array([-0.5 * np.trace(SIGMA[k] @ w).imag for k in range(1, 4)])
    if a0 < 0:
        a0, a = -a0, -a
    s = np.linalg.norm(a)
    theta = float(2.0 * np.arctan2(s, a0))
    if s == 0.0:
        return AxisAngle(axis=np.zeros(3), angle=0.0)
    axis = a / s
    pi_branch = theta >= np.pi - pi_tol
    if pi_branch and a0 < 1e-12:
        axis = _conventional_sign(axis)
    return AxisAngle(axis=axis, angle=theta, pi_branch_flag=pi_branch)
