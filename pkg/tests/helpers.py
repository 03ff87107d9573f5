"""
Random constructions shared by the test modules.
"""
import numpy as np

from polarlab.matrix_kernels import hat, so3_exp


def random_unitary(rng) -> np.ndarray:
    """Haar-like 2x2 unitary with a random global phase"""
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
    return q * np.exp(1j * rng.uniform(-np.pi, np.pi))


def random_axis(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_rotation(rng, max_angle: float = np.pi - 1e-3) -> np.ndarray:
    return so3_exp(rng.uniform(0.0, max_angle) * hat(random_axis(rng)))


def random_spinor(rng) -> np.ndarray:
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    return psi / np.linalg.norm(psi)


def random_psd(rng, n: int, rank: int = None) -> np.ndarray:
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    h = g @ g.conj().T
    return h / np.trace(h).real


def random_positive_2x2(rng, max_condition: float = 10.0) -> np.ndarray:
    """Hermitian PD 2x2 with condition number below max_condition"""
    u = random_unitary(rng)
    small = rng.uniform(1.0, max_condition * 0.99)
    d = np.diag([small, 1.0]) * rng.uniform(0.2, 1.0)
    return u @ d @ u.conj().T


def random_spd3(rng, min_eigenvalue: float = 0.1) -> np.ndarray:
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q @ np.diag(rng.uniform(min_eigenvalue + 0.01, 2.0, size=3)) @ q.T
