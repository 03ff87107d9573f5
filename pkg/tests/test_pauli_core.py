"""
Unit tests for the pauli_core module.
"""
import numpy as np
import pytest

from polarlab.errors import InvalidSpinorError, InvalidUnitaryError
from polarlab.pauli_core import (
    SIGMA,
    apply_mueller,
    bloch_to_spinor,
    degree_of_polarization,
    jones_to_mueller,
    retarder,
    spinor_to_bloch,
    stokes_from_spinor,
    su2_to_so3,
)

from .helpers import random_spinor, random_unitary

HORIZONTAL_POLARIZER = 0.5 * (SIGMA[0] + SIGMA[1])


def test_pauli_basis_relations():
    for i in range(4):
        np.testing.assert_allclose(SIGMA[i], SIGMA[i].conj().T)
        np.testing.assert_allclose(SIGMA[i] @ SIGMA[i], SIGMA[0])
        for j in range(4):
            assert np.trace(SIGMA[i] @ SIGMA[j]) == pytest.approx(2.0 if i == j else 0.0)
    for i in range(1, 4):
        assert np.trace(SIGMA[i]) == pytest.approx(0.0)
    assert np.all(SIGMA[3].real == 0)


@pytest.mark.parametrize("psi, expected", [
    ([1, 0], [1, 0, 0]),
    ([1 / np.sqrt(2), 1 / np.sqrt(2)], [0, 1, 0]),
    ([1 / np.sqrt(2), 1j / np.sqrt(2)], [0, 0, 1]),
])
def test_spinor_to_bloch_eigenstates(psi, expected):
    np.testing.assert_allclose(spinor_to_bloch(psi), expected, atol=1e-12)


def test_spinor_to_bloch_rejects_unnormalized():
    with pytest.raises(InvalidSpinorError):
        spinor_to_bloch([1.0, 1.0])


def test_bloch_to_spinor_round_trip(rng):
    for _ in range(50):
        psi = bloch_to_spinor(spinor_to_bloch(random_spinor(rng)))
        u = spinor_to_bloch(psi)
        np.testing.assert_allclose(spinor_to_bloch(bloch_to_spinor(u)), u, atol=1e-12)
        assert psi[0].imag == 0.0 and psi[0].real >= 0.0


def test_bloch_to_spinor_south_pole():
    np.testing.assert_allclose(bloch_to_spinor([-1, 0, 0]), [0, 1])


def test_stokes_and_degree_of_polarization(rng):
    s = stokes_from_spinor(random_spinor(rng))
    assert s[0] == 1.0
    assert degree_of_polarization(s) == pytest.approx(1.0)
    assert degree_of_polarization([1, 0, 0, 0]) == 0.0


def test_jones_to_mueller_identity():
    np.testing.assert_allclose(jones_to_mueller(SIGMA[0]), np.eye(4), atol=1e-15)


def test_jones_to_mueller_retarder_about_first_axis():
    phi = 0.7
    m = jones_to_mueller(retarder(phi, [1, 0, 0]))
    expected = np.eye(4)
    expected[2:, 2:] = [[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]]
    np.testing.assert_allclose(m, expected, atol=1e-12)


def test_jones_to_mueller_horizontal_polarizer():
    expected = 0.5 * np.array([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    np.testing.assert_allclose(jones_to_mueller(HORIZONTAL_POLARIZER), expected, atol=1e-15)


def test_jones_to_mueller_phase_gauge(rng):
    for _ in range(20):
        j = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        alpha = rng.uniform(-np.pi, np.pi)
        np.testing.assert_allclose(jones_to_mueller(np.exp(1j * alpha) * j), jones_to_mueller(j), atol=1e-12)
        assert jones_to_mueller(j)[0, 0] == pytest.approx(0.5 * np.trace(j.conj().T @ j).real)


def test_su2_to_so3_examples():
    np.testing.assert_allclose(su2_to_so3(SIGMA[0]), np.eye(3), atol=1e-15)
    np.testing.assert_allclose(su2_to_so3(-SIGMA[0]), np.eye(3), atol=1e-15)
    quarter = np.array([[1, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
    np.testing.assert_allclose(su2_to_so3(retarder(np.pi / 2, [1, 0, 0])), quarter, atol=1e-12)


def test_su2_to_so3_rejects_non_unitary():
    with pytest.raises(InvalidUnitaryError):
        su2_to_so3(HORIZONTAL_POLARIZER)


def test_su2_to_so3_is_rotation_and_homomorphism(rng):
    for _ in range(1000):
        u, v = random_unitary(rng), random_unitary(rng)
        r = su2_to_so3(u)
        np.testing.assert_allclose(r.T @ r, np.eye(3), atol=1e-10)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(su2_to_so3(u @ v), r @ su2_to_so3(v), atol=1e-10)


def test_bloch_vector_follows_rotation(rng):
    for _ in range(100):
        u, psi = random_unitary(rng), random_spinor(rng)
        np.testing.assert_allclose(spinor_to_bloch(u @ psi), su2_to_so3(u) @ spinor_to_bloch(psi), atol=1e-10)


def test_apply_mueller_examples(rng):
    s = stokes_from_spinor(random_spinor(rng))
    np.testing.assert_allclose(apply_mueller(np.eye(4), s), s)
    np.testing.assert_allclose(apply_mueller(np.diag([1.0, 0, 0, 0]), s), [1, 0, 0, 0])
    out = apply_mueller(jones_to_mueller(HORIZONTAL_POLARIZER), [1, 0, 1, 0])
    np.testing.assert_allclose(out, [0.5, 0.5, 0, 0], atol=1e-15)


def test_apply_physical_mueller_keeps_degree_of_polarization(rng):
    for _ in range(20):
        m = jones_to_mueller(random_unitary(rng) @ HORIZONTAL_POLARIZER)
        s = apply_mueller(m, stokes_from_spinor(random_spinor(rng)))
        if s[0] > 1e-9:
            assert degree_of_polarization(s) <= 1.0 + 1e-9
