"""
Unit tests for the coherency module.
"""
import numpy as np
import pytest

from polarlab.coherency import (
    Verdict,
    clamp_spectrum,
    cov_to_mueller,
    mueller_to_cov,
    spectral_components,
    validate_mueller,
    vec_jones,
)
from polarlab.errors import NonPhysicalError
from polarlab.pauli_core import jones_to_mueller

from .helpers import random_psd, random_unitary

OMEGA = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_identity_maps_to_maximally_entangled_projector():
    np.testing.assert_allclose(mueller_to_cov(np.eye(4)), np.outer(OMEGA, OMEGA), atol=1e-15)


def test_ideal_depolarizer_maps_to_maximally_mixed():
    np.testing.assert_allclose(mueller_to_cov(np.diag([1.0, 0, 0, 0])), np.eye(4) / 4, atol=1e-15)
    np.testing.assert_allclose(cov_to_mueller(np.eye(4) / 4), np.diag([1.0, 0, 0, 0]), atol=1e-15)
    np.testing.assert_allclose(cov_to_mueller(np.outer(OMEGA, OMEGA)), np.eye(4), atol=1e-15)


def test_covariance_map_is_linear(rng):
    for _ in range(20):
        m1, m2 = rng.normal(size=(4, 4)), rng.normal(size=(4, 4))
        a, b = rng.normal(size=2)
        np.testing.assert_allclose(
            mueller_to_cov(a * m1 + b * m2), a * mueller_to_cov(m1) + b * mueller_to_cov(m2), atol=1e-13
        )


def test_pure_jones_gives_rank_one_covariance(rng):
    for _ in range(20):
        j = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = mueller_to_cov(jones_to_mueller(j))
        v = vec_jones(j)
        np.testing.assert_allclose(h, 0.5 * np.outer(v, v.conj()), atol=1e-12)
        eigenvalues = np.linalg.eigvalsh(h)
        assert eigenvalues[-1] == pytest.approx(0.5 * np.trace(j.conj().T @ j).real)


def test_covariance_is_hermitian_with_trace_m00(rng):
    m = rng.normal(size=(4, 4))
    h = mueller_to_cov(m)
    np.testing.assert_allclose(h, h.conj().T, atol=1e-15)
    assert np.trace(h).real == pytest.approx(m[0, 0])


def test_round_trip(rng):
    for _ in range(50):
        m = rng.normal(size=(4, 4))
        np.testing.assert_allclose(cov_to_mueller(mueller_to_cov(m)), m, atol=1e-12)
        h = random_psd(rng, 4)
        np.testing.assert_allclose(mueller_to_cov(cov_to_mueller(h)), h, atol=1e-12)


def test_validate_identity():
    report = validate_mueller(np.eye(4))
    assert report.verdict is Verdict.PHYSICAL
    np.testing.assert_allclose(report.eigenvalues, [1, 0, 0, 0], atol=1e-12)
    assert report.rank == 1


def test_validate_ideal_depolarizer():
    report = validate_mueller(np.diag([1.0, 0, 0, 0]))
    assert report.is_physical
    np.testing.assert_allclose(report.clamped_eigenvalues, [0.25] * 4)
    assert report.rank == 4


def test_validate_flipped_circular_component_is_nonphysical():
    report = validate_mueller(np.diag([1.0, 1.0, 1.0, -1.0]))
    assert report.verdict is Verdict.NONPHYSICAL
    np.testing.assert_allclose(report.eigenvalues, [0.5, 0.5, 0.5, -0.5], atol=1e-12)
    assert report.offending_magnitude == pytest.approx(0.5)


def test_validate_non_positive_m00():
    report = validate_mueller(-np.eye(4))
    assert not report.is_physical
    assert "m00" in report.reason


def test_validate_non_finite():
    m = np.eye(4)
    m[1, 2] = np.nan
    assert validate_mueller(m).verdict is Verdict.NONPHYSICAL


def test_validate_scaled_input_uses_relative_tolerance():
    # min covariance eigenvalue -2e-9: inside -1e-9 * m00 for m00 = 5
    m = 5.0 * np.eye(4)
    m[3, 3] -= 8e-9
    report = validate_mueller(m)
    assert report.min_eigenvalue == pytest.approx(-2e-9, abs=1e-13)
    assert report.is_physical
    unit = np.eye(4)
    unit[3, 3] -= 8e-9
    assert not validate_mueller(unit).is_physical


def test_clamp_preserves_trace():
    clamped = clamp_spectrum(np.array([0.6, 0.3, 0.1 + 1e-10, -1e-10]), 1.0)
    assert clamped[-1] == 0.0
    assert clamped.sum() == pytest.approx(1.0)


def test_spectral_components_are_normalized_jones(rng):
    for _ in range(20):
        h = random_psd(rng, 4)
        comps = spectral_components(h)
        assert comps.lambdas.sum() == pytest.approx(1.0)
        for j in comps.jones_list:
            assert jones_to_mueller(j)[0, 0] == pytest.approx(1.0, abs=1e-10)
        weighted = sum(lam * jones_to_mueller(j) for lam, j in zip(comps.lambdas, comps.jones_list))
        np.testing.assert_allclose(weighted, cov_to_mueller(h), atol=1e-10)


def test_spectral_components_of_pure_matrix(rng):
    u = random_unitary(rng)
    comps = spectral_components(mueller_to_cov(jones_to_mueller(u)))
    np.testing.assert_allclose(comps.lambdas, [1, 0, 0, 0], atol=1e-12)
    np.testing.assert_allclose(jones_to_mueller(comps.jones_list[0]), jones_to_mueller(u), atol=1e-10)


def test_spectral_components_reject_negative_spectrum():
    with pytest.raises(NonPhysicalError):
        spectral_components(mueller_to_cov(np.diag([1.0, 1.0, 1.0, -1.0])))
