"""
Unit tests for the holonomy module: generator extraction, canonical lift and
interferometric phase at probe states.
"""
import numpy as np
import pytest

from polarlab.characteristic import IDEAL_DEPOLARIZER, characteristic_decompose
from polarlab.ensemble_lab import closed_form_pair_phase, ensemble_to_mueller, retarder_pair
from polarlab.errors import NoCoherentCoreError, PhaseUndefinedError
from polarlab.holonomy import (
    axis_probe,
    coherent_visibility,
    extract_amg,
    pancharatnam_phase,
    phase_sweep,
    wrap_phase,
)
from polarlab.matrix_kernels import hat, so3_exp, su2_exp, su2_log, su2_strip_phase
from polarlab.pauli_core import SIGMA, bloch_to_spinor, jones_to_mueller, retarder

from .helpers import random_axis, random_positive_2x2, random_spinor, random_unitary


def analyze(mueller):
    decomp = characteristic_decompose(mueller)
    return decomp, extract_amg(decomp)


def test_wrap_phase():
    assert wrap_phase(np.pi) == pytest.approx(np.pi)
    assert wrap_phase(-np.pi) == pytest.approx(np.pi)
    assert wrap_phase(3 * np.pi / 2) == pytest.approx(-np.pi / 2)


def test_identity_has_zero_generator():
    decomp, report = analyze(np.eye(4))
    np.testing.assert_allclose(report.G_a, np.zeros((3, 3)), atol=1e-12)
    assert report.axis_angle.angle == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(report.U_canonical, np.eye(2), atol=1e-12)


def test_depolarizer_refuses_holonomy():
    decomp = characteristic_decompose(IDEAL_DEPOLARIZER)
    with pytest.raises(NoCoherentCoreError):
        extract_amg(decomp)


def test_pure_retarder_pipeline(rng):
    for _ in range(100):
        u = random_unitary(rng)
        decomp, report = analyze(jones_to_mueller(u))
        assert decomp.purity.P1 == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(report.m_D, np.eye(3), atol=1e-9)

        aa = su2_log(su2_strip_phase(u)[0])
        np.testing.assert_allclose(report.G_a, aa.angle * hat(aa.axis), atol=1e-9)

        psi = axis_probe(report)
        sample = pancharatnam_phase(report.U_canonical, psi)
        assert sample.geometric_phase == pytest.approx(-report.axis_angle.angle / 2, abs=1e-9)
        np.testing.assert_allclose(sample.probe, report.axis_angle.axis, atol=1e-9)

        visibility = coherent_visibility(decomp, report, psi)
        assert visibility.coherent_visibility_modulus == pytest.approx(1.0, abs=1e-9)


def test_diattenuation_is_phase_neutral(rng):
    for _ in range(100):
        u, p = random_unitary(rng), random_positive_2x2(rng)
        _, pure = analyze(jones_to_mueller(u))
        _, diattenuated = analyze(jones_to_mueller(u @ p))
        assert diattenuated.axis_angle.angle == pytest.approx(pure.axis_angle.angle, abs=1e-9)
        np.testing.assert_allclose(diattenuated.axis_angle.axis, pure.axis_angle.axis, atol=1e-9)


def test_half_turn_sets_branch_flag(rng):
    for _ in range(20):
        decomp, report = analyze(jones_to_mueller(retarder(np.pi, random_axis(rng))))
        assert report.pi_branch_flag
        assert report.flags["pi_branch"]
        np.testing.assert_allclose(so3_exp(report.G_a), report.m_R, atol=1e-9)


def test_retarder_pair_core_phase():
    phi = 1.2
    decomp, report = analyze(ensemble_to_mueller(retarder_pair(phi)))
    sample = coherent_visibility(decomp, report, [1, 0])
    assert sample.geometric_phase == pytest.approx(closed_form_pair_phase(phi), abs=1e-10)
    assert 0.0 < sample.coherent_visibility_modulus <= decomp.purity.P1 + 1e-12
    np.testing.assert_allclose(report.axis_angle.axis, [1 / np.sqrt(2), 1 / np.sqrt(2), 0], atol=1e-10)


def test_visibility_modulus_bounded_by_coherent_weight(rng):
    for _ in range(50):
        j = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        core = jones_to_mueller(j)
        m = 0.7 * core / core[0, 0] + 0.3 * IDEAL_DEPOLARIZER
        decomp, report = analyze(m)
        psi = random_spinor(rng)
        try:
            sample = coherent_visibility(decomp, report, psi)
        except PhaseUndefinedError:
            continue
        assert sample.coherent_visibility_modulus <= decomp.purity.P1 + 1e-12
        assert -np.pi < sample.geometric_phase <= np.pi


def test_phase_undefined_for_orthogonal_evolution():
    # pi rotation about axis 2 sends (1, 0) to an orthogonal state
    with pytest.raises(PhaseUndefinedError):
        pancharatnam_phase(su2_exp(np.pi, [0, 1, 0]), [1, 0])


def test_phase_sweep_preserves_order(rng):
    decomp, report = analyze(jones_to_mueller(random_unitary(rng)))
    probes = [bloch_to_spinor(random_axis(rng)) for _ in range(5)]
    samples = phase_sweep(decomp, report, probes)
    for psi, sample in zip(probes, samples):
        assert sample.geometric_phase == coherent_visibility(decomp, report, psi).geometric_phase


def test_lift_is_special_unitary(rng):
    _, report = analyze(jones_to_mueller(random_unitary(rng)))
    assert np.linalg.det(report.U_canonical) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(report.U_canonical.conj().T @ report.U_canonical, SIGMA[0], atol=1e-12)
