import math

import numpy as np
import pytest

from hmimos.polarization import PhaseConfig, PolarizedExcitation, polarization_descriptors


def test_circular_in_xy_plane():
    exc = PolarizedExcitation(amplitudes=(1.0, 1.0, 0.0), phases=(0.0, math.pi / 2, 0.0))
    w, s, v = polarization_descriptors(exc)
    assert np.allclose(w, [0.0, 0.0, 2.0], atol=1e-14)
    assert np.allclose(v, [0.0, 0.0, 2.0], atol=1e-14)
    assert s[0, 0] == pytest.approx(1.0)
    assert s[2, 2] == pytest.approx(0.0)


def test_linear_polarization_degenerates():
    exc = PolarizedExcitation(amplitudes=(0.7, 0.5, 0.3), phases=(1.1, 1.1, 1.1))
    w, _, v = polarization_descriptors(exc)
    assert np.allclose(w, 0.0, atol=1e-14)
    assert np.allclose(v, 0.0, atol=1e-14)


def test_pseudovector_equals_normal_vector():
    rng = np.random.default_rng(31)
    for _ in range(50):
        exc = PolarizedExcitation(
            amplitudes=tuple(rng.uniform(0, 1, size=3)),
            phases=tuple(rng.uniform(0, 2 * math.pi, size=3)),
        )
        w, _, v = polarization_descriptors(exc)
        # oracle: direct evaluation of both closed forms coincides because
        # -2 Im{E_i E_j*} = -2 E_i E_j sin(theta_i - theta_j)
        assert np.allclose(v, w, atol=1e-12)


def test_spectral_density_structure():
    rng = np.random.default_rng(37)
    for _ in range(20):
        amps = tuple(rng.uniform(0, 1, size=3))
        exc = PolarizedExcitation(amplitudes=amps, phases=tuple(rng.uniform(0, 7, size=3)))
        _, s, _ = polarization_descriptors(exc)
        assert np.allclose(s, s.conj().T, atol=1e-14)
        assert np.allclose(np.diag(s).real, np.array(amps) ** 2, atol=1e-14)


def test_pseudovector_normal_to_field():
    rng = np.random.default_rng(41)
    for _ in range(20):
        exc = PolarizedExcitation(
            amplitudes=tuple(rng.uniform(0, 1, size=3)),
            phases=tuple(rng.uniform(0, 2 * math.pi, size=3)),
        )
        _, _, v = polarization_descriptors(exc)
        field = exc.complex_field()
        assert abs(np.dot(v, field.real)) < 1e-12
        assert abs(np.dot(v, field.imag)) < 1e-12


def test_excitation_validation_and_wrapping():
    exc = PolarizedExcitation(amplitudes=(1.0, 0.2, 0.0), phases=(7.0, -1.0, 2.0))
    assert all(0 <= p < 2 * math.pi for p in exc.phases)
    with pytest.raises(ValueError):
        PolarizedExcitation(amplitudes=(1.2, 0.0, 0.0), phases=(0.0, 0.0, 0.0))


def test_phase_config_blocks():
    exc = [
        PolarizedExcitation(amplitudes=(1.0, 0.5, 0.1), phases=(0.2, 1.0, 2.0)),
        PolarizedExcitation(amplitudes=(0.3, 0.9, 0.7), phases=(2.5, 0.4, 5.0)),
    ]
    cfg = PhaseConfig.from_excitations(exc)
    assert cfg.n_patches == 2
    block = cfg.block(0)
    assert np.count_nonzero(block - np.diag(np.diag(block))) == 0
    full = cfg.full()
    assert full.shape == (6, 6)
    assert np.allclose(full[:3, :3], cfg.block(0))
    assert np.allclose(full[3:, :3], 0.0)
    with pytest.raises(ValueError):
        PhaseConfig(np.full((2, 3), 1.5))
