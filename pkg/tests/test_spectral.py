import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qalpha.quaternion import modulus_array
from qalpha.rooting import RootingParams, enhance_qspectrum
from qalpha.spectral import (
    dft2_forward,
    dft2_inverse,
    qdft_direct,
    qdft_forward,
    qdft_inverse,
)


def _dft2_oracle(plane):
    n_rows, n_cols = plane.shape
    out = np.zeros(plane.shape, dtype=complex)
    for p in range(n_rows):
        for s in range(n_cols):
            for n in range(n_rows):
                for m in range(n_cols):
                    out[p, s] += plane[n, m] * np.exp(-2j * np.pi * (n * p / n_rows + m * s / n_cols))
    return out


def _rel(a, b):
    return np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300)


def test_delta_gives_flat_spectrum():
    f = np.zeros((6, 5, 4))
    q = np.array([1.0, -2.0, 0.5, 3.0])
    f[0, 0] = q
    F = qdft_forward(f)
    np.testing.assert_allclose(F, np.broadcast_to(q, F.shape), atol=1e-12)


def test_constant_concentrates_at_origin():
    q = np.array([0.3, 1.0, 2.0, -1.5])
    f = np.broadcast_to(q, (4, 6, 4)).copy()
    F = qdft_forward(f)
    expected = np.zeros_like(F)
    expected[0, 0] = 24 * q
    np.testing.assert_allclose(F, expected, atol=1e-12)


def test_single_sample_is_identity():
    f = np.array([[[1.0, 2.0, 3.0, 4.0]]])
    np.testing.assert_array_equal(qdft_forward(f), f)
    np.testing.assert_array_equal(qdft_inverse(f), f)


@pytest.mark.parametrize("shape", [(4, 4), (8, 8), (8, 16), (5, 3)])
@pytest.mark.parametrize("inverse", [False, True])
def test_fast_matches_direct(rng, shape, inverse):
    f = rng.normal(size=shape + (4,))
    fast = qdft_inverse(f) if inverse else qdft_forward(f)
    assert _rel(fast, qdft_direct(f, inverse=inverse)) < 1e-9


@pytest.mark.parametrize("shape", [(16, 16), (9, 14)])
def test_round_trip(rng, shape):
    f = rng.normal(size=shape + (4,))
    np.testing.assert_allclose(qdft_inverse(qdft_forward(f)), f, atol=1e-12)
    np.testing.assert_allclose(qdft_forward(qdft_inverse(f)), f, atol=1e-12)


def test_round_trip_pure_image(rng):
    f = rng.uniform(0, 255, size=(16, 16, 4))
    f[..., 0] = 0
    back = qdft_inverse(qdft_forward(f))
    assert np.max(np.abs(back - f)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(
    arrays(float, (4, 6, 4), elements=st.floats(-100, 100)),
    arrays(float, (4, 6, 4), elements=st.floats(-100, 100)),
    st.floats(-10, 10),
    st.floats(-10, 10),
)
def test_linearity(f, g, a, b):
    lhs = qdft_forward(a * f + b * g)
    rhs = a * qdft_forward(f) + b * qdft_forward(g)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + np.abs(rhs).max()) * 100)


@settings(max_examples=40, deadline=None)
@given(arrays(float, (5, 4, 4), elements=st.floats(-100, 100)))
def test_energy_identity(f):
    F = qdft_forward(f)
    lhs = np.sum(modulus_array(F) ** 2)
    rhs = f.size / 4 * np.sum(modulus_array(f) ** 2)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-8)


def test_rejects_bad_shape():
    with pytest.raises(ValueError):
        qdft_forward(np.zeros((4, 4, 3)))


def test_rooting_pure_input_gives_scalar_part(rng):
    f = rng.uniform(0, 255, size=(8, 8, 4))
    f[..., 0] = 0
    F = enhance_qspectrum(qdft_forward(f), RootingParams(0.8, 0.5, 0.6))
    back = qdft_inverse(F)
    assert np.max(np.abs(back[..., 0])) > 1e-6


def test_dft2_matches_oracle(rng):
    plane = rng.normal(size=(5, 7))
    F = dft2_forward(plane)
    assert _rel(F, _dft2_oracle(plane)) < 1e-12


def test_dft2_round_trip_and_residue(rng):
    plane = rng.uniform(0, 255, size=(12, 10))
    back, residue = dft2_inverse(dft2_forward(plane), return_residue=True)
    np.testing.assert_allclose(back, plane, atol=1e-9)
    assert residue < 1e-9


def test_dft2_residue_warning(caplog):
    spectrum = np.zeros((4, 4), dtype=complex)
    spectrum[0, 1] = 16.0  # not conjugate-symmetric
    with caplog.at_level("WARNING"):
        _, residue = dft2_inverse(spectrum, return_residue=True)
    assert residue > 0.5
    assert "imaginary residue" in caplog.text
