import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qalpha.color_image import RasterImage, RealQImage
from qalpha.quaternion import modulus_array, polar_array
from qalpha.spatial import (
    PostKind,
    PostTransform,
    apply_to_magnitude,
    equalize_plane,
    gamma_transform,
    hist_equalize,
    log_transform,
)


def test_log_values():
    assert log_transform(0.0) == 0.0
    assert log_transform(math.e - 1) == pytest.approx(1.0)
    assert log_transform(math.e - 1, c=2.0, p=3.3) == pytest.approx(2.0)
    assert log_transform(math.e ** 2 - 1, p=2.0) == pytest.approx(4.0)


def test_gamma_values():
    assert gamma_transform(0.25, gamma=0.5) == pytest.approx(0.5)
    assert gamma_transform(4.0, c=3.0, gamma=1.0) == pytest.approx(12.0)
    for g in (0.35, 0.4, 0.5):
        assert gamma_transform(0.5, gamma=g) == pytest.approx(0.5 ** g)


def test_post_transform_validation():
    with pytest.raises(ValueError):
        PostTransform(PostKind.LOG, c=0)
    with pytest.raises(ValueError):
        PostTransform(PostKind.GAMMA, gamma=-1)
    assert PostTransform("log", c=1, p=3.3).describe() == "log(c=1,p=3.3)"


def test_magnitude_doubling(rng):
    samples = rng.normal(size=(4, 5, 4))
    out = apply_to_magnitude(RealQImage(samples), lambda m: 2 * m)
    np.testing.assert_allclose(out.samples, 2 * samples)


def test_magnitude_zero_pixel():
    samples = np.zeros((2, 2, 4))
    samples[1, 1] = [0, 1, 2, 2]
    out = apply_to_magnitude(RealQImage(samples), PostTransform("log", c=1, p=2))
    assert not out.samples[0, 0].any()
    assert modulus_array(out.samples)[1, 1] == pytest.approx(np.log1p(3.0) ** 2)


def test_magnitude_keeps_direction(rng):
    samples = rng.uniform(-100, 100, size=(6, 6, 4))
    out = apply_to_magnitude(RealQImage(samples), PostTransform("gamma", c=2.0, gamma=0.4))
    m0, a0, p0 = polar_array(samples)
    m1, a1, p1 = polar_array(out.samples)
    np.testing.assert_allclose(a1, a0, atol=1e-12)
    np.testing.assert_allclose(p1, p0, atol=1e-12)
    np.testing.assert_allclose(m1, 2.0 * m0 ** 0.4)


def test_magnitude_rejects_histeq():
    with pytest.raises(ValueError):
        apply_to_magnitude(RealQImage(np.ones((2, 2, 4))), PostTransform("histeq"))


def test_equalize_constant():
    np.testing.assert_array_equal(equalize_plane(np.full((3, 3), 77.0)), 77.0)


def test_equalize_two_levels():
    plane = np.array([[10.0, 10.0], [200.0, 200.0]])
    np.testing.assert_array_equal(equalize_plane(plane), [[0.0, 0.0], [255.0, 255.0]])


def test_equalize_flattens_cdf(rng):
    plane = np.clip(rng.normal(90, 20, size=(128, 128)), 0, 255).round()
    out = equalize_plane(plane)
    assert out.min() == 0 and out.max() == 255
    levels = np.unique(out)
    for v in levels:
        frac = np.mean(out <= v)
        # the equalised CDF tracks the identity line to within one bin plus its mass
        assert abs(frac - v / 255) <= 1 / 256 + np.mean(out == v)


@settings(max_examples=50)
@given(arrays(float, (6, 7), elements=st.integers(0, 255).map(float)))
def test_equalize_monotone(plane):
    out = equalize_plane(plane)
    order = np.argsort(plane.ravel(), kind="stable")
    assert np.all(np.diff(out.ravel()[order]) >= 0)


def test_hist_equalize_raster(rng):
    img = RasterImage(rng.integers(50, 100, size=(8, 8, 3)).astype(float))
    out = hist_equalize(img)
    assert out.data.shape == img.data.shape
    assert (out.data.max(axis=(0, 1)) == 255).all()
