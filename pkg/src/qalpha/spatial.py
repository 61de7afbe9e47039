"""Intensity transforms applied after spectral enhancement."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .color_image import RasterImage, RealQImage
from .quaternion import modulus_array


class PostKind(str, enum.Enum):
    NONE = "none"
    LOG = "log"
    GAMMA = "gamma"
    HISTEQ = "histeq"


@dataclass(frozen=True)
class PostTransform:
    kind: PostKind = PostKind.NONE
    c: float = 1.0
    p: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PostKind(self.kind))
        if self.kind is PostKind.LOG and not (self.c > 0 and self.p > 0):
            raise ValueError("log transform needs c > 0 and p > 0")
        if self.kind is PostKind.GAMMA and not (self.c > 0 and self.gamma > 0):
            raise ValueError("gamma transform needs c > 0 and gamma > 0")

    def __call__(self, x):
        return apply_scalar(x, self)

    def describe(self) -> str:
        if self.kind is PostKind.LOG:
            return f"log(c={self.c:g},p={self.p:g})"
        if self.kind is PostKind.GAMMA:
            return f"gamma(c={self.c:g},gamma={self.gamma:g})"
        return self.kind.value


def log_transform(plane, c: float = 1.0, p: float = 1.0) -> np.ndarray:
    """``s = c·[ln(1 + r)]^p``."""
    return c * np.power(np.log1p(np.asarray(plane, dtype=float)), p)


def gamma_transform(plane, c: float = 1.0, gamma: float = 1.0) -> np.ndarray:
    """``s = c·r^γ``."""
    return c * np.power(np.asarray(plane, dtype=float), gamma)


def apply_scalar(x, post: PostTransform) -> np.ndarray:
    if post.kind is PostKind.NONE:
        return np.asarray(x, dtype=float)
    if post.kind is PostKind.LOG:
        return log_transform(x, post.c, post.p)
    if post.kind is PostKind.GAMMA:
        return gamma_transform(x, post.c, post.gamma)
    raise ValueError(f"{post.kind.value} is not a pointwise scalar transform")


ScalarMap = Union[PostTransform, Callable[[np.ndarray], np.ndarray]]


def apply_to_magnitude(q_img: RealQImage, transform: ScalarMap, eps: float = 1e-12) -> RealQImage:
    """Transform each pixel's quaternion modulus, keeping its direction.

    Every output pixel is ``T(|q|) · q / |q|``: all four components share one
    positive factor, so axis and phase are untouched.  Pixels with modulus
    below ``eps`` become zero.
    """
    if isinstance(transform, PostTransform) and transform.kind not in (PostKind.LOG, PostKind.GAMMA):
        raise ValueError("magnitude application supports log and gamma only")
    samples = np.asarray(q_img.samples, dtype=float)
    m_in = modulus_array(samples)
    ok = m_in >= eps
    factor = np.zeros_like(m_in)
    factor[ok] = transform(m_in[ok]) / m_in[ok]
    return RealQImage(samples * factor[..., None], q_img.color_model)


def equalize_plane(plane) -> np.ndarray:
    """Classic CDF equalisation of one 8-bit plane onto [0, 255]."""
    levels = np.clip(np.rint(np.asarray(plane, dtype=float)), 0, 255).astype(np.int64)
    counts = np.bincount(levels.ravel(), minlength=256)
    cdf = np.cumsum(counts)
    cdf_min = cdf[counts.nonzero()[0][0]]
    total = levels.size
    if total == cdf_min:
        return levels.astype(float)
    lut = np.rint((cdf - cdf_min) / (total - cdf_min) * 255.0)
    return np.clip(lut, 0, 255)[levels]


def hist_equalize(img: RasterImage) -> RasterImage:
    out = np.stack([equalize_plane(img.plane(k)) for k in range(img.channels)], axis=2)
    return RasterImage(out, img.color_model)
