"""Raster and quaternion image types, colour-space conversion and histograms."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class ColorModel(str, enum.Enum):
    RGB = "RGB"
    XYZ = "XYZ"
    GENERIC4 = "GENERIC4"


class EvenMode(str, enum.Enum):
    """How the scalar (even) part of the quaternion pixel is filled."""

    ZERO = "zero"
    GRAY = "gray"
    CHANNEL4 = "channel4"


@dataclass(frozen=True)
class RasterImage:
    """Colour image as an ``(H, W, C)`` float array with ``C`` in {3, 4}.

    Samples are real scalars, nominally in [0, 255].  XYZ images may exceed
    255 slightly (white maps to X = 0.9505·255, Z = 1.089·255).
    """

    data: np.ndarray
    color_model: ColorModel = ColorModel.RGB

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 3 or data.shape[2] not in (3, 4):
            raise ValueError(f"expected an (H, W, 3|4) array, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "color_model", ColorModel(self.color_model))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def plane(self, k: int) -> np.ndarray:
        return self.data[:, :, k]

    def to_uint8(self) -> np.ndarray:
        return np.clip(np.rint(self.data), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class QuaternionImage:
    """Encoded image: ``samples`` has shape ``(H, W, 4)`` holding (a, b, c, d)."""

    samples: np.ndarray
    even_mode: EvenMode = EvenMode.ZERO
    color_model: ColorModel = ColorModel.RGB

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape[:2]


@dataclass(frozen=True)
class RealQImage:
    """Four real planes (e, R, G, B) of an enhanced quaternion image.

    Unlike :class:`QuaternionImage` there is no encoding guarantee: the
    scalar plane ``e`` is whatever the inverse transform produced.
    """

    samples: np.ndarray
    color_model: ColorModel = ColorModel.RGB

    @property
    def e(self) -> np.ndarray:
        return self.samples[..., 0]

    @property
    def color(self) -> np.ndarray:
        return self.samples[..., 1:]

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape[:2]


def encode(img: RasterImage, even_mode: EvenMode = EvenMode.ZERO) -> QuaternionImage:
    even_mode = EvenMode(even_mode)
    data = img.data
    out = np.zeros(data.shape[:2] + (4,), dtype=float)
    if even_mode is EvenMode.CHANNEL4:
        if img.channels != 4:
            raise ValueError("CHANNEL4 encoding needs a 4-channel image")
        out[:] = data
    else:
        if img.channels != 3:
            raise ValueError(f"{even_mode.value} encoding needs a 3-channel image")
        out[..., 1:] = data
        if even_mode is EvenMode.GRAY:
            out[..., 0] = data.mean(axis=2)
    return QuaternionImage(out, even_mode, img.color_model)


def decode(q: QuaternionImage | RealQImage) -> tuple[RasterImage, np.ndarray]:
    """Split a quaternion image into its colour raster and scalar plane.

    4-channel (CHANNEL4) images come back with all four planes in the raster.
    """
    samples = np.asarray(q.samples, dtype=float)
    if isinstance(q, QuaternionImage) and q.even_mode is EvenMode.CHANNEL4:
        return RasterImage(samples.copy(), q.color_model), np.zeros(samples.shape[:2])
    return RasterImage(samples[..., 1:].copy(), q.color_model), samples[..., 0].copy()


# Linear sRGB -> XYZ (D65); applied without gamma linearisation.
RGB_TO_XYZ = np.array(
    [
        [0.4124, 0.3576, 0.1805],
        [0.2126, 0.7152, 0.0722],
        [0.0193, 0.1192, 0.9505],
    ]
)
XYZ_TO_RGB = np.linalg.inv(RGB_TO_XYZ)


def convert_colorspace(img: RasterImage, target: ColorModel | str) -> RasterImage:
    target = ColorModel(target)
    source = img.color_model
    if source not in (ColorModel.RGB, ColorModel.XYZ) or target not in (ColorModel.RGB, ColorModel.XYZ):
        raise ValueError(f"unsupported conversion {source.value} -> {target.value}")
    if source is target:
        raise ValueError(f"image is already {target.value}")
    matrix = RGB_TO_XYZ if target is ColorModel.XYZ else XYZ_TO_RGB
    out = (img.data / 255.0) @ matrix.T * 255.0
    return RasterImage(out, target)


def negate(img: RasterImage) -> RasterImage:
    return RasterImage(255.0 - img.data, img.color_model)


def _joint_map(planes: np.ndarray, lo: float, hi: float):
    """Gain and offset of the joint min-max map of ``planes`` onto [lo, hi]."""
    pmin = float(planes.min())
    pmax = float(planes.max())
    if pmax == pmin:
        return None
    gain = (hi - lo) / (pmax - pmin)
    return gain, pmin


def rescale_planes(planes, lo: float = 0.0, hi: float = 255.0) -> np.ndarray:
    """Jointly map every sample of ``planes`` onto ``[lo, hi]``.

    A single gain/offset is shared by all planes so ratios between channels
    (and hence hue) survive.  A constant input is clamped into range instead.
    """
    planes = np.asarray(planes, dtype=float)
    m = _joint_map(planes, lo, hi)
    if m is None:
        return np.clip(planes, lo, hi)
    gain, pmin = m
    # the clip only absorbs round-off at the ends
    return np.clip(lo + (planes - pmin) * gain, lo, hi)


def rescale_to_8bit(planes, lo: float = 0.0, hi: float = 255.0,
                    color_model: ColorModel = ColorModel.RGB) -> RasterImage:
    return RasterImage(rescale_planes(planes, lo, hi), color_model)


def rescale_quaternion(q: RealQImage, lo: float = 0.0, hi: float = 255.0) -> RealQImage:
    """Rescale the colour planes jointly; the scalar plane gets the same gain.

    The scalar plane takes no part in the min/max statistics and receives no
    offset, so its zero stays at zero.
    """
    color = q.color
    m = _joint_map(color, lo, hi)
    out = np.empty_like(q.samples, dtype=float)
    if m is None:
        out[..., 1:] = np.clip(color, lo, hi)
        out[..., 0] = q.e
    else:
        gain, pmin = m
        out[..., 1:] = np.clip(lo + (color - pmin) * gain, lo, hi)
        out[..., 0] = q.e * gain
    return RealQImage(out, q.color_model)


def histogram(img: RasterImage) -> np.ndarray:
    """Per-channel 256-bin counts, shape ``(256, C)``.

    Bin k holds samples in [k, k+1); 255 lands in the last bin.
    """
    data = img.data
    out = np.empty((256, img.channels), dtype=np.int64)
    for ch in range(img.channels):
        idx = np.clip(np.floor(data[:, :, ch]).astype(np.int64), 0, 255)
        out[:, ch] = np.bincount(idx.ravel(), minlength=256)
    return out
