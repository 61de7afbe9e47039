"""Block-based contrast measures: CEME for quaternion images, EME per plane."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .color_image import RasterImage, RealQImage

MIN_CLAMP = 1e-3


@dataclass(frozen=True)
class BlockSpec:
    """Block height ``l1`` (rows) and width ``l2`` (columns)."""

    l1: int = 8
    l2: int = 8

    def __post_init__(self):
        if self.l1 < 1 or self.l2 < 1:
            raise ValueError(f"block sides must be positive, got {self.l1}x{self.l2}")

    @classmethod
    def parse(cls, text: str) -> BlockSpec:
        m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
        if not m:
            raise ValueError(f"block spec must look like 8x8, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def counts(self, shape) -> tuple[int, int]:
        k1, k2 = shape[0] // self.l1, shape[1] // self.l2
        if k1 < 1 or k2 < 1:
            raise ValueError(f"image {shape[0]}x{shape[1]} is smaller than one {self}")
        return k1, k2

    def __str__(self):
        return f"{self.l1}x{self.l2}"


def _block_extrema(stack: np.ndarray, blocks: BlockSpec):
    """Per-block max and min over rows, columns and all planes of ``stack``."""
    k1, k2 = blocks.counts(stack.shape)
    crop = stack[: k1 * blocks.l1, : k2 * blocks.l2]
    tiles = crop.reshape(k1, blocks.l1, k2, blocks.l2, -1)
    return tiles.max(axis=(1, 3, 4)), tiles.min(axis=(1, 3, 4))


def _weber_mean(bmax: np.ndarray, bmin: np.ndarray) -> float:
    lo = np.maximum(bmin, MIN_CLAMP)
    # a block lying entirely below the clamp contributes 0, never a negative value
    hi = np.maximum(bmax, lo)
    vals = 20.0 * np.log10(hi / lo)
    return float(np.mean(vals))


def ceme(img: RealQImage | np.ndarray, blocks: BlockSpec = BlockSpec()) -> float:
    """Mean block contrast ``20·log10(max/min)`` across the four planes.

    Max and min are taken jointly over (e, R, G, B) inside each block;
    incomplete edge blocks are dropped and the min is clamped at 1e-3.
    """
    samples = np.asarray(getattr(img, "samples", img), dtype=float)
    if samples.ndim != 3:
        raise ValueError("ceme expects an (H, W, planes) array")
    return _weber_mean(*_block_extrema(samples, blocks))


def eme(plane, blocks: BlockSpec = BlockSpec()) -> float:
    plane = np.asarray(plane, dtype=float)
    if plane.ndim != 2:
        raise ValueError("eme expects a single 2-D plane")
    return _weber_mean(*_block_extrema(plane[..., None], blocks))


def eme_channels(img: RasterImage | np.ndarray, blocks: BlockSpec = BlockSpec()) -> list[float]:
    data = np.asarray(getattr(img, "data", img), dtype=float)
    return [eme(data[:, :, k], blocks) for k in range(data.shape[2])]


def raster_ceme(img: RasterImage, blocks: BlockSpec = BlockSpec()) -> float:
    """CEME of a plain raster, treated as a pure quaternion image (e = 0)."""
    samples = np.zeros(img.data.shape[:2] + (4,))
    samples[..., 1:4] = img.data[..., :3]
    return ceme(samples, blocks)
