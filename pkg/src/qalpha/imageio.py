"""Image and table I/O: binary PPM (P6), PNG via Pillow, CSV emitters."""

from __future__ import annotations

import os
from pathlib import Path
from typing import TextIO, Union

import numpy as np

from .color_image import ColorModel, RasterImage, RealQImage, histogram

PathLike = Union[str, os.PathLike]


class ImageFormatError(ValueError):
    pass


def _ppm_tokens(buf: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(buf):
            raise ImageFormatError("truncated PPM header")
        if buf[pos:pos + 1] == b"#":
            while pos < len(buf) and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos:pos + 1].isspace():
            pos += 1
        tokens.append(buf[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_ppm(path: PathLike) -> RasterImage:
    buf = Path(path).read_bytes()
    tokens, offset = _ppm_tokens(buf, 4)
    if tokens[0] != b"P6":
        raise ImageFormatError(f"{path}: only binary P6 PPM is supported, got {tokens[0]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ImageFormatError(f"{path}: bad PPM header") from exc
    if maxval != 255:
        raise ImageFormatError(f"{path}: maxval must be 255, got {maxval}")
    need = width * height * 3
    raw = buf[offset:offset + need]
    if len(raw) != need:
        raise ImageFormatError(f"{path}: expected {need} raster bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
    return RasterImage(data.astype(float), ColorModel.RGB)


def write_ppm(img: RasterImage, path: PathLike) -> None:
    if img.channels != 3:
        raise ImageFormatError("PPM holds exactly three channels")
    data = img.to_uint8()
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + data.tobytes())


def read_png(path: PathLike) -> RasterImage:
    from PIL import Image

    with Image.open(path) as im:
        data = np.asarray(im.convert("RGB"), dtype=float)
    return RasterImage(data, ColorModel.RGB)


def write_png(img: RasterImage, path: PathLike) -> None:
    from PIL import Image

    if img.channels != 3:
        raise ImageFormatError("PNG output is 8-bit RGB only")
    Image.fromarray(img.to_uint8(), mode="RGB").save(path)


def read_image(path: PathLike) -> RasterImage:
    suffix = Path(path).suffix.lower()
    if suffix in (".ppm", ".pnm"):
        return read_ppm(path)
    if suffix == ".png":
        return read_png(path)
    raise ImageFormatError(f"unsupported image type {suffix!r} (use .ppm or .png)")


def write_image(img: RasterImage, path: PathLike) -> None:
    suffix = Path(path).suffix.lower()
    if suffix in (".ppm", ".pnm"):
        write_ppm(img, path)
    elif suffix == ".png":
        write_png(img, path)
    else:
        raise ImageFormatError(f"unsupported image type {suffix!r} (use .ppm or .png)")


def save_quaternion(q: RealQImage, path: PathLike) -> None:
    """Store the four (e, R, G, B) planes losslessly as ``.npy``."""
    np.save(path, np.asarray(q.samples, dtype=float))


def load_quaternion(path: PathLike) -> RealQImage:
    samples = np.load(path)
    if samples.ndim != 3 or samples.shape[2] != 4:
        raise ImageFormatError(f"{path}: expected an (H, W, 4) array")
    return RealQImage(samples)


def write_histogram_csv(img: RasterImage, fh: TextIO) -> None:
    counts = histogram(img)
    cols = [f"ch{k + 1}" for k in range(counts.shape[1])]
    fh.write(",".join(["bin", *cols]) + "\n")
    for k, row in enumerate(counts):
        fh.write(",".join([str(k), *(str(int(v)) for v in row)]) + "\n")
