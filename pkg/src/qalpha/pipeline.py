"""End-to-end enhancement flows.

Stage order: (negate) -> colour space -> encode -> forward transform ->
alpha-rooting -> inverse transform -> rescale -> (log/gamma/histeq) ->
colour space back -> 8-bit quantisation -> (negate back).
"""

from __future__ import annotations

import enum
import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .color_image import (
    ColorModel,
    EvenMode,
    RasterImage,
    RealQImage,
    convert_colorspace,
    encode,
    negate,
    rescale_planes,
    rescale_quaternion,
)
from .metrics import BlockSpec, ceme, eme, eme_channels
from .rooting import RootingParams, enhance_channel_spectrum, enhance_qspectrum
from .spatial import PostKind, PostTransform, apply_scalar, apply_to_magnitude, equalize_plane
from .spectral import dft2_forward, dft2_inverse, qdft_forward, qdft_inverse

log = logging.getLogger(__name__)

RESIDUE_TOL = 1e-6


class Method(str, enum.Enum):
    QDFT = "qdft"
    DFT_CHANNEL = "dft-channel"


class PostApplication(str, enum.Enum):
    PER_PLANE = "per-plane"
    MAGNITUDE = "magnitude"


class OutputRange(str, enum.Enum):
    INPUT = "input"  # rescale onto the joint range of the (working) input
    FULL = "full"  # rescale onto [0, 255]


Rooting = Union[RootingParams, Sequence[RootingParams]]


@dataclass(frozen=True)
class PipelineConfig:
    method: Method = Method.QDFT
    even_mode: EvenMode = EvenMode.ZERO
    colorspace: ColorModel = ColorModel.RGB
    rooting: Rooting = field(default_factory=RootingParams)
    post: PostTransform = field(default_factory=PostTransform)
    post_application: Optional[PostApplication] = None
    negative: bool = False
    blocks: BlockSpec = field(default_factory=BlockSpec)
    log_base: float = math.e
    output_range: OutputRange = OutputRange.INPUT

    def __post_init__(self):
        method = Method(self.method)
        object.__setattr__(self, "method", method)
        object.__setattr__(self, "even_mode", EvenMode(self.even_mode))
        object.__setattr__(self, "colorspace", ColorModel(self.colorspace))
        object.__setattr__(self, "output_range", OutputRange(self.output_range))
        if self.colorspace not in (ColorModel.RGB, ColorModel.XYZ):
            raise ValueError("processing colour space must be RGB or XYZ")

        rooting = self.rooting
        if method is Method.QDFT:
            if not isinstance(rooting, RootingParams):
                raise ValueError("qdft mode takes a single RootingParams")
        else:
            if isinstance(rooting, RootingParams):
                rooting = (rooting,) * 3
            rooting = tuple(rooting)
            if len(rooting) != 3 or not all(isinstance(r, RootingParams) for r in rooting):
                raise ValueError("dft-channel mode needs exactly one RootingParams per channel")
            if self.even_mode is not EvenMode.ZERO:
                raise ValueError("even-part modes only apply to qdft mode")
        object.__setattr__(self, "rooting", rooting)

        app = self.post_application
        if app is None:
            app = PostApplication.MAGNITUDE if method is Method.QDFT else PostApplication.PER_PLANE
        app = PostApplication(app)
        if app is PostApplication.MAGNITUDE and method is not Method.QDFT:
            raise ValueError("magnitude post-application needs qdft mode")
        if self.post.kind is PostKind.HISTEQ:
            app = PostApplication.PER_PLANE
        object.__setattr__(self, "post_application", app)

    def channel_params(self) -> tuple[RootingParams, ...]:
        if isinstance(self.rooting, RootingParams):
            return (self.rooting,) * 3
        return self.rooting


@dataclass
class MetricReport:
    ceme: Optional[float]
    eme: list[float]


@dataclass
class PipelineResult:
    raster: RasterImage  # 8-bit valued, in the input's colour model
    enhanced: Union[RealQImage, np.ndarray]  # working-space planes before quantisation
    report: MetricReport
    residue: float = 0.0  # largest discarded imaginary part (dft-channel only)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


class Prepared:
    """An input image carried through the parameter-independent stages.

    The forward transform is computed once, so sweeps and the GA only pay
    for rooting and the inverse transform at each parameter point.
    """

    def __init__(self, img: RasterImage, cfg: PipelineConfig):
        self.cfg = cfg
        self.source_model = img.color_model
        work = img
        if cfg.negative:
            with _stage("negate"):
                work = negate(work)
        if cfg.colorspace is not work.color_model:
            with _stage("colorspace"):
                work = convert_colorspace(work, cfg.colorspace)
        self.work = work
        if cfg.output_range is OutputRange.INPUT:
            self.lo, self.hi = float(work.data.min()), float(work.data.max())
        else:
            self.lo, self.hi = 0.0, 255.0

        if cfg.method is Method.QDFT:
            with _stage("encode"):
                self.qimage = encode(work, cfg.even_mode)
            with _stage("forward"):
                self.spectrum = qdft_forward(self.qimage)
        else:
            with _stage("forward"):
                self.spectra = [dft2_forward(work.plane(k)) for k in range(work.channels)]

    # -- rooting + inverse ------------------------------------------------

    def rooted_quaternion(self, params: RootingParams, log_base: Optional[float] = None) -> RealQImage:
        """Rooted, inverse-transformed, rescaled quaternion image."""
        base = self.cfg.log_base if log_base is None else log_base
        with _stage("rooting"):
            F = enhance_qspectrum(self.spectrum, params, base)
        with _stage("inverse"):
            f = qdft_inverse(F)
        with _stage("rescale"):
            return rescale_quaternion(RealQImage(f, self.work.color_model), self.lo, self.hi)

    def rooted_channel(self, k: int, params: RootingParams, log_base: Optional[float] = None):
        """Rooted and inverse-transformed plane ``k`` (not rescaled) and its residue."""
        base = self.cfg.log_base if log_base is None else log_base
        with _stage("rooting"):
            F = enhance_channel_spectrum(self.spectra[k], params, base)
        with _stage("inverse"):
            return dft2_inverse(F, tol=RESIDUE_TOL, return_residue=True)

    def rooted_channels(self, params: Sequence[RootingParams], log_base: Optional[float] = None):
        planes, residue = [], 0.0
        for k, p in enumerate(params):
            plane, r = self.rooted_channel(k, p, log_base)
            planes.append(plane)
            residue = max(residue, r)
        with _stage("rescale"):
            return rescale_planes(np.stack(planes, axis=2), self.lo, self.hi), residue

    # -- post stage -------------------------------------------------------

    def _post_quaternion(self, q: RealQImage) -> RealQImage:
        cfg = self.cfg
        post = cfg.post
        if post.kind is PostKind.NONE:
            return q
        with _stage("post"):
            if cfg.post_application is PostApplication.MAGNITUDE:
                return rescale_quaternion(apply_to_magnitude(q, post), self.lo, self.hi)
            samples = q.samples.copy()
            if post.kind is PostKind.HISTEQ:
                for k in range(1, samples.shape[2]):
                    samples[..., k] = equalize_plane(samples[..., k])
                return RealQImage(samples, q.color_model)
            samples[..., 1:] = apply_scalar(samples[..., 1:], post)
            return rescale_quaternion(RealQImage(samples, q.color_model), self.lo, self.hi)

    def _post_planes(self, planes: np.ndarray) -> np.ndarray:
        post = self.cfg.post
        if post.kind is PostKind.NONE:
            return planes
        with _stage("post"):
            if post.kind is PostKind.HISTEQ:
                return np.stack([equalize_plane(planes[..., k]) for k in range(planes.shape[2])], axis=2)
            return rescale_planes(apply_scalar(planes, post), self.lo, self.hi)

    # -- scoring ----------------------------------------------------------

    def score(self, params: RootingParams, include_post: bool = False) -> float:
        """CEME of the rooted image (qdft mode only); the GA/sweep fitness."""
        if self.cfg.method is not Method.QDFT:
            raise ValueError("score() is defined for qdft mode; use channel_scores()")
        q = self.rooted_quaternion(params)
        if include_post:
            q = self._post_quaternion(q)
        with _stage("metric"):
            return ceme(q, self.cfg.blocks)

    def channel_scores(self, params: RootingParams, include_post: bool = False) -> list[float]:
        """Per-channel EME with every channel treated as a grayscale image.

        Each channel is rooted and rescaled on its own, so channel k's score
        depends only on channel k's parameters.
        """
        out = []
        for k in range(len(self.spectra)):
            plane, _ = self.rooted_channel(k, params)
            plane = rescale_planes(plane, self.lo, self.hi)[..., None]
            if include_post:
                plane = self._post_planes(plane)
            with _stage("metric"):
                out.append(eme(plane[..., 0], self.cfg.blocks))
        return out

    # -- full run ---------------------------------------------------------

    def run(self) -> PipelineResult:
        cfg = self.cfg
        residue = 0.0
        if cfg.method is Method.QDFT:
            enhanced = self._post_quaternion(self.rooted_quaternion(cfg.rooting))
            color = enhanced.color
            with _stage("metric"):
                report = MetricReport(ceme(enhanced, cfg.blocks), eme_channels(color, cfg.blocks))
        else:
            planes, residue = self.rooted_channels(cfg.channel_params())
            enhanced = self._post_planes(planes)
            color = enhanced
            with _stage("metric"):
                report = MetricReport(None, eme_channels(enhanced, cfg.blocks))

        out = RasterImage(color, self.work.color_model)
        if out.color_model is not self.source_model:
            with _stage("colorspace"):
                out = convert_colorspace(out, self.source_model)
        with _stage("quantize"):
            out = RasterImage(out.to_uint8().astype(float), out.color_model)
        if cfg.negative:
            with _stage("negate"):
                out = negate(out)
        return PipelineResult(out, enhanced, report, residue)


def run(img: RasterImage, cfg: PipelineConfig) -> PipelineResult:
    return Prepared(img, cfg).run()


def with_rooting(cfg: PipelineConfig, rooting: Rooting) -> PipelineConfig:
    return replace(cfg, rooting=rooting)
