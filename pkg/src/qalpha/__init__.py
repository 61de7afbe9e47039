"""Colour image enhancement by modified alpha-rooting in the two-side
quaternion DFT domain, with a channel-by-channel 2-D DFT counterpart."""

__version__ = "0.1.0"

from .color_image import (
    ColorModel,
    EvenMode,
    QuaternionImage,
    RasterImage,
    RealQImage,
    convert_colorspace,
    decode,
    encode,
    histogram,
    negate,
    rescale_to_8bit,
)
from .metrics import BlockSpec, ceme, eme
from .pipeline import Method, PipelineConfig, PostApplication, run
from .quaternion import Quaternion, qmul, qpolar
from .rooting import RootingParams, enhance_channel_spectrum, enhance_qspectrum, rooting_coefficient
from .search import GAConfig, SweepSpec, ga_optimize, sweep
from .spatial import PostKind, PostTransform
from .spectral import dft2_forward, dft2_inverse, qdft_direct, qdft_forward, qdft_inverse
