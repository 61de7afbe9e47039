"""Modified alpha-rooting of quaternion and complex spectra.

Each coefficient ``F`` keeps its direction (quaternion axis and phase, or
complex argument) while its magnitude becomes ``C·|F|^α`` with
``C = log^β(|F|^λ + 1)``.  That is a real, non-negative multiplier
``|F|^(α-1) · log^β(|F|^λ + 1)`` applied to the coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quaternion import modulus_array

ZERO_MAG = 1e-12


@dataclass(frozen=True)
class RootingParams:
    alpha: float = 1.0
    beta: float = 0.0
    lam: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.beta >= 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.lam > 0.0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.lam)


def rooting_coefficient(mag, params: RootingParams, log_base: float = math.e):
    """Multiplier that maps a magnitude ``mag`` to ``C(mag)·mag^α``.

    Works on scalars and arrays.  Magnitudes below 1e-12 get a zero
    multiplier.  ``log_base`` selects the logarithm inside ``C``.
    """
    mag = np.asarray(mag, dtype=float)
    out = np.zeros_like(mag)
    nz = mag >= ZERO_MAG
    m = mag[nz]
    coef = np.power(m, params.alpha - 1.0)
    if params.beta != 0.0:
        logs = np.log1p(np.power(m, params.lam))
        if log_base != math.e:
            logs = logs / math.log(log_base)
        coef = coef * np.power(logs, params.beta)
    out[nz] = coef
    return out if out.ndim else float(out)


def enhance_qspectrum(F, params: RootingParams, log_base: float = math.e) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    return F * rooting_coefficient(modulus_array(F), params, log_base)[..., None]


def enhance_channel_spectrum(F, params: RootingParams, log_base: float = math.e) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    return F * rooting_coefficient(np.abs(F), params, log_base)
