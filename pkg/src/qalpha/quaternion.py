"""Quaternion arithmetic on scalars and on numpy arrays of quaternions.

Scalar quaternions are :class:`Quaternion` values.  Images and spectra are
stored as float arrays whose last axis holds the four components
``(a, b, c, d)`` of ``a + ib + jc + kd``; the ``*_array`` helpers operate
on those.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np


@dataclass(frozen=True)
class Quaternion:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))

    def __add__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return Quaternion(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return Quaternion(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        if isinstance(other, (int, float)):
            return Quaternion(self.a * other, self.b * other, self.c * other, self.d * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def conjugate(self) -> Quaternion:
        return Quaternion(self.a, -self.b, -self.c, -self.d)

    def norm(self) -> float:
        """Squared modulus ``a² + b² + c² + d²``."""
        return self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d

    def modulus(self) -> float:
        return math.sqrt(self.norm())

    @property
    def is_pure(self) -> bool:
        return self.a == 0.0

    @property
    def is_unit(self) -> bool:
        return math.isclose(self.norm(), 1.0, rel_tol=0.0, abs_tol=1e-12)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=float)

    @classmethod
    def from_array(cls, arr) -> Quaternion:
        a, b, c, d = (float(x) for x in arr)
        return cls(a, b, c, d)


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p·q`` (ij = k, jk = i, ki = j)."""
    return Quaternion(
        p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
        p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
        p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
        p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
    )


def norm(q: Quaternion) -> float:
    return q.norm()


def modulus(q: Quaternion) -> float:
    return q.modulus()


class Polar(NamedTuple):
    modulus: float
    axis: Optional[Quaternion]  # None for real quaternions: no axis exists
    phase: float


def qpolar(q: Quaternion) -> Polar:
    """Polar form ``q = |q| (cos φ + μ sin φ)``.

    The axis ``μ`` is a pure unit quaternion and the phase lies in ``[0, π]``.
    For a real quaternion (zero vector part) the axis is undefined and
    returned as ``None``; the phase is then 0 for ``a >= 0`` and π otherwise.
    """
    vnorm = math.sqrt(q.b * q.b + q.c * q.c + q.d * q.d)
    mod = q.modulus()
    if vnorm == 0.0:
        return Polar(mod, None, 0.0 if q.a >= 0 else math.pi)
    axis = Quaternion(0.0, q.b / vnorm, q.c / vnorm, q.d / vnorm)
    return Polar(mod, axis, math.atan2(vnorm, q.a))


def from_polar(mod: float, axis: Optional[Quaternion], phase: float) -> Quaternion:
    if axis is None:
        return Quaternion(mod * math.cos(phase))
    s = mod * math.sin(phase)
    return Quaternion(mod * math.cos(phase), s * axis.b, s * axis.c, s * axis.d)


# --- array forms -----------------------------------------------------------

def qmul_array(p, q) -> np.ndarray:
    """Hamilton product of broadcastable arrays with components on the last axis."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pa, pb, pc, pd = np.moveaxis(p, -1, 0)
    qa, qb, qc, qd = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pa * qa - pb * qb - pc * qc - pd * qd,
            pa * qb + pb * qa + pc * qd - pd * qc,
            pa * qc - pb * qd + pc * qa + pd * qb,
            pa * qd + pb * qc - pc * qb + pd * qa,
        ],
        axis=-1,
    )


def modulus_array(q) -> np.ndarray:
    return np.sqrt(np.sum(np.square(q), axis=-1))


def polar_array(q, eps: float = 1e-12):
    """Vectorised polar decomposition.

    Returns ``(modulus, axis, phase)`` with ``axis`` of shape ``(..., 3)``
    (vector part only).  Where the vector part vanishes the axis is NaN.
    """
    q = np.asarray(q, dtype=float)
    vec = q[..., 1:]
    vnorm = np.sqrt(np.sum(vec * vec, axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = np.where((vnorm > eps)[..., None], vec / vnorm[..., None], np.nan)
    return modulus_array(q), axis, np.arctan2(vnorm, q[..., 0])
