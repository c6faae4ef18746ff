"""SU(2) as unit quaternions, its Lie algebra, and the exp/log maps.

A unit quaternion ``w + x i + y j + z k`` is identified with the matrix

    [[w + i x,  y + i z],
     [-y + i z, w - i x]]

and a Lie algebra vector ``v = (v1, v2, v3)`` with the pure quaternion
``v1 i + v2 j + v3 k``.  The inner product on su(2) is ``<a, b> = -Tr(ab)``,
so the norm of ``v`` is ``sqrt(2) * |v|`` where ``|v|`` is Euclidean.
With that normalisation ``exp(v) = -I`` exactly when the norm is an odd
multiple of ``pi * sqrt(2)``.

Batched helpers (``qmul``, ``qconj``, ``qexp``) work on numpy arrays whose
last axis has length 4; the numerical solver uses them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SQRT2 = math.sqrt(2.0)
NORM_TOL = 1e-12
LOG_REJECT = 1e-8


@dataclass(frozen=True)
class Su2Vector:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @property
    def euclidean(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def norm(self) -> float:
        """Norm for the inner product -Tr(ab)."""
        return SQRT2 * self.euclidean

    def inner(self, other: Su2Vector) -> float:
        return 2.0 * (self.x * other.x + self.y * other.y + self.z * other.z)

    def __add__(self, other: Su2Vector) -> Su2Vector:
        return Su2Vector(self.x + other.x, self.y + other.y, self.z + other.z)

    def __neg__(self) -> Su2Vector:
        return Su2Vector(-self.x, -self.y, -self.z)

    def scale(self, s: float) -> Su2Vector:
        return Su2Vector(s * self.x, s * self.y, s * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def matrix(self) -> np.ndarray:
        return SU2Element(0.0, self.x, self.y, self.z, _raw=True).matrix()

    @classmethod
    def from_norm(cls, direction, norm: float) -> Su2Vector:
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        e = norm / SQRT2
        return cls(*(e * d))


@dataclass(frozen=True, init=False)
class SU2Element:
    w: float
    x: float
    y: float
    z: float

    def __init__(self, w=1.0, x=0.0, y=0.0, z=0.0, _raw=False):
        if not _raw:
            n = math.sqrt(w * w + x * x + y * y + z * z)
            if n == 0.0:
                raise DomainError("zero quaternion is not in SU(2)")
            if abs(n - 1.0) > NORM_TOL:
                w, x, y, z = w / n, x / n, y / n, z / n
        object.__setattr__(self, "w", float(w))
        object.__setattr__(self, "x", float(x))
        object.__setattr__(self, "y", float(y))
        object.__setattr__(self, "z", float(z))

    @classmethod
    def identity(cls) -> SU2Element:
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def central(cls, sign: int) -> SU2Element:
        return cls(float(sign), 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, q) -> SU2Element:
        return cls(*[float(t) for t in q])

    @classmethod
    def random(cls, rng: np.random.Generator) -> SU2Element:
        """Haar-distributed element."""
        q = rng.standard_normal(4)
        return cls(*(q / np.linalg.norm(q)))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __mul__(self, o: SU2Element) -> SU2Element:
        a, b, c, d = self.w, self.x, self.y, self.z
        e, f, g, h = o.w, o.x, o.y, o.z
        return SU2Element(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )

    def inverse(self) -> SU2Element:
        return SU2Element(self.w, -self.x, -self.y, -self.z, _raw=True)

    def __neg__(self) -> SU2Element:
        return SU2Element(-self.w, -self.x, -self.y, -self.z, _raw=True)

    def __pow__(self, n: int) -> SU2Element:
        base = self if n >= 0 else self.inverse()
        out = SU2Element.identity()
        for _ in range(abs(n)):
            out = out * base
        return out

    def conjugate_by(self, g: SU2Element) -> SU2Element:
        """Return g self g^-1."""
        return g * self * g.inverse()

    def trace(self) -> float:
        return 2.0 * self.w

    def distance(self, o: SU2Element) -> float:
        """Euclidean distance of the quaternion coordinates."""
        return math.sqrt(
            (self.w - o.w) ** 2 + (self.x - o.x) ** 2
            + (self.y - o.y) ** 2 + (self.z - o.z) ** 2
        )

    def is_central(self, tol: float = 1e-9) -> bool:
        return min(self.distance(SU2Element.identity()),
                   self.distance(SU2Element.central(-1))) < tol

    def matrix(self) -> np.ndarray:
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array([[w + 1j * x, y + 1j * z],
                         [-y + 1j * z, w - 1j * x]])


def exp_su2(v: Su2Vector) -> SU2Element:
    t = v.euclidean
    if t == 0.0:
        return SU2Element.identity()
    s = math.sin(t) / t
    return SU2Element(math.cos(t), s * v.x, s * v.y, s * v.z)


def log_su2(g: SU2Element) -> Su2Vector:
    """Principal logarithm; the result has norm < pi*sqrt(2).

    Elements with trace <= -2 + 1e-8 are rejected: the branch is not
    defined at -I and extrapolating near it is unreliable.
    """
    if g.trace() <= -2.0 + LOG_REJECT:
        raise DomainError("log_su2 undefined at (or too close to) -I")
    r = math.sqrt(g.x * g.x + g.y * g.y + g.z * g.z)
    if r == 0.0:
        return Su2Vector()
    t = math.atan2(r, g.w)
    s = t / r
    return Su2Vector(s * g.x, s * g.y, s * g.z)


def orbit_signature(g: SU2Element) -> float:
    """Conjugacy invariant: the trace."""
    return g.trace()


def adjoint(g: SU2Element, v: Su2Vector) -> Su2Vector:
    q = qmul(qmul(g.as_array(), np.array([0.0, v.x, v.y, v.z])), g.inverse().as_array())
    return Su2Vector(float(q[1]), float(q[2]), float(q[3]))


def commutator(a: SU2Element, b: SU2Element) -> SU2Element:
    return a * b * a.inverse() * b.inverse()


# -- batched quaternion arithmetic ------------------------------------------

def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = aw * bw - ax * bx - ay * by - az * bz
    out[..., 1] = aw * bx + ax * bw + ay * bz - az * by
    out[..., 2] = aw * by - ax * bz + ay * bw + az * bx
    out[..., 3] = aw * bz + ax * by - ay * bx + az * bw
    return out


def qleft(a: np.ndarray) -> np.ndarray:
    """Matrix of v -> a v acting on the last axis."""
    w, x, y, z = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    return np.stack([
        np.stack([w, -x, -y, -z], -1),
        np.stack([x, w, -z, y], -1),
        np.stack([y, z, w, -x], -1),
        np.stack([z, -y, x, w], -1),
    ], -2)


def qright(b: np.ndarray) -> np.ndarray:
    """Matrix of v -> v b acting on the last axis."""
    w, x, y, z = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack([
        np.stack([w, -x, -y, -z], -1),
        np.stack([x, w, z, -y], -1),
        np.stack([y, -z, w, x], -1),
        np.stack([z, y, -x, w], -1),
    ], -2)


def qconj(a: np.ndarray) -> np.ndarray:
    out = -a
    out[..., 0] = a[..., 0]
    return out


def qexp(v: np.ndarray) -> np.ndarray:
    """exp of pure quaternions given by their 3 imaginary coordinates."""
    t = np.linalg.norm(v, axis=-1)
    safe = np.where(t > 0, t, 1.0)
    s = np.where(t > 0, np.sin(t) / safe, 1.0)
    return np.concatenate([np.cos(t)[..., None], v * s[..., None]], axis=-1)


def qnormalize(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=-1, keepdims=True)


def haar(rng: np.random.Generator, shape) -> np.ndarray:
    q = rng.standard_normal(tuple(shape) + (4,))
    return qnormalize(q)
