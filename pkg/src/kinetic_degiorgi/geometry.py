"""Kinetic phase-space points, the Galilean group, scalings and cylinders.

A point is ``z = (t, x, v)`` with ``x, v`` in R^d. The group law is

    z0 o z = (t0 + t, x0 + x + t v0, v0 + v)

and the scaling of order ``s`` maps ``(t, x, v)`` to
``(r^{2s} t, r^{1+2s} x, r v)``. Every cylinder in the package is stored as a
:class:`SlantedBox`: an anchor point and a window
``anchor o ((t_lo, t_hi] x B_{rho_x} x B_{rho_v})``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from numbers import Real
from typing import NamedTuple, Sequence

import numpy as np

from .quadrature import unit_ball_volume


def _as_tuple(c) -> tuple:
    if isinstance(c, Real):
        return (c,)
    return tuple(c)


@dataclass(frozen=True)
class KineticPoint:
    """A point ``(t, x, v)`` of kinetic phase space."""

    t: Real
    x: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", _as_tuple(self.x))
        object.__setattr__(self, "v", _as_tuple(self.v))
        if len(self.x) != len(self.v):
            raise ValueError(f"dimension mismatch: len(x)={len(self.x)}, len(v)={len(self.v)}")
        if len(self.x) == 0:
            raise ValueError("points need d >= 1")
        for c in (self.t, *self.x, *self.v):
            if not math.isfinite(float(c)):
                raise ValueError("coordinates must be finite")

    @property
    def d(self) -> int:
        return len(self.x)

    @classmethod
    def origin(cls, d: int = 1) -> "KineticPoint":
        return cls(0, (0,) * d, (0,) * d)

    def as_array(self) -> np.ndarray:
        return np.array([float(self.t), *map(float, self.x), *map(float, self.v)])


def _check_dims(a: KineticPoint, b: KineticPoint) -> None:
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")


def galilean_compose(z0: KineticPoint, z: KineticPoint) -> KineticPoint:
    """Return ``z0 o z = (t0 + t, x0 + x + t v0, v0 + v)``."""
    _check_dims(z0, z)
    x = tuple(a + b + z.t * c for a, b, c in zip(z0.x, z.x, z0.v))
    v = tuple(a + b for a, b in zip(z0.v, z.v))
    return KineticPoint(z0.t + z.t, x, v)


def galilean_inverse(z: KineticPoint) -> KineticPoint:
    """Return ``z^{-1} = (-t, -x + t v, -v)``."""
    return KineticPoint(-z.t, tuple(-a + z.t * b for a, b in zip(z.x, z.v)), tuple(-b for b in z.v))


@dataclass(frozen=True)
class ScalingTransform:
    """The kinetic dilation of order ``s`` with factor ``r`` in (0, 1]."""

    r: Real
    s: Real

    def __post_init__(self):
        if not 0 < self.r <= 1:
            raise ValueError(f"scale factor must lie in (0, 1], got {self.r}")
        if not 0 < self.s < 1:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")


def scale_point(T: ScalingTransform, z: KineticPoint) -> KineticPoint:
    """Return ``(r^{2s} t, r^{1+2s} x, r v)``."""
    r, s = T.r, T.s
    a, b = r ** (2 * s), r ** (1 + 2 * s)
    return KineticPoint(a * z.t, tuple(b * c for c in z.x), tuple(r * c for c in z.v))


def unscale_point(T: ScalingTransform, z: KineticPoint) -> KineticPoint:
    """Preimage of ``z`` under :func:`scale_point`."""
    r, s = T.r, T.s
    a, b = r ** (2 * s), r ** (1 + 2 * s)
    return KineticPoint(z.t / a, tuple(c / b for c in z.x), tuple(c / r for c in z.v))


def total_dimension(d: int, s: float) -> float:
    """Homogeneous dimension ``n = 2s + d(2 + 2s)``; ``|Q_r| = c_d^2 r^n``."""
    return 2 * s + d * (2 + 2 * s)


@dataclass(frozen=True)
class SlantedBox:
    """The set ``anchor o (window x B_{rho_x} x B_{rho_v})``.

    Membership of ``z`` reads ``t_lo <= t - t_a <= t_hi`` (or ``t_lo <`` when
    ``closed_left`` is False), ``|v - v_a| < rho_v`` and
    ``|x - x_a - (t - t_a) v_a| < rho_x``.
    """

    anchor: KineticPoint
    t_lo: float
    t_hi: float
    rho_x: float
    rho_v: float
    closed_left: bool = True

    def __post_init__(self):
        if not self.t_lo < self.t_hi:
            raise ValueError("empty time window")
        if self.rho_x <= 0 or self.rho_v <= 0:
            raise ValueError("radii must be positive")

    @property
    def d(self) -> int:
        return self.anchor.d

    @property
    def time_interval(self) -> tuple[float, float]:
        """Absolute time window ``(lo, hi)``."""
        t = float(self.anchor.t)
        return t + self.t_lo, t + self.t_hi

    def contains(self, z: KineticPoint) -> bool:
        _check_dims(self.anchor, z)
        a = self.anchor
        dt = z.t - a.t
        if self.closed_left:
            if not self.t_lo <= dt <= self.t_hi:
                return False
        elif not self.t_lo < dt <= self.t_hi:
            return False
        dv2 = sum((p - q) ** 2 for p, q in zip(z.v, a.v))
        if not dv2 < self.rho_v**2:
            return False
        dx2 = sum((p - q - dt * w) ** 2 for p, q, w in zip(z.x, a.x, a.v))
        return dx2 < self.rho_x**2

    def contains_arrays(self, t, x, v) -> np.ndarray:
        """Vectorised membership; ``x`` and ``v`` carry a trailing axis of length d
        (or none when d=1)."""
        a = self.anchor
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        if self.d == 1 and (v.ndim == 0 or v.shape[-1] != 1):
            v = v[..., None]
        xa = np.array(a.x, dtype=float)
        va = np.array(a.v, dtype=float)
        dt = t - float(a.t)
        if self.closed_left:
            ok = (dt >= self.t_lo) & (dt <= self.t_hi)
        else:
            ok = (dt > self.t_lo) & (dt <= self.t_hi)
        ok = ok & (np.sum((v - va) ** 2, axis=-1) < self.rho_v**2)
        dx = x - xa - dt[..., None] * va
        return ok & (np.sum(dx**2, axis=-1) < self.rho_x**2)

    def volume(self) -> float:
        c = unit_ball_volume(self.d)
        return (self.t_hi - self.t_lo) * c * self.rho_x**self.d * c * self.rho_v**self.d

    def x_center(self, t: float) -> np.ndarray:
        """Centre of the x-ball at absolute time ``t``."""
        a = self.anchor
        return np.array(a.x, dtype=float) + (t - float(a.t)) * np.array(a.v, dtype=float)

    def translate(self, z: KineticPoint) -> "SlantedBox":
        """Left translation ``z o box``."""
        return SlantedBox(galilean_compose(z, self.anchor), self.t_lo, self.t_hi,
                          self.rho_x, self.rho_v, self.closed_left)


def boxes_intersect(a: SlantedBox, b: SlantedBox) -> bool:
    """Exact emptiness test for the intersection of two slanted boxes.

    Given t, the x- and v-constraints decouple, and the distance between the
    x-ball centres is the norm of an affine function of t, so the minimum over
    the common time window has a closed form.
    """
    _check_dims(a.anchor, b.anchor)
    a_lo, a_hi = a.time_interval
    b_lo, b_hi = b.time_interval
    lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
    left_closed = (a.closed_left or a_lo < b_lo) and (b.closed_left or b_lo < a_lo)
    if hi < lo or (hi == lo and not left_closed):
        return False
    va, vb = np.array(a.anchor.v, float), np.array(b.anchor.v, float)
    if np.linalg.norm(va - vb) >= a.rho_v + b.rho_v:
        return False
    # c(t) = p + t q is the difference of x-ball centres
    q = va - vb
    p = a.x_center(0.0) - b.x_center(0.0)
    qq = float(q @ q)
    t_star = lo if qq == 0 else min(max(-float(p @ q) / qq, lo), hi)
    return float(np.linalg.norm(p + t_star * q)) < a.rho_x + b.rho_x


def box_subset(inner: SlantedBox, outer: SlantedBox, strict: bool = False) -> bool:
    """Containment test for boxes sharing the anchor velocity.

    With equal anchor velocities the x-ball centres move in parallel, so
    containment reduces to interval and ball inclusions. ``strict`` asks for
    the closure of ``inner`` to sit in the interior of ``outer``.
    """
    if inner.anchor.v != outer.anchor.v:
        raise ValueError("box_subset needs equal anchor velocities")
    i_lo, i_hi = inner.time_interval
    o_lo, o_hi = outer.time_interval
    dx = float(np.linalg.norm(inner.x_center(0.0) - outer.x_center(0.0)))
    if strict:
        return (o_lo < i_lo and i_hi < o_hi
                and dx + inner.rho_x < outer.rho_x and inner.rho_v < outer.rho_v)
    return (o_lo <= i_lo and i_hi <= o_hi
            and dx + inner.rho_x <= outer.rho_x and inner.rho_v <= outer.rho_v)


class Variant(str, Enum):
    PLAIN = "plain"
    PAST = "past"
    FUTURE = "future"
    COVERING = "covering"
    COVERING_FUTURE = "covering_future"


@dataclass(frozen=True)
class KineticCylinder:
    """One of ``Q_r(z0)``, ``Q^-_r(z0)``, ``Q^+_r(z0)``, ``c_r[z0]``, ``c^+_r[z0]``."""

    center: KineticPoint
    radius: float
    s: float
    variant: Variant = Variant.PLAIN

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"cylinder radius must be positive, got {self.radius}")
        if not 0 < self.s < 1:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def box(self) -> SlantedBox:
        r, s = self.radius, self.s
        tr = r ** (2 * s)
        if self.variant is Variant.PLAIN:
            return SlantedBox(self.center, -tr, 0.0, r ** (1 + 2 * s), r)
        if self.variant is Variant.PAST:
            return SlantedBox(self.center, -3 * tr, -2 * tr, r ** (1 + 2 * s), r)
        if self.variant is Variant.FUTURE:
            return SlantedBox(self.center, tr, 2 * tr, r ** (1 + 2 * s), r)
        R = 2 * r
        tR = R ** (2 * s)
        if self.variant is Variant.COVERING:
            return SlantedBox(self.center, -0.5 * tR, 0.5 * tR, R ** (1 + 2 * s), R, closed_left=False)
        return SlantedBox(self.center, 1.5 * tR, 2.5 * tR, R ** (1 + 2 * s), R, closed_left=False)

    def contains(self, z: KineticPoint) -> bool:
        return self.box.contains(z)

    def volume(self) -> float:
        return self.box.volume()


def make_cylinder(z0: KineticPoint, r: float, s: float, variant: Variant | str = Variant.PLAIN) -> KineticCylinder:
    """Build a cylinder of the requested variant around ``z0``."""
    if not r > 0:
        raise ValueError(f"cylinder radius must be positive, got {r}")
    return KineticCylinder(z0, r, s, Variant(variant))


class CylinderOps(NamedTuple):
    contains: bool
    volume: float


def cylinder_ops(c: KineticCylinder, z: KineticPoint) -> CylinderOps:
    """Membership of ``z`` and the volume of ``c``."""
    return CylinderOps(c.contains(z), c.volume())


def alpha_k(r0: float, k: int) -> float:
    """Covering-sequence increment ``alpha_k = (r0 / 2) 7^{1-k}``."""
    if k < 1:
        raise ValueError("k starts at 1")
    return (r0 / 2) * 7.0 ** (1 - k)


def covering_sequence_cylinder(r0: float, s: float, k: int, d: int = 1) -> KineticCylinder:
    """``Q^k = Q_{r0/2 + alpha_k}((-5/2 r0^{2s} + 1/2 (r0/2 + alpha_k)^{2s}, 0, 0))``."""
    rho = r0 / 2 + alpha_k(r0, k)
    t = -2.5 * r0 ** (2 * s) + 0.5 * rho ** (2 * s)
    return make_cylinder(KineticPoint(t, (0.0,) * d, (0.0,) * d), rho, s)


def tilde_past_cylinder(r0: float, s: float, rho: float, d: int = 1) -> KineticCylinder:
    """``Q_rho(((-5/2 + 2^{-2s}/2) r0^{2s}, 0, 0))``, the target of the covering
    sequence for ``rho = r0/2`` and the not-so-strong Harnack window for
    ``rho = r0/4``."""
    t = (-2.5 + 0.5 * 2.0 ** (-2 * s)) * r0 ** (2 * s)
    return make_cylinder(KineticPoint(t, (0.0,) * d, (0.0,) * d), rho, s)


def points_in(box: SlantedBox, points: Sequence[KineticPoint]) -> list[bool]:
    return [box.contains(p) for p in points]
