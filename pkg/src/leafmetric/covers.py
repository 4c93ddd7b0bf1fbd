"""Explicit universal covers of leaves for diagonal linear fields in a ball.

For X = p z d/dz + w d/dw (p = 1 radial, p = 2 the (2,1) fixture) the leaf
through (a, b), b != 0, is the curve sigma -> (c sigma^p, sigma) with
c = a / b^p. Inside the ball of radius rho this is the punctured disc
0 < |sigma| < sigma_max, where |c|^2 s^(2p) + s^2 = rho^2 at s = sigma_max.
Its universal cover is zeta -> sigma_max exp((zeta + 1) / (zeta - 1)),
precomposed with a disc automorphism so that 0 maps to the base point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .disc import disc_automorphism
from .polynomial import PolyVectorField, as_point, linear_field


def diagonal_field(p: int) -> PolyVectorField:
    return linear_field(np.diag([float(p), 1.0]))


def sigma_max(c: complex, p: int, rho: float) -> float:
    if c == 0 or p == 1:
        return rho / math.sqrt(1 + abs(c) ** 2) if p == 1 else rho
    f = lambda s: abs(c) ** 2 * s ** (2 * p) + s * s - rho * rho
    return brentq(f, 0.0, rho, xtol=1e-15, rtol=1e-15)


@dataclass(frozen=True)
class LeafCover:
    """Cover of the leaf of diag(p, 1) through ``base``, normalized so 0 -> base."""

    p: int
    rho: float
    c: complex
    smax: float
    zeta0: float
    theta: float
    base_sigma: complex

    @classmethod
    def through(cls, base, p: int, rho: float) -> "LeafCover":
        a, b = as_point(base)
        if b == 0:
            raise ValueError("leaf of the axis w = 0 is not handled")
        if abs(a) ** 2 + abs(b) ** 2 >= rho * rho:
            raise ValueError("base point outside the ball")
        c = a / b ** p
        sm = sigma_max(c, p, rho)
        A = math.log(sm / abs(b))
        return cls(p, rho, complex(c), sm, (A - 1) / (A + 1), float(np.angle(b)), complex(b))

    @property
    def log_ratio(self) -> float:
        return math.log(self.smax / abs(self.base_sigma))

    def sigma(self, zeta):
        w = disc_automorphism(self.zeta0, zeta)
        return self.smax * np.exp(1j * self.theta) * np.exp((w + 1) / (w - 1))

    def point(self, sigma):
        sigma = np.asarray(sigma)
        return np.stack([self.c * sigma ** self.p, sigma], axis=-1)

    def __call__(self, zeta):
        return self.point(self.sigma(zeta))

    def inverse_sigma(self, sigma):
        """zeta with sigma(zeta) = sigma, on the branch continuous from the base point."""
        L = -self.log_ratio + np.log(np.asarray(sigma) / self.base_sigma)
        w = (L + 1) / (L - 1)
        return disc_automorphism(-self.zeta0, w)

    def eta(self) -> float:
        """Exact ||u'(0)|| = 2 ln(sigma_max / |sigma|) ||X(base)||."""
        b = self.base_sigma
        tangent = np.array([self.p * self.c * b ** self.p, b])
        return 2.0 * self.log_ratio * float(np.linalg.norm(tangent))


def cover_eta(point, p: int, rho: float) -> float:
    return LeafCover.through(point, p, rho).eta()


def project_to_leaf(cover: LeafCover, points, sigma_seed, iters: int = 30):
    """Leaf coordinates sigma of the orthogonal projections of ``points`` onto the leaf.

    Vectorized Wirtinger-Newton on <x' - Y(s), T(s)> = 0 with Y(s) = (c s^p, s)
    and T = dY/ds.
    """
    pts = np.asarray(points, dtype=complex)
    s = np.array(sigma_seed, dtype=complex)
    c, p = cover.c, cover.p
    for _ in range(iters):
        Y0, Y1 = c * s ** p, s
        T0 = p * c * s ** (p - 1)
        dT0 = p * (p - 1) * c * s ** (p - 2) if p >= 2 else 0 * s
        d0, d1 = pts[..., 0] - Y0, pts[..., 1] - Y1
        g = d0 * np.conj(T0) + d1
        a = -(np.abs(T0) ** 2 + 1)
        b = d0 * np.conj(dT0)
        step = (-g * a + b * np.conj(g)) / (a * a - np.abs(b) ** 2)
        s = s + step
        if np.max(np.abs(step)) <= 1e-16 * np.max(np.abs(s)):
            break
    return s
