"""Poincare disc geometry, curvature -1 (density 2|dz| / (1 - |z|^2))."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _check_disc(*zs):
    for z in zs:
        if np.any(np.abs(z) >= 1):
            raise ValueError("argument must lie in the open unit disc")


def pseudo_hyperbolic(z, w):
    """|z - w| / |1 - conj(w) z|."""
    _check_disc(z, w)
    return np.abs(z - w) / np.abs(1 - np.conj(w) * z)


def poincare_distance(z, w):
    """ln((1 + d) / (1 - d)) with d the pseudo-hyperbolic distance; vectorized."""
    d = pseudo_hyperbolic(z, w)
    out = 2.0 * np.arctanh(d)
    return float(out) if np.ndim(out) == 0 else out


def disc_automorphism(t, z):
    """(z + t) / (1 + conj(t) z), mapping 0 to t."""
    _check_disc(t, z)
    return (z + t) / (1 + np.conj(t) * z)


def log_star(x):
    """1 + |ln x|."""
    if np.any(np.asarray(x) <= 0):
        raise ValueError("log_star needs a positive argument")
    out = 1.0 + np.abs(np.log(x))
    return float(out) if np.ndim(out) == 0 else out


def euclidean_radius(R):
    """Euclidean radius of the disc of hyperbolic radius R about 0: tanh(R/2)."""
    return np.tanh(np.asarray(R, dtype=float) / 2.0) if np.ndim(R) else math.tanh(R / 2.0)


def hyperbolic_radius(r):
    """Inverse of :func:`euclidean_radius`: ln((1 + r) / (1 - r))."""
    if np.any(np.asarray(r) < 0) or np.any(np.asarray(r) >= 1):
        raise ValueError("Euclidean radius must be in [0, 1)")
    return 2.0 * np.arctanh(r) if np.ndim(r) else 2.0 * math.atanh(r)


def radius_gap(R):
    """1 - r for hyperbolic radius R, computed without cancellation: 2 / (e^R + 1)."""
    return 2.0 / (np.exp(R) + 1.0)


def hyperbolic_radius_from_gap(s):
    """Inverse of :func:`radius_gap`: ln((2 - s) / s), accurate for s near 0."""
    if np.any(np.asarray(s) <= 0) or np.any(np.asarray(s) > 1):
        raise ValueError("gap must be in (0, 1]")
    return np.log((2.0 - s) / s)


@dataclass(frozen=True)
class HyperbolicRadius:
    """A disc radius in both scales; ``gap`` = 1 - r keeps large R recoverable."""

    R: float
    r: float
    gap: float

    @classmethod
    def from_hyperbolic(cls, R):
        s = float(radius_gap(R))
        return cls(float(R), float(euclidean_radius(R)), s)

    @classmethod
    def from_euclidean(cls, r):
        return cls(float(hyperbolic_radius(r)), float(r), 1.0 - float(r))

    @classmethod
    def from_gap(cls, s):
        return cls(float(hyperbolic_radius_from_gap(s)), 1.0 - float(s), float(s))
