"""Zeros of polynomial vector fields and their local classification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .polynomial import CPoint, PolyVectorField, as_point, evaluate, jacobian

ZERO_TOL = 1e-10
CLASSIFY_TOL = 1e-9
SINGULAR_VALUE_TOL = 1e-9
RESONANCE_TOL = 1e-8


class NonIsolatedZeroError(ValueError):
    pass


@dataclass(frozen=True)
class SingularPoint:
    location: CPoint
    jacobian: np.ndarray = field(repr=False, compare=False)
    eigenvalues: tuple
    non_degenerate: bool
    resonant: bool
    resonance_witness: tuple | None = None  # (i, m): eigenvalues[i] == sum m_j eigenvalues[j]

    @property
    def coords(self) -> np.ndarray:
        return np.array(self.location.coords)

    def to_json(self):
        pair = lambda c: [float(c.real), float(c.imag)]
        return {
            "location": [pair(c) for c in self.location.coords],
            "jacobian": [[pair(c) for c in row] for row in self.jacobian],
            "eigenvalues": [pair(c) for c in self.eigenvalues],
            "non_degenerate": self.non_degenerate,
            "resonant": self.resonant,
            "witness": None if self.resonance_witness is None
            else {"i": self.resonance_witness[0], "m": list(self.resonance_witness[1])},
        }


def _batched_solve(J, r):
    # J: (..., n, n), r: (..., n)
    n = J.shape[-1]
    if n == 2:
        a, b, c, d = J[..., 0, 0], J[..., 0, 1], J[..., 1, 0], J[..., 1, 1]
        det = a * d - b * c
        bad = np.abs(det) < 1e-300
        det = np.where(bad, 1.0, det)
        x0 = (d * r[..., 0] - b * r[..., 1]) / det
        x1 = (-c * r[..., 0] + a * r[..., 1]) / det
        out = np.stack([x0, x1], axis=-1)
        out[bad] = np.nan
        return out
    try:
        return np.linalg.solve(J, r[..., None])[..., 0]
    except np.linalg.LinAlgError:
        return np.einsum("...ij,...j->...i", np.linalg.pinv(J), r)


def _eval_batch(X, Z):
    f, jac, _ = X.kernels
    cols = [Z[:, j] for j in range(Z.shape[1])]
    F = np.stack([np.broadcast_to(v, Z.shape[:1]) for v in f(*cols)], axis=-1)
    J = np.stack([np.stack([np.broadcast_to(v, Z.shape[:1]) for v in row], axis=-1)
                  for row in jac(*cols)], axis=-2)
    return F.astype(complex), J.astype(complex)


def newton_batch(X: PolyVectorField, Z, max_iter: int = 60):
    """Damped Newton on X = 0 for a batch of seeds (rows of Z).

    A step whose residual is larger than the current one is halved, up to
    ten times. Returns (points, residual norms).
    """
    Z = np.array(Z, dtype=complex)
    active = np.ones(len(Z), bool)
    F, J = _eval_batch(X, Z)
    res = np.linalg.norm(F, axis=1)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            step = _batched_solve(J[idx], F[idx])
            ok = np.all(np.isfinite(step), axis=1)
            lam = np.ones(idx.size)
            cand = Z[idx] - step
            Fc, Jc = _eval_batch(X, np.where(ok[:, None], cand, Z[idx]))
            rc = np.linalg.norm(Fc, axis=1)
            for _ in range(10):
                worse = ok & ~(rc <= res[idx]) & (rc > 0)
                if not worse.any():
                    break
                lam[worse] *= 0.5
                cand[worse] = Z[idx][worse] - lam[worse, None] * step[worse]
                Fw, Jw = _eval_batch(X, cand[worse])
                Fc[worse], Jc[worse] = Fw, Jw
                rc[worse] = np.linalg.norm(Fw, axis=1)
            moved = ok & np.isfinite(rc)
            tgt = idx[moved]
            small = np.linalg.norm(step[moved] * lam[moved, None], axis=1) <= 1e-14 * (
                1 + np.linalg.norm(Z[tgt], axis=1))
            Z[tgt], F[tgt], J[tgt], res[tgt] = cand[moved], Fc[moved], Jc[moved], rc[moved]
            active[idx[~moved]] = False
            active[tgt[small | (res[tgt] == 0)]] = False
            active[np.linalg.norm(Z, axis=1) > 1e8] = False
    return Z, res


def newton_polish(X: PolyVectorField, z, max_iter: int = 60, tol: float = ZERO_TOL):
    Z, res = newton_batch(X, as_point(z)[None, :], max_iter)
    return Z[0], bool(res[0] <= tol)


def _dedup(points, radius):
    keep = []
    for p in points:
        if all(np.linalg.norm(p - q) > radius for q in keep):
            keep.append(p)
    return keep


def _clean(p, tol=1e-15):
    # strip rounding noise so reports show exact zeros where they belong
    scale = max(1.0, float(np.max(np.abs(p))))
    re = np.where(np.abs(p.real) <= tol * scale, 0.0, p.real)
    im = np.where(np.abs(p.imag) <= tol * scale, 0.0, p.imag)
    return re + 1j * im


def seed_grid(center, radius, per_axis):
    center = as_point(center)
    n = center.shape[0]
    axis = np.linspace(-radius, radius, per_axis)
    grids = np.meshgrid(*([axis] * (2 * n)), indexing="ij")
    flat = [g.ravel() for g in grids]
    return np.stack([center[j] + flat[2 * j] + 1j * flat[2 * j + 1] for j in range(n)], axis=1)


def bezout_bound(X: PolyVectorField) -> int:
    return math.prod(max(d, 1) for d in X.degrees())


def find_singularities(X: PolyVectorField, radius: float, center=None, per_axis: int = 25,
                       dedup_radius: float = 1e-6, classify_points: bool = True):
    """Zeros of X in the closed polydisc of the given radius.

    Seeds form a uniform grid with ``per_axis`` samples along each real axis
    of the box. Results are sorted by (|z|, real parts, imaginary parts).
    """
    if not np.isfinite(radius) or radius <= 0:
        raise ValueError("box radius must be positive and finite")
    n = X.num_vars
    center = np.zeros(n, complex) if center is None else as_point(center)
    if any(not c for c in X.components):
        # a vanishing component leaves a hypersurface worth of candidate zeros
        Z, res = newton_batch(X, seed_grid(center, radius, 5))
        if np.any(res <= ZERO_TOL):
            raise NonIsolatedZeroError("non-isolated zero detected")
        return []
    seeds = seed_grid(center, radius, per_axis)
    Z, res = newton_batch(X, seeds)
    good = (res <= ZERO_TOL) & np.all(np.abs(Z - center) <= radius * (1 + 1e-12), axis=1)
    cands = Z[good]
    # bucket on a rounding well above the Newton noise, then merge buckets
    real = np.concatenate([cands.real, cands.imag], axis=1)
    _, first = np.unique(np.round(real, 7), axis=0, return_index=True)
    reps = list(cands[np.sort(first)])
    reps = _dedup(reps, dedup_radius)
    if len(reps) > bezout_bound(X):
        raise NonIsolatedZeroError("non-isolated zero detected")
    reps.sort(key=lambda p: (round(float(np.linalg.norm(p - center)), 9),
                             tuple(np.round(p.real, 9)), tuple(np.round(p.imag, 9))))
    reps = [_clean(p) for p in reps]
    if not classify_points:
        return [CPoint(tuple(p)) for p in reps]
    return [classify(X, p) for p in reps]


def find_resonance(eigenvalues, max_order: int = 10, tol: float = RESONANCE_TOL):
    """First (i, m) with eigenvalues[i] == <m, eigenvalues>, 2 <= |m| <= max_order."""
    lam = np.asarray(eigenvalues, dtype=complex)
    n = lam.size
    for order in range(2, max_order + 1):
        for m in _compositions(order, n):
            s = np.dot(m, lam)
            for i in range(n):
                if abs(lam[i] - s) <= tol:
                    return i, tuple(m)
    return None


def _compositions(total, parts):
    # multi-indices of length ``parts`` summing to ``total``, lexicographically descending
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def classify(X: PolyVectorField, p) -> SingularPoint:
    coords = as_point(p)
    if np.linalg.norm(evaluate(X, coords)) > CLASSIFY_TOL:
        raise ValueError("point is not a zero of the field")
    J = jacobian(X, coords)
    eig = np.linalg.eigvals(J)
    eig = [complex(round(e.real, 13) + 0.0, round(e.imag, 13) + 0.0) for e in eig]
    eig = tuple(sorted(eig, key=lambda e: (-e.real, -e.imag)))
    smin = np.linalg.svd(J, compute_uv=False).min()
    witness = find_resonance(eig)
    chart = p.chart_id if isinstance(p, CPoint) else "affine0"
    return SingularPoint(CPoint(tuple(coords), chart), J, eig, bool(smin > SINGULAR_VALUE_TOL),
                         witness is not None, witness)


def distance_to_E(p, E) -> float:
    if len(E) == 0:
        raise ValueError("singular set is empty")
    p = as_point(p)
    pts = np.array([s.coords if isinstance(s, SingularPoint) else as_point(s) for s in E])
    return float(np.min(np.linalg.norm(pts - p, axis=1)))
