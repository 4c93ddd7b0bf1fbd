"""Principal solutions of the Beltrami equation dbar q = mu dq on a square grid.

Fourier conventions: for a mode exp(i(kx x + ky y)) write xi = kx + i ky.
Then d = (d/dx - i d/dy)/2 has symbol (i/2) conj(xi), dbar has symbol
(i/2) xi, the Beurling transform S = d dbar^{-1} has symbol conj(xi)/xi and
the Cauchy transform dbar^{-1} has symbol -2i/xi.

The solver works on a periodic grid twice the size of the data square.
With omega = dbar q the equation becomes omega = mu (1 + S omega), solved
by Neumann iteration, and q = z + m conj(z) + C(omega - m) with m the mean
of omega, so that dbar q = omega and d q = 1 + S omega hold exactly in the
discrete spectral sense.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .covers import LeafCover, project_to_leaf


class BeltramiError(RuntimeError):
    pass


def grid_axis(N: int, L: float) -> np.ndarray:
    """x_k = -L + k h with h = 2L/N; contains 0 at k = N/2."""
    return -L + (2.0 * L / N) * np.arange(N)


def grid_points(N: int, L: float) -> np.ndarray:
    x = grid_axis(N, L)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return X + 1j * Y


def _wirtinger_fd(f, h):
    """Centered-difference (d f, dbar f) on the interior; edges are NaN."""
    fx = np.full_like(f, np.nan)
    fy = np.full_like(f, np.nan)
    fx[1:-1, :] = (f[2:, :] - f[:-2, :]) / (2 * h)
    fy[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


@dataclass(frozen=True)
class BeltramiField:
    samples: np.ndarray = field(repr=False)
    L: float
    support_radius: float | None = None

    def __post_init__(self):
        N = self.samples.shape[0]
        if self.samples.shape != (N, N) or N & (N - 1):
            raise ValueError("samples must be a square grid with power-of-two size")
        if self.support_radius is not None and self.support_radius > 0.9 * self.L + 1e-12:
            raise ValueError("support radius must be at most 0.9 L")

    @property
    def grid_size(self) -> int:
        return self.samples.shape[0]

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.grid_size

    @property
    def sup_norm(self) -> float:
        return float(np.nanmax(np.abs(self.samples)))

    @property
    def c1_norm(self) -> float:
        """max over the grid of |mu| + |d mu| (centered differences)."""
        d, _ = _wirtinger_fd(self.samples, self.h)
        return float(np.nanmax(np.abs(self.samples) + np.abs(d)))

    @classmethod
    def from_function(cls, fn, N: int = 512, L: float = 2.0, support_radius: float = 1.8):
        Z = grid_points(N, L)
        mu = np.where(np.abs(Z) <= support_radius, fn(Z), 0.0).astype(complex)
        return cls(mu, L, support_radius)


def gaussian_mu(amplitude: complex, sigma: float = 0.4, N: int = 512, L: float = 2.0,
                support_radius: float = 1.8, center: complex = 0j) -> BeltramiField:
    """c exp(-|z - center|^2 / sigma^2), cut off at the support radius (negligible there)."""
    return BeltramiField.from_function(
        lambda Z: amplitude * np.exp(-np.abs(Z - center) ** 2 / sigma ** 2), N, L, support_radius)


@dataclass(frozen=True)
class GridMap:
    values: np.ndarray = field(repr=False)
    L: float
    normalization: str = "principal"
    residual: float = 0.0
    iterations: int = 0

    @property
    def grid_size(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.grid_size

    def deviation(self) -> float:
        """sup |q - z| over the grid."""
        return float(np.max(np.abs(self.values - grid_points(self.grid_size, self.L))))

    def min_separation(self) -> float:
        from scipy.spatial import cKDTree

        pts = np.column_stack([self.values.real.ravel(), self.values.imag.ravel()])
        d, _ = cKDTree(pts).query(pts, k=2)
        return float(d[:, 1].min())

    def header(self) -> dict:
        return {"grid_size": self.grid_size, "L": self.L, "normalization": self.normalization}

    def write(self, csv_path, json_path):
        with open(json_path, "w") as fh:
            json.dump(self.header(), fh)
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "re_q", "im_q"])
            for k, q in enumerate(self.values.ravel()):
                w.writerow([k, repr(float(q.real)), repr(float(q.imag))])


def _symbols(M: int, H: float):
    k = 2 * np.pi * np.fft.fftfreq(M, d=H)
    KX, KY = np.meshgrid(k, k, indexing="ij")
    xi = KX + 1j * KY
    zero = xi == 0
    xi_safe = np.where(zero, 1.0, xi)
    beurling = np.where(zero, 0.0, np.conj(xi) / xi_safe)
    cauchy = np.where(zero, 0.0, -2j / xi_safe)
    return xi, beurling, cauchy


def solve_beltrami(mu: BeltramiField, max_iters: int = 200, tol: float = 1e-10,
                   pad: int = 2) -> GridMap:
    """Principal solution normalized by q(0) = 0, with a spectral residual certificate."""
    if mu.sup_norm > 0.5:
        raise BeltramiError("ellipticity bound violated: sup |mu| must be at most 0.5")
    N, L = mu.grid_size, mu.L
    if not np.any(mu.samples):
        return GridMap(grid_points(N, L), L, "principal", 0.0, 0)
    M = pad * N
    big = np.zeros((M, M), complex)
    off = (M - N) // 2
    big[off:off + N, off:off + N] = mu.samples
    H = mu.h
    _, S, C = _symbols(M, H)
    omega = big.copy()
    for it in range(1, max_iters + 1):
        new = big * (1 + np.fft.ifft2(S * np.fft.fft2(omega)))
        step = float(np.max(np.abs(new - omega)))
        omega = new
        if step <= tol * 1e-2:
            break
    else:
        raise BeltramiError(f"Neumann iteration did not converge in {max_iters} steps")
    axis = -pad * L + H * np.arange(M)
    ZX, ZY = np.meshgrid(axis, axis, indexing="ij")
    Z = ZX + 1j * ZY
    m = omega.mean()
    F = np.fft.fft2(omega - m)
    q = Z + m * np.conj(Z) + np.fft.ifft2(C * F)
    dq = 1 + np.fft.ifft2(S * F)
    dbar_q = omega
    res_field = np.abs(dbar_q - big * dq)
    inner = res_field[off + N // 4: off + 3 * N // 4, off + N // 4: off + 3 * N // 4]
    residual = float(inner.max())
    if residual > tol:
        raise BeltramiError(f"residual {residual:.2e} above tolerance {tol:.2e}")
    q = q[off:off + N, off:off + N]
    q = q - q[N // 2, N // 2]
    return GridMap(q, L, "principal", residual, it)


def mu_of_map(psi: GridMap) -> BeltramiField:
    """mu = dbar psi / d psi by centered differences; the outer ring of cells is NaN."""
    d, dbar = _wirtinger_fd(psi.values, psi.h)
    if np.any(np.abs(d[1:-1, 1:-1]) < 1e-300):
        raise BeltramiError("d psi vanishes on the grid")
    with np.errstate(invalid="ignore"):
        return BeltramiField(dbar / d, psi.L, None)


def interior_c1(mu: np.ndarray, h: float) -> float:
    """max |mu| + |d mu| over points where the differences are defined."""
    d, _ = _wirtinger_fd(mu, h)
    return float(np.nanmax(np.abs(mu) + np.abs(d)))


def chain_mu_probe(chain, p: int, rho: float, grid: int = 256, patch: float = 0.02,
                   probes: int = 4) -> float:
    """C^1 size of the Beltrami coefficient of the lifted projection along a chain.

    At a few chain indices j the projection Phi_{x_j y_j} is conjugated by the
    explicit leaf covers u_x (base x_j) and u_y (base y_j) of the diag(p, 1)
    fixture in the ball of radius rho, sampled on a ``grid`` x ``grid``
    patch of half-width ``patch`` around 0, and mu is measured by centered
    differences. Returns the largest measured max(|mu| + |d mu|).
    """
    if chain.break_index is not None:
        raise BeltramiError("chain broke before reaching its budget")
    idx = np.unique(np.linspace(0, chain.N, probes).round().astype(int))
    worst = 0.0
    axis = patch * np.linspace(-1, 1, grid)
    h = axis[1] - axis[0]
    ZX, ZY = np.meshgrid(axis, axis, indexing="ij")
    zeta = ZX + 1j * ZY
    for j in idx:
        xj, yj = np.asarray(chain.x[j]), np.asarray(chain.y[j])
        if np.array_equal(xj, yj):
            continue
        ux = LeafCover.through(xj, p, rho)
        uy = LeafCover.through(yj, p, rho)
        pts = ux(zeta)
        sig = project_to_leaf(uy, pts, pts[..., 1] * (yj[1] / xj[1]))
        w = uy.inverse_sigma(sig)
        if np.any(np.abs(w) >= 1) or not np.all(np.isfinite(w)):
            raise BeltramiError("lift left the cover's fundamental domain")
        d, dbar = _wirtinger_fd(w, h)
        with np.errstate(invalid="ignore"):
            mu = dbar / d
        worst = max(worst, interior_c1(mu, h))
    return worst
