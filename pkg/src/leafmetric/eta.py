"""Bounds and oracles for the Poincare normalizer eta, and the scans built on them."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .disc import log_star
from .flow import FieldConstants, flow_domain_radius
from .polynomial import CPoint, PolyVectorField, as_point, evaluate
from .singular import SingularPoint, distance_to_E

FLOW_DISC = "flow-disc"
ORACLE = "oracle"
BRODY_CAP = "brody-cap"


@dataclass(frozen=True)
class EtaEstimate:
    point: CPoint
    eta_lo: float
    eta_hi: float
    method: str

    def __post_init__(self):
        if not (0 < self.eta_lo <= self.eta_hi):
            raise ValueError("need 0 < eta_lo <= eta_hi")
        if self.method == ORACLE and self.eta_lo != self.eta_hi:
            raise ValueError("an oracle estimate is a single value")

    @property
    def width(self) -> float:
        return self.eta_hi - self.eta_lo


def eta_lower(X: PolyVectorField, z, constants: FieldConstants, brody_A: float | None = None,
              angles: int = 64) -> EtaEstimate:
    """eta >= r ||X(z)|| where r is the inscribed radius of the flow's time domain in the chart.

    The disc t -> phi_z(r t) lies in the leaf, so it competes in the
    supremum defining eta. With a Brody constant A the value A caps both
    ends of the interval.
    """
    z = as_point(z)
    speed = float(np.linalg.norm(evaluate(X, z)))
    if speed == 0:
        raise ValueError("eta is undefined at a singular point")
    r = flow_domain_radius(X, z, constants, angles=angles)
    lo = r * speed
    hi = math.inf
    method = FLOW_DISC
    if brody_A is not None:
        hi = float(brody_A)
        if lo > hi:
            lo, method = hi, BRODY_CAP
    return EtaEstimate(CPoint(tuple(z)), lo, hi, method)


def eta_oracle_punctured_disc(lambda_abs: float, rho: float, point=None) -> EtaEstimate:
    """Exact eta = 2 |lambda| ln(rho / |lambda|) on the punctured disc of radius rho."""
    if not 0 < lambda_abs < rho:
        raise ValueError("need 0 < |lambda| < rho")
    v = 2.0 * lambda_abs * math.log(rho / lambda_abs)
    pt = CPoint((complex(lambda_abs),)) if point is None else CPoint(tuple(as_point(point)))
    return EtaEstimate(pt, v, v, ORACLE)


def radial_oracle(rho: float = 1.0) -> Callable[[np.ndarray], EtaEstimate]:
    """eta on the radial fixture in the ball of radius rho (leaves are punctured discs)."""
    def est(p):
        return eta_oracle_punctured_disc(float(np.linalg.norm(as_point(p))), rho, p)
    return est


# -- shape fit ----------------------------------------------------------------
@dataclass(frozen=True)
class MlnFit:
    c_lo: float
    c_hi: float
    slope: float
    normalizer: str
    distances: np.ndarray = field(repr=False)
    etas: np.ndarray = field(repr=False)


def _normalizer(kind: str, d, rho):
    if kind == "log*":
        return d * log_star(d)
    if kind == "log-rho":
        return d * np.log(rho / d)
    raise ValueError(f"unknown normalizer {kind!r}")


def shell_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, :n] + 1j * g[:, n:]


def mln_fit(X: PolyVectorField | None, singularity, d_range, samples: int = 9,
            constants: FieldConstants | None = None, eta: Callable | None = None,
            directions: int = 4, normalizer: str = "log*", seed: int = 0) -> MlnFit:
    """Compare eta with d log*(d) on log-spaced shells around a singular point.

    ``eta`` maps a point to an :class:`EtaEstimate`; by default the chart
    lower bound :func:`eta_lower` is used, which needs ``constants``. The
    same direction set is reused on every shell so the regression sees only
    the radial dependence.
    """
    center = singularity.coords if isinstance(singularity, SingularPoint) else as_point(singularity)
    if eta is None:
        if constants is None or X is None:
            raise ValueError("eta_lower needs the field and its chart constants")
        eta = lambda p: eta_lower(X, p, constants)
    rho = constants.chart_radius if constants is not None else 1.0
    d_min, d_max = d_range
    ds = np.geomspace(d_min, d_max, samples)
    dirs = shell_directions(center.size, directions, seed)
    dist, vals = [], []
    for d in ds:
        for u in dirs:
            est = eta(center + d * u)
            dist.append(d)
            vals.append(est.eta_lo)
    dist, vals = np.array(dist), np.array(vals)
    ratio = vals / _normalizer(normalizer, dist, rho)
    slope = float(np.polyfit(np.log(_normalizer(normalizer, dist, rho)), np.log(vals), 1)[0])
    return MlnFit(float(ratio.min()), float(ratio.max()), slope, normalizer, dist, vals)


# -- leafwise length ----------------------------------------------------------
def leaf_path_poincare_length(path: Sequence, etas: Sequence[EtaEstimate]) -> tuple[float, float]:
    """Trapezoid sum of 2 ||d gamma|| / eta; returns (L_lo from eta_hi, L_hi from eta_lo)."""
    if len(etas) != len(path):
        raise ValueError("one eta estimate per path point is required")
    if any(e is None for e in etas):
        raise ValueError("eta estimate missing")
    pts = np.array([as_point(p) for p in path])
    if len(pts) < 2:
        return 0.0, 0.0
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    inv_hi = np.array([1.0 / e.eta_hi for e in etas])
    inv_lo = np.array([1.0 / e.eta_lo for e in etas])
    L_lo = float(np.sum(seg * (inv_hi[:-1] + inv_hi[1:])))
    L_hi = float(np.sum(seg * (inv_lo[:-1] + inv_lo[1:])))
    return L_lo, L_hi


# -- Holder scan --------------------------------------------------------------
@dataclass(frozen=True)
class HolderSample:
    x: np.ndarray
    y: np.ndarray
    eta_x: EtaEstimate
    eta_y: EtaEstimate
    d_xy: float
    d_xE: float
    d_yE: float
    modulus: float
    delta_eta: float

    def satisfied(self, C: float, alpha: float) -> bool:
        return self.delta_eta <= C * self.modulus ** alpha * (1 + 1e-12)


@dataclass
class HolderScan:
    samples: list
    skipped: list  # (index, reason)
    C: float
    alpha: float

    @property
    def fraction_satisfied(self) -> float:
        if not self.samples:
            return 1.0
        return sum(s.satisfied(self.C, self.alpha) for s in self.samples) / len(self.samples)


def holder_modulus(d_xE, d_yE, d_xy) -> float:
    return max(log_star(d_xE), log_star(d_yE)) / log_star(d_xy)


def fit_holder(deltas, moduli, C_max: float = math.inf, grid: int = 1000):
    """Largest alpha in (0, 1], then smallest C, with delta <= C M^alpha on every sample.

    For a given alpha the smallest admissible C is max(delta / M^alpha). With
    no cap every alpha is admissible and alpha = 1 wins; ``C_max`` restricts
    the search to exponents whose C stays below the cap.
    """
    deltas, moduli = np.asarray(deltas, float), np.asarray(moduli, float)
    keep = deltas > 0
    if not keep.any():
        return 0.0, 1.0
    ld, lm = np.log(deltas[keep]), np.log(moduli[keep])
    for alpha in np.linspace(1.0, 1.0 / grid, grid):
        C = float(np.exp(np.max(ld - alpha * lm)))
        if C <= C_max:
            return C, float(alpha)
    raise RuntimeError("no exponent in (0, 1] keeps C below the cap")


def holder_scan(pairs, E, eta: Callable, mode: str = ORACLE, C: float | None = None,
                alpha: float | None = None, C_max: float = math.inf) -> HolderScan:
    """Evaluate |eta(x) - eta(y)| against the log* modulus for each pair.

    ``mode`` "oracle" uses exact values; "bounds" uses |eta_lo(x) - eta_lo(y)|
    plus both interval widths. Pairs with d(x, y) >= min(d(x,E), d(y,E)) / 4
    are skipped. (C, alpha) are fitted unless given.
    """
    samples, skipped = [], []
    for i, (x, y) in enumerate(pairs):
        x, y = as_point(x), as_point(y)
        dxE, dyE = distance_to_E(x, E), distance_to_E(y, E)
        dxy = float(np.linalg.norm(x - y))
        if not dxy < min(dxE, dyE) / 4:
            skipped.append((i, "pair outside the mutual-chart regime"))
            continue
        if dxy == 0:
            ex = eta(x)
            samples.append(HolderSample(x, y, ex, ex, 0.0, dxE, dyE, 0.0, 0.0))
            continue
        ex, ey = eta(x), eta(y)
        if mode == ORACLE:
            delta = abs(ex.eta_lo - ey.eta_lo)
        elif mode == "bounds":
            delta = abs(ex.eta_lo - ey.eta_lo) + ex.width + ey.width
        else:
            raise ValueError(f"unknown mode {mode!r}")
        samples.append(HolderSample(x, y, ex, ey, dxy, dxE, dyE, holder_modulus(dxE, dyE, dxy), delta))
    if C is None or alpha is None:
        live = [s for s in samples if s.d_xy > 0]
        C, alpha = fit_holder([s.delta_eta for s in live], [s.modulus for s in live], C_max)
    return HolderScan(samples, skipped, C, alpha)


def write_holder_csv(scan: HolderScan, path, header_comment: str | None = None):
    fmt = lambda p: " ".join(f"{c.real!r}{'+' if c.imag >= 0 else '-'}{abs(c.imag)!r}j" for c in p)
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh)
        w.writerow(["x", "y", "d_xy", "d_xE", "d_yE", "eta_x_lo", "eta_x_hi", "eta_y_lo",
                    "eta_y_hi", "modulus", "satisfied"])
        for s in scan.samples:
            w.writerow([fmt(s.x), fmt(s.y), repr(s.d_xy), repr(s.d_xE), repr(s.d_yE),
                        repr(s.eta_x.eta_lo), repr(s.eta_x.eta_hi), repr(s.eta_y.eta_lo),
                        repr(s.eta_y.eta_hi), repr(s.modulus), int(s.satisfied(scan.C, scan.alpha))])
