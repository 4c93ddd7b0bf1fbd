"""Complex-time flows of polynomial vector fields.

The flow phi_z(t) is integrated along the straight ray s -> s*t, s in [0, 1],
with an embedded Dormand-Prince 5(4) pair.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .polynomial import PolyVectorField, as_point, evaluate, jacobian


class FlowError(RuntimeError):
    pass


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _dp_step(f, y, h, k1):
    """One DP5 step of size h; returns (y_new, err_vec, k7)."""
    k = [k1]
    for i in range(1, 7):
        a = _A[i]
        yi = y.copy()
        for j, aij in enumerate(a):
            if aij:
                yi += (h * aij) * k[j]
        k.append(f(yi))
    y5 = y.copy()
    err = np.zeros_like(y)
    for j in range(7):
        if _B5[j]:
            y5 += (h * _B5[j]) * k[j]
        if _E[j]:
            err += (h * _E[j]) * k[j]
    return y5, err, k[6]


def _field_fn(X: PolyVectorField):
    kern = X.kernels[0]

    def f(y):
        return np.array(kern(*y), dtype=complex)

    return f


def integrate(rhs, y0, s_end, tol, h0=1e-2, bound=None, max_steps=100000, trace=None, event=None):
    """Adaptive DP5(4) integration of y' = rhs(y) over real s in [0, s_end].

    ``bound`` aborts with :class:`FlowError` once max|y| exceeds it. If
    ``event(y)`` is given, integration stops at the first sign change of the
    event from negative to non-negative and returns the crossing location.

    Returns (s_reached, y, err_accumulated, steps, hit_event).
    """
    y = np.array(y0, dtype=complex)
    s = 0.0
    if s_end == 0:
        return 0.0, y, 0.0, 0, False
    h = min(h0, s_end)
    k1 = rhs(y)
    err_total = 0.0
    steps = 0
    hmin = 1e-14 * max(1.0, s_end)
    while s < s_end:
        if steps >= max_steps:
            raise FlowError("too many steps")
        h = min(h, s_end - s)
        y_new, err_vec, k7 = _dp_step(rhs, y, h, k1)
        scale = tol * (1.0 + np.maximum(np.abs(y), np.abs(y_new)))
        err = float(np.max(np.abs(err_vec) / scale)) if y.size else 0.0
        if not np.isfinite(err):
            err = 1e10
        if err <= 1.0:
            if event is not None and event(y_new) >= 0:
                def g(d):
                    return event(_dp_step(rhs, y, d, k1)[0])
                g_end = event(y_new)
                if g_end == 0:
                    d_star = h
                else:
                    d_star = brentq(g, 0.0, h, xtol=1e-14 * max(1.0, s), rtol=1e-15)
                y_star = _dp_step(rhs, y, d_star, k1)[0]
                return s + d_star, y_star, err_total, steps + 1, True
            s += h
            steps += 1
            err_total += float(np.max(np.abs(err_vec)))
            y = y_new
            k1 = k7
            if trace is not None:
                trace.append((s, y.copy(), h, float(np.max(np.abs(err_vec)))))
            if bound is not None and np.max(np.abs(y)) > bound:
                raise FlowError("flow escaped the safety polydisc")
            fac = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
            h *= fac
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < hmin:
                raise FlowError("step size underflow")
    return s, y, err_total, steps, False


@dataclass(frozen=True)
class FlowSegment:
    start: np.ndarray
    time: complex
    end: np.ndarray
    first_derivative: np.ndarray
    second_derivative: np.ndarray
    third_derivative: np.ndarray
    error_estimate: float
    steps_taken: int
    trace: list | None = field(default=None, repr=False, compare=False)


def derivative_stack(X: PolyVectorField, p):
    """(phi', phi'', phi''') at a point of the flow, from the field alone."""
    v, d2, d3 = X.kernels[2](*as_point(p))
    return np.array(v, complex), np.array(d2, complex), np.array(d3, complex)


def flow(X: PolyVectorField, z, t: complex, tol: float = 1e-12, bound: float = 1e6,
         record_trace: bool = False) -> FlowSegment:
    """Integrate d phi/dt = X(phi) from z to complex time t."""
    if tol < 1e-13:
        raise ValueError("tol must be >= 1e-13")
    z = as_point(z)
    if z.shape[0] != X.num_vars:
        raise ValueError("dimension mismatch")
    t = complex(t)
    f = _field_fn(X)
    trace = [] if record_trace else None
    if t == 0:
        end, err, steps = z.copy(), 0.0, 0
    else:
        def rhs(y):
            return t * f(y)
        # initial step scaled so that |t| * |X| * h is moderate
        speed = abs(t) * (np.linalg.norm(f(z)) + 1e-300) / (np.linalg.norm(z) + 1e-300)
        h0 = min(1e-2, 0.1 / max(speed, 1e-12))
        _, end, err, steps, _ = integrate(rhs, z, 1.0, tol, h0=h0, bound=bound, trace=trace)
    d1, d2, d3 = derivative_stack(X, end)
    return FlowSegment(z.copy(), t, end, d1, d2, d3, err, steps, trace)


def write_trace_csv(segment: FlowSegment, path, header_comment: str | None = None):
    """CSV columns: s, Re/Im of each coordinate, step size, local error."""
    if segment.trace is None:
        raise ValueError("flow was not run with record_trace=True")
    n = segment.start.shape[0]
    header = ["s"] + [f"{p}{j}" for j in range(n) for p in ("re_z", "im_z")] + ["step", "local_error"]
    parts = lambda y: [repr(float(v)) for c in y for v in (c.real, c.imag)]
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh)
        w.writerow(header)
        w.writerow(["0.0"] + parts(segment.start) + ["0.0", "0.0"])
        for s, y, h, e in segment.trace:
            w.writerow([repr(float(s))] + parts(y) + [repr(float(h)), repr(float(e))])


def local_flow(X: PolyVectorField, z, t: complex, steps: int) -> np.ndarray:
    """Fixed-step DP5 flow: a smooth (polynomial) function of t.

    Used where the flow map must be differentiated or solved for, so that
    adaptive step selection does not introduce tiny discontinuities.
    """
    f = _field_fn(X)
    y = as_point(z).copy()
    t = complex(t)
    if t == 0:
        return y
    h = 1.0 / steps

    def rhs(v):
        return t * f(v)

    k1 = rhs(y)
    for _ in range(steps):
        y, _, k1 = _dp_step(rhs, y, h, k1)
    return y


def local_steps(X: PolyVectorField, z, time_bound: float, max_hl: float = 0.02) -> int:
    """Step count for :func:`local_flow` keeping |h t| * |DX| below max_hl."""
    lip = np.linalg.norm(jacobian(X, z), 2)
    return max(8, int(math.ceil(time_bound * lip / max_hl)))


# -- field constants -----------------------------------------------------------
@dataclass(frozen=True)
class FieldConstants:
    C0: float
    C1: float
    r0: float
    chart_radius: float
    center: tuple = (0j, 0j)
    chart_kind: str = "ball"

    def inside(self, p) -> bool:
        return _chart_gap(self, as_point(p)) < 0

    def to_json(self):
        return {"C0": self.C0, "C1": self.C1, "r0": self.r0, "chart_radius": self.chart_radius,
                "center": [[c.real, c.imag] for c in self.center], "chart_kind": self.chart_kind}


def _chart_gap(chart: FieldConstants, p):
    d = p - np.asarray(chart.center, dtype=complex)
    if chart.chart_kind == "polydisc":
        return float(np.max(np.abs(d))) - chart.chart_radius
    return float(np.linalg.norm(d)) - chart.chart_radius


def sample_ball(rng, center, radius, count):
    """Points in a Euclidean ball of C^n: half uniform by volume, half on shells."""
    center = np.asarray(center, dtype=complex)
    n = center.shape[0]
    g = rng.normal(size=(count, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    u = rng.uniform(size=count)
    r = np.where(np.arange(count) % 2 == 0, u ** (1 / (2 * n)), u)
    r[::7] = 1.0
    pts = g[:, :n] + 1j * g[:, n:]
    return center + radius * r[:, None] * pts


def estimate_field_constants(X: PolyVectorField, chart_radius: float, samples: int = 2000,
                             center=None, seed: int = 0, safety: float = 1.05,
                             chart_kind: str = "ball") -> FieldConstants:
    """Sampled two-sided bound C0 and derivative bound C1 on a singular chart."""
    from .singular import newton_polish

    n = X.num_vars
    center = np.zeros(n, complex) if center is None else as_point(center)
    if np.linalg.norm(evaluate(X, center)) > 1e-9:
        raise ValueError("the chart center must be a zero of the field")
    rng = np.random.default_rng(seed)
    pts = sample_ball(rng, center, chart_radius, samples)
    pts = pts[np.linalg.norm(pts - center, axis=1) > 1e-3 * chart_radius]
    ratios = []
    c1_vals = []
    for p in pts:
        v, d2, d3 = derivative_stack(X, p)
        nv = np.linalg.norm(v)
        nz = np.linalg.norm(p - center)
        if nv == 0:
            raise ValueError("field bound violated: second singularity in chart")
        ratios.append(max(nv / nz, nz / nv))
        c1_vals.append(max(np.linalg.norm(jacobian(X, p), 2), np.linalg.norm(d3) / nv))
    ratios = np.array(ratios)
    # a second zero in the chart shows up as an unbounded ratio; confirm by Newton
    worst = np.argsort(-ratios)[:8]
    for idx in worst:
        z, ok = newton_polish(X, pts[idx])
        if ok and np.linalg.norm(z - center) > 1e-6 and np.linalg.norm(z - center) < chart_radius:
            raise ValueError("field bound violated: second singularity in chart")
    C0 = safety * float(ratios.max())
    C1 = safety * float(max(c1_vals))
    return FieldConstants(C0, C1, math.log(1.5) / C0, float(chart_radius),
                          tuple(complex(c) for c in center), chart_kind)


def flow_domain_radius(X: PolyVectorField, z, chart: FieldConstants, angles: int = 64,
                       tol: float = 1e-9, max_radius: float | None = None) -> float:
    """Inscribed radius of the complex-time disc on which phi_z stays in the chart.

    For each of ``angles`` directions e^{i theta} the ray s -> phi_z(s e^{i theta})
    is integrated until it first leaves the chart; the exit is located by
    root finding inside the last step. The minimum over directions is
    returned, capped at ``max_radius``.
    """
    z = as_point(z)
    gap = _chart_gap(chart, z)
    if gap >= 0:
        raise ValueError("point outside chart")
    center = np.asarray(chart.center, dtype=complex)
    dist = np.linalg.norm(z - center)
    if dist == 0:
        raise ValueError("point is the chart center")
    if max_radius is None:
        max_radius = chart.C0 * (math.log(chart.chart_radius / dist) + 1.0) + 1.0
    f = _field_fn(X)

    def event(y):
        return _chart_gap(chart, y)

    best = max_radius
    for k in range(angles):
        rot = complex(math.cos(2 * math.pi * k / angles), math.sin(2 * math.pi * k / angles))

        def rhs(y, rot=rot):
            return rot * f(y)

        try:
            s, _, _, _, hit = integrate(rhs, z, best, tol, h0=min(1e-2, 0.1 * best), event=event)
        except FlowError:
            # blow-up or step underflow before the cap: treat the failure point as exit
            s, hit = _bisect_failure(rhs, z, best, tol, event), True
        if hit:
            best = min(best, s)
    return best


def _bisect_failure(rhs, z, s_max, tol, event):
    lo, hi = 0.0, s_max
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        try:
            _, _, _, _, hit = integrate(rhs, z, mid, tol, event=event)
            if hit:
                hi = mid
            else:
                lo = mid
        except FlowError:
            hi = mid
    return lo
