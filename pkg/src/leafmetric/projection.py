"""Leaf-to-leaf orthogonal projection along a polynomial vector field.

For nearby points x, y the equation

    g(t, u) = <phi_x(t) - phi_y(u), X(phi_y(u))> = 0

defines u as a real-analytic function of t. Newton's method runs on the
real pair (Re u, Im u) using the Wirtinger derivatives

    a = dg/du    = -||X(phi_y(u))||^2
    b = dg/dubar = <phi_x(t) - phi_y(u), DX X (phi_y(u))>

so that the step solves a*d + b*conj(d) = -g and the real Jacobian is
|a|^2 - |b|^2.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from scipy.integrate import simpson

from .flow import FlowError, _dp_step, _field_fn, derivative_stack, integrate, local_flow
from .polynomial import PolyVectorField, as_point, evaluate, hdot, jacobian
from .singular import distance_to_E


class ProjectionError(RuntimeError):
    pass


MAX_NEWTON = 50


@dataclass(frozen=True)
class ProjectionProbe:
    x: np.ndarray
    y: np.ndarray
    t: complex
    u: complex
    g_residual: float
    jac_u: float
    newton_iters: int
    x_t: np.ndarray = field(repr=False)  # phi_x(t)
    y_u: np.ndarray = field(repr=False)  # phi_y(u), the projected point


def _steps_for(X, p, time_bound, max_hl=0.01):
    lip = np.linalg.norm(jacobian(X, p), 2)
    return max(8, int(math.ceil(time_bound * lip / max_hl)))


def g_value(X: PolyVectorField, x, y, t: complex, u: complex, steps: int | None = None) -> complex:
    x, y = as_point(x), as_point(y)
    if steps is None:
        steps = _steps_for(X, x, abs(t) + abs(u) + 0.1)
    A = local_flow(X, x, t, steps)
    Y = local_flow(X, y, u, steps)
    return complex(hdot(A - Y, evaluate(X, Y)))


def project_time(X: PolyVectorField, x, y, t: complex, u0: complex | None = None,
                 tol: float = 1e-12, time_bound: float | None = None,
                 steps: int | None = None) -> ProjectionProbe:
    """Solve g(t, u) = 0 for u near t by Wirtinger-Newton.

    The residual target is ``tol * ||X(x)|| * ||x - y||`` with a floor at the
    rounding level of the inner product. ``newton_iters`` counts residual
    evaluations, so an exact seed reports 1.
    """
    x, y = as_point(x), as_point(y)
    t = complex(t)
    if time_bound is not None and abs(t) > time_bound:
        raise ProjectionError(f"|t| = {abs(t):.3g} exceeds the admissible time bound {time_bound:.3g}")
    u = t if u0 is None else complex(u0)
    if steps is None:
        steps = _steps_for(X, x, 2 * abs(t) + abs(u - t) + 0.05)
    A = local_flow(X, x, t, steps)
    nX = float(np.linalg.norm(evaluate(X, x)))
    scale = max(float(np.linalg.norm(A)), float(np.linalg.norm(y)))
    target = max(tol * nX * float(np.linalg.norm(x - y)), 4e-16 * scale * nX)
    iters = 0
    prev = math.inf
    while True:
        iters += 1
        Y = local_flow(X, y, u, steps)
        v, d2, _ = derivative_stack(X, Y)
        diff = A - Y
        g = complex(hdot(diff, v))
        a = -float(np.real(hdot(v, v)))
        b = complex(hdot(diff, d2))
        jac = a * a - abs(b) ** 2
        r = abs(g)
        if r <= target or (r <= 64 * target and r >= prev):
            if jac <= 0:
                raise ProjectionError("non-positive Jacobian at the solution")
            return ProjectionProbe(x, y, t, complex(u), r, jac, iters, A, Y)
        if iters > MAX_NEWTON:
            raise ProjectionError("Newton did not converge within 50 iterations")
        if jac <= 0:
            raise ProjectionError("non-positive Jacobian during Newton iteration")
        prev = r
        u = u + (-g * a + b * np.conj(g)) / jac


def invert_time(X: PolyVectorField, x, target, t0: complex | None = None, steps: int | None = None,
                max_iter: int = 40) -> complex:
    """Time t with phi_x(t) = target, by Gauss-Newton on the holomorphic flow."""
    x, target = as_point(x), as_point(target)
    vx = evaluate(X, x)
    if t0 is None:
        t0 = complex(hdot(target - x, vx) / hdot(vx, vx).real)
    t = complex(t0)
    if steps is None:
        steps = _steps_for(X, x, 2 * abs(t) + 0.05)
    best = math.inf
    for _ in range(max_iter):
        P = local_flow(X, x, t, steps)
        v = evaluate(X, P)
        res = target - P
        nr = float(np.linalg.norm(res))
        dt = complex(hdot(res, v) / hdot(v, v).real)
        if nr == 0 or abs(dt) <= 1e-16 * max(1.0, abs(t)) or nr >= best:
            break
        best = nr
        t += dt
    P = local_flow(X, x, t, steps)
    err = float(np.linalg.norm(target - P))
    if err > 1e-9 * (float(np.linalg.norm(target - x)) + 1e-3 * float(np.linalg.norm(target))):
        raise ProjectionError("point is not on the local plaque of x")
    return t


def phi(X: PolyVectorField, x, y, x_prime, t_hint: complex | None = None,
        tol: float = 1e-12) -> np.ndarray:
    """The projection of a plaque point x' of L_x onto the leaf of y."""
    x, y, xp = as_point(x), as_point(y), as_point(x_prime)
    t = invert_time(X, x, xp, t_hint)
    steps = _steps_for(X, x, 2 * abs(t) + 0.05)
    return project_time(X, x, y, t, tol=tol, steps=steps).y_u


def orthogonality_residual(X, x_prime, image) -> float:
    xp, im = as_point(x_prime), as_point(image)
    return abs(complex(hdot(xp - im, evaluate(X, im))))


@dataclass(frozen=True)
class ProjectionNorms:
    c0: float
    c1: float
    c2: float
    separation: float
    field_norm: float


def projection_norms(X: PolyVectorField, x, y, probe_radius: float, grid: int = 9) -> ProjectionNorms:
    """Sup norms of Phi - id and of its first and second t-derivatives on a time grid.

    The grid has ``grid`` x ``grid`` points with spacing probe_radius / 8.
    Derivatives are divided by ||X(x)|| per order, which turns t-derivatives
    into derivatives along the leaf at unit ambient speed.
    """
    x, y = as_point(x), as_point(y)
    h = probe_radius / 8.0
    half = grid // 2
    steps = _steps_for(X, x, 2 * probe_radius + 0.05)
    D = np.empty((grid, grid, x.size), complex)
    for j in range(grid):
        for k in range(grid):
            t = complex((j - half) * h, (k - half) * h)
            pr = project_time(X, x, y, t, steps=steps)
            D[j, k] = pr.y_u - pr.x_t
    nX = float(np.linalg.norm(evaluate(X, x)))
    c0 = float(np.max(np.linalg.norm(D, axis=2)))
    Ds = (D[2:, 1:-1] - D[:-2, 1:-1]) / (2 * h)
    Dt = (D[1:-1, 2:] - D[1:-1, :-2]) / (2 * h)
    Dss = (D[2:, 1:-1] - 2 * D[1:-1, 1:-1] + D[:-2, 1:-1]) / h ** 2
    Dtt = (D[1:-1, 2:] - 2 * D[1:-1, 1:-1] + D[1:-1, :-2]) / h ** 2
    Dst = (D[2:, 2:] - D[2:, :-2] - D[:-2, 2:] + D[:-2, :-2]) / (4 * h * h)
    n = lambda A: float(np.max(np.linalg.norm(A, axis=2)))
    c1 = max(n(Ds), n(Dt)) / nX
    c2 = max(n(Dss), n(Dtt), n(Dst)) / nX ** 2
    return ProjectionNorms(c0, c1, c2, float(np.linalg.norm(x - y)), nX)


def transverse_partner(X: PolyVectorField, x, separation: float, phase: float = 0.0) -> np.ndarray:
    """x plus a vector of the given length Hermitian-orthogonal to X(x)."""
    x = as_point(x)
    v = evaluate(X, x)
    if x.size != 2:
        raise ValueError("transverse_partner is implemented for C^2")
    n = np.array([-np.conj(v[1]), np.conj(v[0])])
    n /= np.linalg.norm(n)
    return x + separation * np.exp(1j * phase) * n


# -- chains -------------------------------------------------------------------
@dataclass
class ChainRecord:
    eps0: float
    times: list
    x: list
    y: list
    d_E: list
    d_xy: list
    step_ratios: list
    step_lengths: list
    poincare_length: list
    path_kind: str = "flow-ray"
    break_index: int | None = None
    break_reason: str | None = None

    @property
    def N(self) -> int:
        return len(self.x) - 1

    def to_rows(self):
        for j in range(len(self.x)):
            yield {
                "j": j,
                "xi": self.times[j],
                "x": self.x[j],
                "y": self.y[j],
                "d_xE": self.d_E[j],
                "d_xy": self.d_xy[j],
                "step_ratio": self.step_ratios[j],
            }


def _fmt_c(c):
    c = complex(c)
    return f"{c.real!r}{'+' if c.imag >= 0 or math.isnan(c.imag) else '-'}{abs(c.imag)!r}j"


def write_chain_csv(chain: ChainRecord, path, header_comment: str | None = None):
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        w = csv.writer(fh)
        w.writerow(["j", "xi", "x", "y", "d_xE", "d_xy", "step_ratio"])
        for row in chain.to_rows():
            w.writerow([row["j"], _fmt_c(row["xi"]), " ".join(_fmt_c(c) for c in row["x"]),
                        " ".join(_fmt_c(c) for c in row["y"]), repr(row["d_xE"]),
                        repr(row["d_xy"]), repr(row["step_ratio"])])


def leaf_step(X: PolyVectorField, x, arc_length: float, direction: complex = 1.0, tol: float = 1e-12):
    """Real time s with arc length of s -> phi_x(direction * s) equal to ``arc_length``."""
    f = _field_fn(X)
    direction = complex(direction) / abs(direction)
    n = x.size

    def rhs(state):
        v = f(state[:n])
        out = np.empty(n + 1, complex)
        out[:n] = direction * v
        out[n] = np.linalg.norm(v)
        return out

    state0 = np.concatenate([x, [0j]])
    s_cap = 10.0 * arc_length / max(float(np.linalg.norm(f(x))), 1e-300) + 1.0
    s, state, _, _, hit = integrate(rhs, state0, s_cap, tol, h0=0.1 * s_cap / 10,
                                    event=lambda st: st[n].real - arc_length)
    if not hit:
        raise FlowError("arc length target not reached")
    return s


def chain_projections(X: PolyVectorField, x, y, eps0: float, R: float, E,
                      eta: Callable[[np.ndarray], float], eps1: float = 0.02,
                      direction: complex = 1.0, time_bound: float | None = None,
                      max_steps: int = 20000, check_start: bool = True) -> ChainRecord:
    """March x_j along the flow ray with leaf steps eps0 * d(x_j, E), projecting y_j along.

    ``eta`` returns a lower bound for the Poincare normalizer at a point; the
    accumulated length sum (||dx|| (1/eta_j + 1/eta_{j+1})) therefore
    over-estimates the leafwise Poincare length. The chain stops once that
    length exceeds R, or records a break when ||x_j - y_j|| > eps1 d(x_j, E).
    """
    x, y = as_point(x), as_point(y)
    dE = distance_to_E(x, E)
    dxy = float(np.linalg.norm(x - y))
    if check_start and dxy > eps1 * dE:
        raise ProjectionError("initial pair violates the closeness precondition")
    direction = complex(direction) / abs(direction)
    rec = ChainRecord(eps0, [0j], [x], [y], [dE], [dxy], [dxy / dE], [], [0.0])
    eta_prev = eta(x)
    xi = 0j
    xj, yj = x, y
    while rec.N < max_steps:
        dj = rec.d_E[-1]
        step = eps0 * dj
        try:
            s = leaf_step(X, xj, step, direction)
            t = direction * s
            probe = project_time(X, xj, yj, t, time_bound=time_bound)
        except (FlowError, ProjectionError) as exc:
            rec.break_index, rec.break_reason = rec.N, str(exc)
            break
        xn, yn = probe.x_t, probe.y_u
        xi += t
        d_next = distance_to_E(xn, E)
        eta_next = eta(xn)
        length = rec.poincare_length[-1] + step * (1.0 / eta_prev + 1.0 / eta_next)
        rec.times.append(xi)
        rec.x.append(xn)
        rec.y.append(yn)
        rec.d_E.append(d_next)
        dxy = float(np.linalg.norm(xn - yn))
        rec.d_xy.append(dxy)
        rec.step_ratios.append(dxy / d_next)
        rec.step_lengths.append(step)
        rec.poincare_length.append(length)
        xj, yj, eta_prev = xn, yn, eta_next
        if dxy > eps1 * d_next:
            rec.break_index, rec.break_reason = rec.N, "closeness precondition failed"
            break
        if length > R:
            break
    return rec


def arc_length(X: PolyVectorField, x, t_end: complex, steps: int = 2000) -> float:
    """Arc length of s -> phi_x(s t_end), s in [0, 1], by Simpson's rule on a fixed-step flow."""
    x = as_point(x)
    f = _field_fn(X)
    t_end = complex(t_end)
    rhs = lambda v: t_end * f(v)
    h = 1.0 / steps
    y = x.copy()
    k1 = rhs(y)
    speeds = [np.linalg.norm(k1)]
    for _ in range(steps):
        y, _, k1 = _dp_step(rhs, y, h, k1)
        speeds.append(np.linalg.norm(k1))
    return float(simpson(np.array(speeds), dx=h))
