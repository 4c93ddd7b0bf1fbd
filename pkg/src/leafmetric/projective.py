"""The two affine charts of P^2 covering the line at infinity.

Chart "affine1" uses (z, w) = (1/u, v/u), chart "affine2" uses
(z, w) = (u/v, 1/v). The transported fields are multiplied by a power of
the chart's denominator variable and then divided by the largest power of
it common to both components, which changes time but not the foliation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomial import CPoint, MPoly, PolyVectorField


def _homogenize(F: MPoly, d: int, where: int) -> MPoly:
    """s^d F evaluated on the chart substitution, as a polynomial in (u, v).

    ``where`` = 0: z = 1/u, w = v/u, s = u.  ``where`` = 1: z = u/v, w = 1/v, s = v.
    """
    terms = {}
    for (a, b), c in F.items():
        if where == 0:
            e = (d - a - b, b)
        else:
            e = (a, d - a - b)
        terms[e] = terms.get(e, 0j) + c
    return MPoly(2, terms)


def _saturate(P: MPoly, Q: MPoly, var: int):
    k = min(P.min_exponent(var) if P else 10**9, Q.min_exponent(var) if Q else 10**9)
    if k == 10**9 or k == 0:
        return P, Q
    return P.shift_exponent(var, -k), Q.shift_exponent(var, -k)


def chart_field(X: PolyVectorField, chart: str) -> PolyVectorField:
    if X.num_vars != 2:
        raise ValueError("projective charts need a field on C^2")
    d = max(1, max(X.degrees()))
    F1, F2 = X.components
    u = MPoly.variable(2, 0)
    v = MPoly.variable(2, 1)
    if chart == "affine1":
        P1, P2 = _homogenize(F1, d, 0), _homogenize(F2, d, 0)
        U, V = _saturate(-u * P1, P2 - v * P1, 0)
    elif chart == "affine2":
        Q1, Q2 = _homogenize(F1, d, 1), _homogenize(F2, d, 1)
        U, V = _saturate(Q1 - u * Q2, -v * Q2, 1)
    else:
        raise ValueError(f"unknown chart {chart!r}")
    return PolyVectorField([U, V], ("u", "v"))


@dataclass(frozen=True)
class InfinityReport:
    chart_fields: dict
    points: tuple          # CPoints (with chart ids) of singularities on the line at infinity
    line_singular: bool    # whole line at infinity consists of singular points
    top_part_radial: bool  # top-degree homogeneous part is a multiple of z d/dz + w d/dw

    def to_json(self):
        return {
            "charts": {k: str(v) for k, v in self.chart_fields.items()},
            "singularities_at_infinity": [p.to_json() for p in self.points],
            "line_singular": self.line_singular,
            "top_part_radial": self.top_part_radial,
        }


def _univariate(P: MPoly, var: int):
    """Coefficients (highest first) of P restricted to the other variable being 0."""
    other = 1 - var
    coeffs = {}
    for e, c in P.items():
        if e[var] == 0:
            coeffs[e[other]] = coeffs.get(e[other], 0j) + c
    if not coeffs:
        return np.zeros(1, complex)
    deg = max(coeffs)
    return np.array([coeffs.get(k, 0j) for k in range(deg, -1, -1)])


def infinity_singularities(X: PolyVectorField, tol: float = 1e-9) -> InfinityReport:
    f1 = chart_field(X, "affine1")
    f2 = chart_field(X, "affine2")
    U, V = f1.components
    # on u = 0 the zeros are common roots in v of U(0, v) and V(0, v)
    pu, pv = np.trim_zeros(_univariate(U, 0), "f"), np.trim_zeros(_univariate(V, 0), "f")
    points = []
    line_singular = pu.size == 0 and pv.size == 0
    if not line_singular:
        if pu.size == 0:
            roots = np.roots(pv) if pv.size > 1 else []
        elif pv.size == 0:
            roots = np.roots(pu) if pu.size > 1 else []
        else:
            roots = [r for r in (np.roots(pu) if pu.size > 1 else [])
                     if abs(np.polyval(pv, r)) <= tol * max(1.0, abs(r)) ** (pv.size - 1)]
        points = [CPoint((0j, complex(r)), "affine1") for r in roots]
        # the single point of the line missed by the first chart
        a, b = f2.components
        if abs(a(0j, 0j)) <= tol and abs(b(0j, 0j)) <= tol:
            points.append(CPoint((0j, 0j), "affine2"))
    d = max(X.degrees())
    z, w = MPoly.variable(2, 0), MPoly.variable(2, 1)
    F1d, F2d = (c.homogeneous_part(d) for c in X.components)
    radial = bool(d >= 1 and not (F1d * w - F2d * z))
    return InfinityReport({"affine1": f1, "affine2": f2}, tuple(points), line_singular, radial)
