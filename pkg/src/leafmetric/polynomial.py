"""Sparse multivariate complex polynomials and polynomial vector fields."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np


def _term_key(exps):
    # graded lexicographic: total degree first, then earlier variables first
    return (sum(exps), tuple(-e for e in exps))


class MPoly:
    """Polynomial in ``num_vars`` complex variables.

    Terms are kept in a canonical graded-lexicographic order and zero
    coefficients are never stored. Instances are treated as immutable.
    """

    __slots__ = ("num_vars", "_terms", "_horner")

    def __init__(self, num_vars: int, terms: Mapping[tuple, complex] | None = None):
        if num_vars < 1:
            raise ValueError("num_vars must be positive")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise ValueError(f"exponent {exps} has wrong length for {num_vars} variables")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = complex(c)
            if c != 0:
                clean[exps] = clean.get(exps, 0j) + c
                if clean[exps] == 0:
                    del clean[exps]
        self.num_vars = num_vars
        self._terms = dict(sorted(clean.items(), key=lambda kv: _term_key(kv[0])))
        self._horner = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, num_vars):
        return cls(num_vars)

    @classmethod
    def constant(cls, num_vars, c):
        return cls(num_vars, {(0,) * num_vars: c})

    @classmethod
    def variable(cls, num_vars, index):
        exps = [0] * num_vars
        exps[index] = 1
        return cls(num_vars, {tuple(exps): 1.0})

    # -- basic protocol ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = MPoly.constant(self.num_vars, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.num_vars == other.num_vars and self._terms == other._terms

    def __hash__(self):
        return hash((self.num_vars, tuple(self._terms.items())))

    def __repr__(self):
        return f"MPoly({self.num_vars}, {self._terms!r})"

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def coefficient(self, exps) -> complex:
        return self._terms.get(tuple(exps), 0j)

    def homogeneous_part(self, deg) -> "MPoly":
        return MPoly(self.num_vars, {e: c for e, c in self._terms.items() if sum(e) == deg})

    def truncate(self, max_deg) -> "MPoly":
        return MPoly(self.num_vars, {e: c for e, c in self._terms.items() if sum(e) <= max_deg})

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.num_vars != self.num_vars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return MPoly.constant(self.num_vars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0j) + c
        return MPoly(self.num_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.num_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0j) + c1 * c2
        return MPoly(self.num_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = MPoly.constant(self.num_vars, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def diff(self, var: int) -> "MPoly":
        terms = {}
        for e, c in self._terms.items():
            if e[var]:
                d = list(e)
                d[var] -= 1
                terms[tuple(d)] = c * e[var]
        return MPoly(self.num_vars, terms)

    def compose(self, subs: Sequence["MPoly"]) -> "MPoly":
        """Substitute polynomial ``subs[j]`` for variable ``j``."""
        if len(subs) != self.num_vars:
            raise ValueError("need one substitution per variable")
        m = subs[0].num_vars
        cache = [{0: MPoly.constant(m, 1.0)} for _ in subs]

        def power(j, k):
            if k not in cache[j]:
                cache[j][k] = power(j, k - 1) * subs[j]
            return cache[j][k]

        out = MPoly.zero(m)
        for e, c in self._terms.items():
            mono = MPoly.constant(m, c)
            for j, k in enumerate(e):
                if k:
                    mono = mono * power(j, k)
            out = out + mono
        return out

    def shift_exponent(self, var: int, k: int) -> "MPoly":
        """Multiply by ``z_var**k``; negative ``k`` is exact monomial division."""
        terms = {}
        for e, c in self._terms.items():
            d = list(e)
            d[var] += k
            if d[var] < 0:
                raise ValueError("monomial division is not exact")
            terms[tuple(d)] = c
        return MPoly(self.num_vars, terms)

    def min_exponent(self, var: int) -> int:
        return min((e[var] for e in self._terms), default=0)

    # -- evaluation -------------------------------------------------------
    def _build_horner(self):
        # nested lists: level j holds dense coefficients in variable j
        def build(terms, j):
            if j == self.num_vars:
                return sum(terms.values(), 0j)
            groups: dict = {}
            for e, c in terms.items():
                groups.setdefault(e[j], {})[e] = c
            deg = max(groups)
            return [build(groups[k], j + 1) if k in groups else None for k in range(deg + 1)]

        self._horner = build(self._terms, 0) if self._terms else None
        return self._horner

    def __call__(self, *args):
        """Evaluate at a point; arguments may be scalars or broadcastable arrays."""
        if len(args) != self.num_vars:
            raise ValueError(f"expected {self.num_vars} coordinates, got {len(args)}")
        h = self._horner if self._horner is not None else self._build_horner()
        if h is None:
            return 0j * sum(args)
        return _horner_eval(h, args, 0)

    def source(self, names: Sequence[str]) -> str:
        """Python expression for the Horner scheme, in the given variable names."""
        h = self._horner if self._horner is not None else self._build_horner()
        if h is None:
            return "0j"
        return _horner_source(h, names, 0)

    def eval_monomials(self, point) -> complex:
        """Term-by-term summation; slow reference path used by tests."""
        total = 0j
        for e, c in self._terms.items():
            m = c
            for z, k in zip(point, e):
                m *= complex(z) ** k
            total += m
        return total


def _horner_eval(node, args, j):
    if not isinstance(node, list):
        return node
    x = args[j]
    acc = None
    for sub in reversed(node):
        if acc is not None:
            acc = acc * x
        if sub is not None:
            v = _horner_eval(sub, args, j + 1)
            acc = v if acc is None else acc + v
    return 0j if acc is None else acc


def _horner_source(node, names, j):
    if not isinstance(node, list):
        return repr(complex(node))
    x = names[j]
    acc = None
    for sub in reversed(node):
        if acc is not None:
            acc = f"({acc})*{x}"
        if sub is not None:
            v = _horner_source(sub, names, j + 1)
            acc = v if acc is None else f"{acc} + {v}"
    return "0j" if acc is None else acc


def hdot(a, b):
    """Hermitian product sum(a_i * conj(b_i)); linear in the first slot."""
    return np.sum(np.asarray(a) * np.conj(np.asarray(b)), axis=0)


@dataclass(frozen=True)
class CPoint:
    coords: tuple
    chart_id: str = "affine0"

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(complex(c) for c in self.coords))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coords, dtype=dtype or complex)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def to_json(self):
        return {"coords": [[c.real, c.imag] for c in self.coords], "chart_id": self.chart_id}

    @classmethod
    def from_json(cls, d):
        return cls(tuple(complex(re, im) for re, im in d["coords"]), d.get("chart_id", "affine0"))


def as_point(p) -> np.ndarray:
    return np.asarray(p, dtype=complex).reshape(-1)


class PolyVectorField:
    """X = sum_j F_j d/dz_j with polynomial components."""

    def __init__(self, components: Sequence[MPoly], variable_names: Sequence[str] | None = None):
        components = tuple(components)
        n = len(components)
        if n == 0:
            raise ValueError("a vector field needs at least one component")
        for c in components:
            if c.num_vars != n:
                raise ValueError("every component must have num_vars == number of components")
        if variable_names is None:
            variable_names = ("z", "w") if n == 2 else tuple(f"z{j}" for j in range(n))
        variable_names = tuple(variable_names)
        if len(variable_names) != n or len(set(variable_names)) != n:
            raise ValueError("variable_names must be n distinct identifiers")
        self.num_vars = n
        self.components = components
        self.variable_names = variable_names
        self._jac = None
        self._hess = None
        self._kernels = None

    def __eq__(self, other):
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        return f"PolyVectorField({format_field(self)!r})"

    def __str__(self):
        return format_field(self)

    def degrees(self):
        return tuple(c.degree() for c in self.components)

    @property
    def jacobian_polys(self):
        if self._jac is None:
            self._jac = [[c.diff(j) for j in range(self.num_vars)] for c in self.components]
        return self._jac

    @property
    def hessian_polys(self):
        if self._hess is None:
            n = self.num_vars
            self._hess = [[[self.jacobian_polys[i][j].diff(k) for k in range(n)] for j in range(n)]
                          for i in range(n)]
        return self._hess

    @property
    def kernels(self):
        """Generated functions ``(f, jac, stack)`` taking coordinates as arguments.

        ``f`` returns the component tuple, ``jac`` the nested Jacobian tuple and
        ``stack`` the triple (X, DX X, D2X(X,X) + DX DX X). All accept scalars or
        broadcastable numpy arrays.
        """
        if self._kernels is None:
            self._kernels = _compile_kernels(self)
        return self._kernels

    def __call__(self, p):
        return evaluate(self, p)


def _compile_kernels(X):
    n = X.num_vars
    args = [f"a{j}" for j in range(n)]
    sig = ", ".join(args)
    f_src = ", ".join(c.source(args) for c in X.components)
    jac_rows = ["(" + ", ".join(d.source(args) for d in row) + ",)" for row in X.jacobian_polys]
    lines = [f"def f({sig}):", f"    return ({f_src},)", "",
             f"def jac({sig}):", f"    return ({', '.join(jac_rows)},)", "",
             f"def stack({sig}):"]
    lines += [f"    v{i} = {c.source(args)}" for i, c in enumerate(X.components)]
    for i in range(n):
        for j in range(n):
            lines.append(f"    J{i}_{j} = {X.jacobian_polys[i][j].source(args)}")
    for i in range(n):
        lines.append(f"    d{i} = " + " + ".join(f"J{i}_{j}*v{j}" for j in range(n)))
    for i in range(n):
        hterms = []
        for j in range(n):
            for k in range(n):
                h = X.hessian_polys[i][j][k]
                if h:
                    hterms.append(f"({h.source(args)})*v{j}*v{k}")
        lin = " + ".join(f"J{i}_{j}*d{j}" for j in range(n))
        lines.append(f"    e{i} = " + " + ".join(hterms + [lin]))
    tup = lambda p: "(" + ", ".join(f"{p}{i}" for i in range(n)) + ",)"
    lines.append(f"    return {tup('v')}, {tup('d')}, {tup('e')}")
    ns: dict = {}
    exec(compile("\n".join(lines), "<poly-kernels>", "exec"), ns)
    return ns["f"], ns["jac"], ns["stack"]


def _check_dim(X: PolyVectorField, p):
    p = as_point(p)
    if p.shape[0] != X.num_vars:
        raise ValueError(f"dimension mismatch: field has {X.num_vars} variables, point has {p.shape[0]}")
    return p


def evaluate(X: PolyVectorField, p) -> np.ndarray:
    p = _check_dim(X, p)
    return np.array(X.kernels[0](*p), dtype=complex)


def jacobian(X: PolyVectorField, p) -> np.ndarray:
    p = _check_dim(X, p)
    return np.array(X.kernels[1](*p), dtype=complex)


def hessian(X: PolyVectorField, p) -> np.ndarray:
    """Array H[i, j, k] = d^2 F_i / dz_j dz_k at p."""
    p = _check_dim(X, p)
    return np.array([[[d(*p) for d in row] for row in mat] for mat in X.hessian_polys], dtype=complex)


def one_jet(X: PolyVectorField, p=None) -> PolyVectorField:
    """Affine field X(p) + DX(p)(z - p), written in the original coordinates."""
    n = X.num_vars
    p = np.zeros(n, complex) if p is None else _check_dim(X, p)
    value = evaluate(X, p)
    J = jacobian(X, p)
    comps = []
    for i in range(n):
        poly = MPoly.constant(n, value[i] - J[i] @ p)
        for j in range(n):
            poly = poly + J[i, j] * MPoly.variable(n, j)
        comps.append(poly)
    return PolyVectorField(comps, X.variable_names)


def blow_up_pullback(X: PolyVectorField, new_name: str = "t") -> PolyVectorField:
    """Lift X through the blow-up chart pi(t, w) = (t*w, w)."""
    if X.num_vars != 2:
        raise ValueError("blow-up pullback is defined for planar fields only")
    F1, F2 = X.components
    if F1.coefficient((0, 0)) != 0 or F2.coefficient((0, 0)) != 0:
        raise ValueError("origin is not a zero of the field; the pullback is not polynomial")
    t = MPoly.variable(2, 0)
    w = MPoly.variable(2, 1)
    F1p = F1.compose([t * w, w])
    F2p = F2.compose([t * w, w])
    num = F1p - t * F2p
    try:
        tcomp = num.shift_exponent(1, -1)
    except ValueError:
        raise ValueError("origin is not a zero of the field; the pullback is not polynomial") from None
    names = (new_name if new_name != X.variable_names[1] else new_name + "_", X.variable_names[1])
    return PolyVectorField([tcomp, F2p], names)


# -- formatting -------------------------------------------------------------
def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_monomial(exps, names):
    parts = []
    for e, name in zip(exps, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p: MPoly, names: Sequence[str]) -> str:
    if not p:
        return "0"
    out = []
    for exps, c in p.items():
        mono = _fmt_monomial(exps, names)
        if c.imag == 0:
            sign = "-" if c.real < 0 else "+"
            mag = abs(c.real)
            body = _fmt_real(mag) if (mag != 1 or not mono) else ""
        elif c.real == 0:
            sign = "-" if c.imag < 0 else "+"
            body = _fmt_real(abs(c.imag)) + "i"
        else:
            sign = "+"
            im = c.imag
            body = f"({_fmt_real(c.real)} {'-' if im < 0 else '+'} {_fmt_real(abs(im))}i)"
        if body and mono:
            text = f"{body}*{mono}"
        else:
            text = body or mono
        if not out:
            out.append(("-" if sign == "-" else "") + text)
        else:
            out.append(f" {sign} {text}")
    return "".join(out)


def format_field(X: PolyVectorField) -> str:
    names = X.variable_names
    return " + ".join(f"({format_poly(c, names)}) d/d{name}" for c, name in zip(X.components, names))


def random_field(rng: np.random.Generator, num_vars=2, max_terms=5, max_degree=3, integer=False):
    """Sparse random field used by property tests and demos."""
    comps = []
    exps_pool = [e for e in product(range(max_degree + 1), repeat=num_vars) if sum(e) <= max_degree]
    for _ in range(num_vars):
        k = rng.integers(1, max_terms + 1)
        idx = rng.choice(len(exps_pool), size=k, replace=False)
        terms = {}
        for i in idx:
            if integer:
                c = complex(rng.integers(-5, 6), rng.integers(-5, 6))
            else:
                c = complex(*np.round(rng.normal(size=2), 6))
            terms[exps_pool[i]] = c
        comps.append(MPoly(num_vars, terms))
    return PolyVectorField(comps)


def linear_field(A, names=None) -> PolyVectorField:
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    comps = []
    for i in range(n):
        p = MPoly.zero(n)
        for j in range(n):
            p = p + A[i, j] * MPoly.variable(n, j)
        comps.append(p)
    return PolyVectorField(comps, names)
