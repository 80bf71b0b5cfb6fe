"""Lazily evaluated function trees.

Interpolants are kept as trees of small factors and evaluated pointwise
(Horner inside Newton forms, log-space products inside Lagrange forms).
Nothing is ever expanded into monomial coefficients: the expanded degree
of an assembled interpolant grows like ``n * |Lambda|`` and its
coefficients are useless in double precision.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np


def _z(z):
    return np.asarray(z, dtype=complex)


def _out(v, z):
    return complex(v) if np.ndim(z) == 0 else v


class FunctionExpr:
    """Base class. Subclasses implement ``_eval`` on complex arrays."""

    def __call__(self, z):
        zz = _z(z)
        return _out(self._eval(zz), z)

    def _eval(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def poles(self) -> np.ndarray:
        """Finite poles of the expression (empty for entire functions)."""
        return np.empty(0, dtype=complex)

    def describe(self) -> dict:
        return {"type": type(self).__name__}

    def __add__(self, other):
        other = as_expr(other)
        return Sum([self, other])

    __radd__ = __add__

    def __mul__(self, other):
        if np.isscalar(other):
            return Scaled(complex(other), self)
        return Product([self, as_expr(other)])

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return Scaled(-1.0, self)

    def __sub__(self, other):
        return Sum([self, -as_expr(other)])

    def __rsub__(self, other):
        return Sum([as_expr(other), -self])


def as_expr(x) -> FunctionExpr:
    if isinstance(x, FunctionExpr):
        return x
    return Const(complex(x))


class Const(FunctionExpr):
    def __init__(self, value: complex):
        self.value = complex(value)

    def _eval(self, z):
        return np.full(z.shape, self.value, dtype=complex)

    def describe(self):
        return {"type": "const", "value": [self.value.real, self.value.imag]}


class Factor(FunctionExpr):
    """The linear factor ``z - beta``."""

    def __init__(self, beta: complex):
        self.beta = complex(beta)

    def _eval(self, z):
        return z - self.beta

    def describe(self):
        return {"type": "factor", "beta": [self.beta.real, self.beta.imag]}


class BlaschkeFactor(FunctionExpr):
    """The disk factor ``(z - beta) / (1 - conj(beta) z)``."""

    def __init__(self, beta: complex):
        self.beta = complex(beta)
        if abs(self.beta) >= 1:
            raise ValueError("Blaschke factor needs |beta| < 1")

    def _eval(self, z):
        return (z - self.beta) / (1.0 - self.beta.conjugate() * z)

    def poles(self):
        if self.beta == 0:
            return np.empty(0, dtype=complex)
        return np.array([1.0 / self.beta.conjugate()])

    def describe(self):
        return {"type": "blaschke", "beta": [self.beta.real, self.beta.imag]}


def basis_factor(beta: complex, blaschke: bool) -> FunctionExpr:
    return BlaschkeFactor(beta) if blaschke else Factor(beta)


class Sum(FunctionExpr):
    def __init__(self, terms: Sequence[FunctionExpr]):
        self.terms = list(terms)

    def _eval(self, z):
        out = np.zeros(z.shape, dtype=complex)
        for t in self.terms:
            out = out + t._eval(z)
        return out

    def poles(self):
        ps = [t.poles() for t in self.terms]
        return np.concatenate(ps) if ps else np.empty(0, dtype=complex)

    def describe(self):
        return {"type": "sum", "terms": len(self.terms)}


class Product(FunctionExpr):
    def __init__(self, factors: Sequence[FunctionExpr]):
        self.factors = list(factors)

    def _eval(self, z):
        out = np.ones(z.shape, dtype=complex)
        for f in self.factors:
            out = out * f._eval(z)
        return out

    def poles(self):
        ps = [f.poles() for f in self.factors]
        return np.concatenate(ps) if ps else np.empty(0, dtype=complex)

    def describe(self):
        return {"type": "product", "factors": len(self.factors)}


class Scaled(FunctionExpr):
    def __init__(self, scale: complex, expr: FunctionExpr):
        self.scale = complex(scale)
        self.expr = expr

    def _eval(self, z):
        return self.scale * self.expr._eval(z)

    def poles(self):
        return self.expr.poles()

    def describe(self):
        return {"type": "scaled", "scale": [self.scale.real, self.scale.imag],
                "expr": self.expr.describe()}


class Poly(FunctionExpr):
    """Polynomial from monomial coefficients, lowest degree first."""

    def __init__(self, coeffs: Sequence[complex]):
        self.coeffs = np.asarray(coeffs, dtype=complex)

    def _eval(self, z):
        out = np.zeros(z.shape, dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def describe(self):
        return {"type": "poly", "degree": self.degree}


class Analytic(FunctionExpr):
    """Wrap a vectorised callable, e.g. ``np.exp``."""

    def __init__(self, func: Callable, name: str = "analytic", poles=()):
        self.func = func
        self.name = name
        self._poles = np.asarray(poles, dtype=complex)

    def _eval(self, z):
        return np.asarray(self.func(z), dtype=complex)

    def poles(self):
        return self._poles

    def describe(self):
        return {"type": "analytic", "name": self.name}


class Newton(FunctionExpr):
    """Newton form ``c0 + c1 b1(z) + c2 b1(z) b2(z) + ...`` evaluated by Horner.

    ``b_i(z)`` is ``z - nodes[i-1]`` or, with ``blaschke=True``, the
    Blaschke factor at ``nodes[i-1]``.
    """

    def __init__(self, coeffs: Sequence[complex], nodes: Sequence[complex], blaschke: bool = False):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.nodes = np.asarray(nodes, dtype=complex)
        self.blaschke = bool(blaschke)
        if len(self.nodes) < len(self.coeffs) - 1:
            raise ValueError("Newton form needs at least len(coeffs)-1 nodes")

    def _eval(self, z):
        k = len(self.coeffs)
        if k == 0:
            return np.zeros(z.shape, dtype=complex)
        out = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for i in range(k - 2, -1, -1):
            beta = self.nodes[i]
            if self.blaschke:
                b = (z - beta) / (1.0 - np.conj(beta) * z)
            else:
                b = z - beta
            out = self.coeffs[i] + b * out
        return out

    def poles(self):
        if not self.blaschke:
            return np.empty(0, dtype=complex)
        used = self.nodes[: max(len(self.coeffs) - 1, 0)]
        used = used[used != 0]
        return 1.0 / np.conj(used)

    def describe(self):
        return {"type": "newton", "order": len(self.coeffs), "blaschke": self.blaschke}


class Barycentric(FunctionExpr):
    """Polynomial interpolant in the first barycentric form.

    ``p(z) = l(u) * sum_i w_i f_i / (u - u_i)`` with ``u = (z - c)/h``.
    Products are taken directly, which is safe in the scaled variable for
    the node counts used here; if they over- or underflow the evaluation
    falls back to sums of complex logarithms. At a node the stored value
    is returned exactly.
    """

    def __init__(self, nodes: Sequence[complex], values: Sequence[complex]):
        self.nodes = np.asarray(nodes, dtype=complex).reshape(-1)
        self.values = np.asarray(values, dtype=complex).reshape(-1)
        if len(self.nodes) != len(self.values) or len(self.nodes) == 0:
            raise ValueError("need matching, nonempty nodes and values")
        self.center = self.nodes.mean()
        h = np.max(np.abs(self.nodes - self.center)) if len(self.nodes) > 1 else 1.0
        self.h = float(h) if h > 0 else 1.0
        u = (self.nodes - self.center) / self.h
        self.u = u
        diff = u[:, None] - u[None, :]
        np.fill_diagonal(diff, 1.0)
        self.logw = -np.sum(np.log(diff), axis=1)
        self.w = np.exp(self.logw)

    def _basis(self, z):
        """Lagrange basis matrix L[k, i] = L_i(z_k)."""
        zz = z.reshape(-1)
        u = (zz - self.center) / self.h
        diff = u[:, None] - self.u[None, :]
        hit = diff == 0
        safe = np.where(hit, 1.0, diff)
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            L = (np.prod(safe, axis=1)[:, None] * self.w[None, :]) / safe
        bad = ~np.all(np.isfinite(L), axis=1)
        if bad.any():
            logd = np.log(safe[bad])
            L[bad] = np.exp(np.sum(logd, axis=1)[:, None] + self.logw[None, :] - logd)
        rows = hit.any(axis=1)
        if rows.any():
            L[rows] = hit[rows].astype(complex)
        return L

    def _eval(self, z):
        if len(self.nodes) == 1:
            return np.full(z.shape, self.values[0], dtype=complex)
        L = self._basis(z)
        return (L @ self.values).reshape(z.shape)

    def lebesgue(self, z) -> float:
        """max over the points ``z`` of ``sum_i |L_i(z)|``."""
        if len(self.nodes) == 1:
            return 1.0
        L = self._basis(_z(z))
        return float(np.max(np.sum(np.abs(L), axis=1)))

    def describe(self):
        return {"type": "barycentric", "nodes": len(self.nodes)}
