"""Truncated multivariate Taylor-series ("jet") arithmetic.

A jet is the array of Taylor coefficients of a smooth function about a
point, truncated at a fixed total degree.  Sums, products and matrix
inverses of jets propagate derivative information through arbitrary
algebraic formulas without finite-difference truncation error, which is
how the geometry layer obtains exact coordinate derivatives of
Christoffel symbols and curvature tensors from exact derivatives of the
metric entries.

Representation: a jet in ``n`` variables truncated at degree ``d`` is a
float array whose last axis enumerates the monomials of total degree
<= ``d`` (graded-lexicographic order, constant term first).  Tensors of
jets are plain ndarrays with the jet axis last, so whole tensor
contractions broadcast through :func:`jmul`.

Accuracy bookkeeping: if two jets carry exact coefficients through
degree ``k``, their sum/product does too, while :func:`jderiv` lowers
the guarantee by one degree.  Callers choose the truncation degree so
the final extracted values are exact.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent multi-indices with total degree <= degree, graded order."""
    out: list[tuple[int, ...]] = []
    for total in range(degree + 1):
        # lexicographic within a fixed total degree
        for combo in itertools.product(range(total + 1), repeat=nvars):
            if sum(combo) == total:
                out.append(combo)
    return out


class JetSpace:
    """Precomputed index tables for jets in ``nvars`` variables at ``degree``."""

    def __init__(self, nvars: int, degree: int):
        self.nvars = nvars
        self.degree = degree
        self.monomials = _monomials(nvars, degree)
        self.size = len(self.monomials)
        self.index = {m: i for i, m in enumerate(self.monomials)}

        # Multiplication table: coefficient pairs (ia, ib) accumulate into ic.
        ia, ib, ic = [], [], []
        for i, ma in enumerate(self.monomials):
            for j, mb in enumerate(self.monomials):
                tot = tuple(a + b for a, b in zip(ma, mb))
                if sum(tot) <= degree:
                    ia.append(i)
                    ib.append(j)
                    ic.append(self.index[tot])
        self._mul_a = np.asarray(ia, dtype=np.intp)
        self._mul_b = np.asarray(ib, dtype=np.intp)
        self._mul_c = np.asarray(ic, dtype=np.intp)

        # Derivative tables, one per variable: dst <- src * fac.
        self._dsrc, self._ddst, self._dfac = [], [], []
        for v in range(nvars):
            src, dst, fac = [], [], []
            for i, m in enumerate(self.monomials):
                if m[v] > 0:
                    lower = tuple(e - (1 if k == v else 0) for k, e in enumerate(m))
                    src.append(i)
                    dst.append(self.index[lower])
                    fac.append(float(m[v]))
            self._dsrc.append(np.asarray(src, dtype=np.intp))
            self._ddst.append(np.asarray(dst, dtype=np.intp))
            self._dfac.append(np.asarray(fac))

        # factorial(alpha) per monomial, for converting partials <-> coefficients
        fact = []
        for m in self.monomials:
            f = 1.0
            for e in m:
                for k in range(2, e + 1):
                    f *= k
            fact.append(f)
        self.factorials = np.asarray(fact)

    @staticmethod
    @lru_cache(maxsize=None)
    def get(nvars: int, degree: int) -> "JetSpace":
        return JetSpace(nvars, degree)


def jconst(space: JetSpace, value: float, shape: tuple[int, ...] = ()) -> np.ndarray:
    """Constant jet (optionally an array of them)."""
    out = np.zeros(shape + (space.size,))
    out[..., 0] = value
    return out


def jvar(space: JetSpace, v: int) -> np.ndarray:
    """Jet of the coordinate offset in variable ``v``."""
    out = np.zeros(space.size)
    out[space.index[tuple(1 if k == v else 0 for k in range(space.nvars))]] = 1.0
    return out


def jvalue(a: np.ndarray) -> np.ndarray:
    """Degree-zero (point value) part of a jet array."""
    return a[..., 0]


def jmul(space: JetSpace, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of jet arrays with leading-axes broadcasting."""
    pa = a[..., space._mul_a]
    pb = b[..., space._mul_b]
    prod = pa * pb
    lead = prod.shape[:-1]
    out = np.zeros(lead + (space.size,))
    flat_out = out.reshape(-1, space.size)
    flat_prod = prod.reshape(-1, prod.shape[-1])
    rows = np.arange(flat_out.shape[0])[:, None]
    np.add.at(flat_out, (rows, space._mul_c[None, :]), flat_prod)
    return flat_out.reshape(lead + (space.size,))


def jderiv(space: JetSpace, a: np.ndarray, v: int) -> np.ndarray:
    """Coordinate derivative of a jet array (loses one degree of accuracy)."""
    out = np.zeros_like(a)
    out[..., space._ddst[v]] = a[..., space._dsrc[v]] * space._dfac[v]
    return out


def jmatmul(space: JetSpace, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Matrix product of two (n, n, size) jet matrices."""
    # C[i, j] = sum_k A[i, k] * B[k, j]
    prod = jmul(space, A[:, :, None, :], B[None, :, :, :])
    return prod.sum(axis=1)


def jmatinv(space: JetSpace, G: np.ndarray) -> np.ndarray:
    """Inverse of an (n, n, size) jet matrix with invertible value part.

    Newton iteration X <- X(2I - GX) doubles the correct degree each
    step, so ceil(log2(degree + 1)) steps reach the truncation order.
    """
    n = G.shape[0]
    g0 = jvalue(G)
    x0 = np.linalg.inv(g0)
    X = np.zeros_like(G)
    X[..., 0] = x0
    two_i = jconst(space, 0.0, (n, n))
    two_i[np.arange(n), np.arange(n), 0] = 2.0
    steps = max(1, int(np.ceil(np.log2(space.degree + 1))))
    for _ in range(steps):
        X = jmatmul(space, X, two_i - jmatmul(space, G, X))
    return X


def jet_coeff_linear(space: JetSpace, a: np.ndarray, v: int) -> np.ndarray:
    """First-derivative value d/dx_v extracted from a jet array."""
    idx = space.index[tuple(1 if k == v else 0 for k in range(space.nvars))]
    return a[..., idx]
