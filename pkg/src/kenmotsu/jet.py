"""Truncated multivariate Taylor jets with tensor-valued coefficients.

A jet of order ``K`` in ``dim`` variables stores the Taylor coefficients
``c[alpha]`` for every multi-index ``|alpha| <= K`` so that
``f(p + h) = sum_alpha c[alpha] h**alpha + O(|h|**(K+1))``. Coefficients are
kept in an array of shape ``(n_monomials, *shape)``; the trailing axes carry
tensor indices, so one ``Jet`` can hold a whole metric, connection or
curvature field around a point. Monomials are graded by degree, which makes
truncation to a lower order a prefix slice.
"""

from __future__ import annotations

import functools
import itertools
import math
import string
from typing import Sequence

import numpy as np

from kenmotsu import _kernels


class DomainError(ArithmeticError):
    """A function was evaluated outside its real domain at the base point."""


class JetAlgebra:
    """Index tables for jets of a fixed ``(dim, order)``."""

    def __init__(self, dim: int, order: int):
        if dim < 1 or order < 0:
            raise ValueError(f"invalid jet algebra dim={dim} order={order}")
        self.dim = dim
        self.order = order
        monos = []
        for deg in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(dim), deg):
                e = [0] * dim
                for i in combo:
                    e[i] += 1
                monos.append(tuple(e))
        self.monomials = tuple(monos)
        self.index = {m: k for k, m in enumerate(monos)}
        self.size = len(monos)
        self.degree = np.array([sum(m) for m in monos], dtype=np.intp)
        self.factorial = np.array(
            [math.prod(math.factorial(k) for k in m) for m in monos], dtype=float
        )

        ia, ib, ic = [], [], []
        for kc, gamma in enumerate(monos):
            for ka, alpha in enumerate(monos):
                if all(x <= y for x, y in zip(alpha, gamma)):
                    beta = tuple(y - x for x, y in zip(alpha, gamma))
                    ia.append(ka)
                    ib.append(self.index[beta])
                    ic.append(kc)
        self.ia = np.array(ia, dtype=np.intp)
        self.ib = np.array(ib, dtype=np.intp)
        self.ic = np.array(ic, dtype=np.intp)
        self._starts = np.flatnonzero(np.r_[True, self.ic[1:] != self.ic[:-1]])

        # d/dx_i maps order K to order K-1: out[alpha] = (alpha_i + 1) c[alpha + e_i]
        self.diff_src = []
        self.diff_fac = []
        n_low = sizeof(dim, order - 1) if order > 0 else 0
        for i in range(dim):
            src = np.empty(n_low, dtype=np.intp)
            fac = np.empty(n_low)
            for k in range(n_low):
                alpha = list(monos[k])
                fac[k] = alpha[i] + 1
                alpha[i] += 1
                src[k] = self.index[tuple(alpha)]
            self.diff_src.append(src)
            self.diff_fac.append(fac)

    def fold(self, terms: np.ndarray) -> np.ndarray:
        """Sum pair products ``terms`` (leading axis over pairs) into monomials."""
        out = np.zeros((self.size,) + terms.shape[1:])
        out[self.ic[self._starts]] = np.add.reduceat(terms, self._starts, axis=0)
        return out

    def __repr__(self):
        return f"JetAlgebra(dim={self.dim}, order={self.order})"


def sizeof(dim: int, order: int) -> int:
    """Number of monomials of degree at most ``order`` in ``dim`` variables."""
    return math.comb(dim + order, order) if order >= 0 else 0


@functools.lru_cache(maxsize=None)
def algebra(dim: int, order: int) -> JetAlgebra:
    return JetAlgebra(dim, order)


def _taylor_exp(v, order):
    e = np.exp(v)
    return np.stack([e / math.factorial(k) for k in range(order + 1)])


def _taylor_log(v, order):
    if np.any(v <= 0):
        raise DomainError("log of a non-positive value")
    t = [np.log(v)]
    for k in range(1, order + 1):
        t.append((-1.0) ** (k + 1) / (k * v**k))
    return np.stack(t)


def _taylor_cyclic(cycle, v, order):
    vals = [f(v) for f in cycle]
    return np.stack([vals[k % 4] / math.factorial(k) for k in range(order + 1)])


def _taylor_hyper(first, second, v, order):
    a, b = first(v), second(v)
    return np.stack([(a if k % 2 == 0 else b) / math.factorial(k) for k in range(order + 1)])


def _binom(p, k):
    out = 1.0
    for j in range(k):
        out *= (p - j) / (j + 1)
    return out


def _taylor_power(v, p, order):
    t = []
    for k in range(order + 1):
        coef = _binom(p, k)
        if coef == 0.0:
            t.append(np.zeros_like(v))
        else:
            t.append(coef * v ** (p - k))
    return np.stack(t)


class Jet:
    """Tensor-valued truncated Taylor expansion around a point."""

    __slots__ = ("alg", "c")
    __array_priority__ = 1000

    def __init__(self, alg: JetAlgebra, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.shape[0] != alg.size:
            raise ValueError(
                f"coefficient block has {c.shape[0]} rows, {alg!r} needs {alg.size}"
            )
        self.alg = alg
        self.c = c

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, value, dim: int, order: int) -> "Jet":
        alg = algebra(dim, order)
        value = np.asarray(value, dtype=float)
        c = np.zeros((alg.size,) + value.shape)
        c[0] = value
        return cls(alg, c)

    @classmethod
    def variable(cls, i: int, value: float, dim: int, order: int) -> "Jet":
        alg = algebra(dim, order)
        c = np.zeros(alg.size)
        c[0] = value
        if order >= 1:
            c[1 + i] = 1.0
        return cls(alg, c)

    @classmethod
    def stack(cls, jets: Sequence["Jet"], axis: int = 0) -> "Jet":
        jets = list(jets)
        order = min(j.order for j in jets)
        alg = algebra(jets[0].dim, order)
        c = np.stack([j.c[: alg.size] for j in jets], axis=axis + 1 if axis >= 0 else axis)
        return cls(alg, c)

    @classmethod
    def from_nested(cls, nested) -> "Jet":
        """Assemble a tensor jet from a nested list of scalar jets."""
        if isinstance(nested, Jet):
            return nested
        return cls.stack([cls.from_nested(x) for x in nested])

    # basic properties -------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def order(self) -> int:
        return self.alg.order

    @property
    def shape(self) -> tuple:
        return self.c.shape[1:]

    @property
    def ndim(self) -> int:
        return self.c.ndim - 1

    @property
    def value(self):
        v = self.c[0]
        return float(v) if v.ndim == 0 else v.copy()

    def derivatives(self, k: int) -> np.ndarray:
        """All k-th partial derivatives, shape ``(dim,)*k + shape``."""
        if k > self.order:
            raise ValueError(f"jet of order {self.order} has no {k}-th derivatives")
        d = self.dim
        out = np.empty((d,) * k + self.shape)
        for idx in itertools.product(range(d), repeat=k):
            e = [0] * d
            for i in idx:
                e[i] += 1
            m = self.alg.index[tuple(e)]
            out[idx] = self.alg.factorial[m] * self.c[m]
        return out

    @property
    def gradient(self) -> np.ndarray:
        return self.derivatives(1)

    @property
    def hessian(self) -> np.ndarray:
        return self.derivatives(2)

    @property
    def third(self) -> np.ndarray:
        return self.derivatives(3)

    def partial(self, *idx: int):
        e = [0] * self.dim
        for i in idx:
            e[i] += 1
        m = self.alg.index[tuple(e)]
        v = self.alg.factorial[m] * self.c[m]
        return float(v) if np.ndim(v) == 0 else v

    # structural ops ---------------------------------------------------------

    def truncate(self, order: int) -> "Jet":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        alg = algebra(self.dim, order)
        return Jet(alg, self.c[: alg.size])

    def diff(self, i: int) -> "Jet":
        """Partial derivative along coordinate ``i`` (drops one order)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        alg = algebra(self.dim, self.order - 1)
        src, fac = self.alg.diff_src[i], self.alg.diff_fac[i]
        fac = fac.reshape((-1,) + (1,) * self.ndim)
        return Jet(alg, self.c[src] * fac)

    def grad(self) -> "Jet":
        """All partials as a jet of one lower order; derivative axis first."""
        return Jet.stack([self.diff(i) for i in range(self.dim)])

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.alg, self.c[(slice(None),) + key])

    def transpose(self, *axes: int) -> "Jet":
        return Jet(self.alg, self.c.transpose((0,) + tuple(a + 1 for a in axes)))

    def reshape(self, *shape: int) -> "Jet":
        return Jet(self.alg, self.c.reshape((self.alg.size,) + tuple(shape)))

    def sum(self, axis) -> "Jet":
        axis = (axis,) if isinstance(axis, int) else tuple(axis)
        return Jet(self.alg, self.c.sum(axis=tuple(a + 1 for a in axis)))

    def _aligned(self, ndim: int) -> np.ndarray:
        pad = ndim - self.ndim
        return self.c.reshape((self.alg.size,) + (1,) * pad + self.shape)

    # arithmetic -------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.dim != self.dim:
                raise ValueError("jets over different charts")
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return self, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is None:
            other = np.asarray(other, dtype=float)
            nd = max(a.ndim, other.ndim)
            shape = np.broadcast_shapes(a.shape, other.shape)
            c = np.broadcast_to(a._aligned(nd), (a.alg.size,) + shape).copy()
            c[0] += other
            return Jet(a.alg, c)
        nd = max(a.ndim, b.ndim)
        return Jet(a.alg, a._aligned(nd) + b._aligned(nd))

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.alg, -self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is None:
            other = np.asarray(other, dtype=float)
            nd = max(a.ndim, other.ndim)
            return Jet(a.alg, a._aligned(nd) * other)
        nd = max(a.ndim, b.ndim)
        shape = np.broadcast_shapes(a.shape, b.shape)
        m = a.alg.size
        ca = np.ascontiguousarray(np.broadcast_to(a._aligned(nd), (m,) + shape)).reshape(m, -1)
        cb = np.ascontiguousarray(np.broadcast_to(b._aligned(nd), (m,) + shape)).reshape(m, -1)
        alg = a.alg
        out = _kernels.mul(ca, cb, alg.ia, alg.ib, alg.ic, m)
        return Jet(alg, out.reshape((m,) + shape))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise DomainError("division by zero")
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if isinstance(n, (int, np.integer)):
            return self.powi(int(n))
        return NotImplemented

    # elementwise functions --------------------------------------------------

    def _compose(self, taylor: np.ndarray) -> "Jet":
        """Substitute this jet into a univariate series ``sum taylor[k] u**k``."""
        m = self.alg.size
        shape = self.shape
        a = np.ascontiguousarray(self.c.reshape(m, -1))
        t = np.ascontiguousarray(taylor.reshape(taylor.shape[0], -1))
        alg = self.alg
        out = _kernels.compose(a, t, alg.ia, alg.ib, alg.ic)
        return Jet(alg, out.reshape((m,) + shape))

    def exp(self):
        return self._compose(_taylor_exp(self.c[0], self.order))

    def log(self):
        return self._compose(_taylor_log(self.c[0], self.order))

    def sin(self):
        return self._compose(
            _taylor_cyclic(
                (np.sin, np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v)),
                self.c[0],
                self.order,
            )
        )

    def cos(self):
        return self._compose(
            _taylor_cyclic(
                (np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v), np.sin),
                self.c[0],
                self.order,
            )
        )

    def sinh(self):
        return self._compose(_taylor_hyper(np.sinh, np.cosh, self.c[0], self.order))

    def cosh(self):
        return self._compose(_taylor_hyper(np.cosh, np.sinh, self.c[0], self.order))

    def sqrt(self):
        v = self.c[0]
        if np.any(v <= 0):
            raise DomainError("sqrt of a non-positive value")
        return self._compose(_taylor_power(v, 0.5, self.order))

    def reciprocal(self):
        v = self.c[0]
        if np.any(v == 0):
            raise DomainError("division by zero")
        return self._compose(_taylor_power(v, -1.0, self.order))

    def powi(self, n: int):
        v = self.c[0]
        if n < 0 and np.any(v == 0):
            raise DomainError("negative power of zero")
        if n == 0:
            return Jet.constant(np.ones(self.shape), self.dim, self.order)
        if n == 1:
            return self
        return self._compose(_taylor_power(v, n, self.order))

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, shape={self.shape})"


def _letters_free(used: str, k: int) -> str:
    return "".join(ch for ch in string.ascii_letters if ch not in used)[:k]


def _einsum2(sa: str, sb: str, so: str, a, b):
    if isinstance(a, Jet) and isinstance(b, Jet):
        if a.dim != b.dim:
            raise ValueError("jets over different charts")
        order = min(a.order, b.order)
        alg = algebra(a.dim, order)
        ca, cb = a.c[: alg.size], b.c[: alg.size]
        (t,) = _letters_free(sa + sb + so, 1)
        terms = np.einsum(f"{t}{sa},{t}{sb}->{t}{so}", ca[alg.ia], cb[alg.ib])
        return Jet(alg, alg.fold(terms))
    if isinstance(a, Jet):
        (t,) = _letters_free(sa + sb + so, 1)
        return Jet(a.alg, np.einsum(f"{t}{sa},{sb}->{t}{so}", a.c, np.asarray(b, float)))
    if isinstance(b, Jet):
        (t,) = _letters_free(sa + sb + so, 1)
        return Jet(b.alg, np.einsum(f"{sa},{t}{sb}->{t}{so}", np.asarray(a, float), b.c))
    return np.einsum(f"{sa},{sb}->{so}", a, b)


def einsum(subscripts: str, *operands):
    """``np.einsum`` over jets and constant arrays (explicit ``->`` required)."""
    ins, out = subscripts.replace(" ", "").split("->")
    terms = ins.split(",")
    if len(terms) != len(operands):
        raise ValueError("operand count does not match subscripts")
    cur_sub, cur = terms[0], operands[0]
    if len(operands) == 1:
        if isinstance(cur, Jet):
            (t,) = _letters_free(cur_sub + out, 1)
            return Jet(cur.alg, np.einsum(f"{t}{cur_sub}->{t}{out}", cur.c))
        return np.einsum(subscripts, cur)
    for k in range(1, len(operands)):
        nxt = terms[k]
        if k == len(operands) - 1:
            keep = out
        else:
            later = "".join(terms[k + 1 :]) + out
            keep = "".join(dict.fromkeys(ch for ch in cur_sub + nxt if ch in later))
        cur = _einsum2(cur_sub, nxt, keep, cur, operands[k])
        cur_sub = keep
    return cur


def inv(mat: Jet) -> Jet:
    """Inverse of a square matrix-valued jet by the terminating Neumann series."""
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("inv needs a square matrix jet")
    g0 = mat.c[0]
    g0inv = np.linalg.inv(g0)
    h = Jet(mat.alg, mat.c.copy())
    h.c[0] = 0.0
    x = -einsum("ab,bc->ac", g0inv, h)
    term = Jet.constant(g0inv, mat.dim, mat.order)
    result = term
    for _ in range(mat.order):
        term = einsum("ab,bc->ac", x, term)
        result = result + term
    return result


def value(x):
    """Base-point value of a jet, or the array itself for constants."""
    return x.c[0] if isinstance(x, Jet) else np.asarray(x, dtype=float)
