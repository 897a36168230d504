"""Levi-Civita connection, curvature, covariant and Lie derivatives at a point.

Every field is carried as a :class:`~kenmotsu.jet.Jet` around the sample
point. Metric jets of order 3 give the connection to order 2, curvature to
order 1 and first covariant derivatives of curvature exactly at the point.

Index layouts (coordinate components):

* ``gamma[k, i, j]``         Gamma^k_{ij}
* ``riemann[l, k, i, j]``    R^l_{kij}, so that R(d_i, d_j) d_k = R^l_{kij} d_l
* ``riemann_low[i, j, k, w]`` R(d_i, d_j, d_k, d_w) = g(R(d_i, d_j) d_k, d_w)
* ``ricci[j, k]``            Ric(d_j, d_k) = trace(X -> R(X, d_j) d_k)
* ``ricci_op[a, b]``         Q^a_b with Ric(X, Y) = g(QX, Y)
* covariant derivatives put the differentiating slot first:
  ``nabla(T)[m, ...] = (nabla_m T)[...]``.

The curvature operator is R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
"""

from __future__ import annotations

import functools
import string
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from kenmotsu import jet as J
from kenmotsu.jet import Jet
from kenmotsu.manifold import ManifoldSpec
from kenmotsu.tensor import (
    DOWN,
    UP,
    Frame,
    MetricAtPoint,
    TensorValue,
    build_frame,
    invert_metric,
)

PLANE_TOL = 1e-8


class DegeneratePlane(ValueError):
    pass


def _as_point(point) -> tuple:
    return tuple(float(x) for x in point)


class LocalGeometry:
    """Lazily computed geometry of ``spec`` around one point."""

    def __init__(self, spec: ManifoldSpec, point, order: int = 3):
        self.spec = spec
        self.point = _as_point(point)
        self.order = order
        if len(self.point) != spec.dim:
            raise ValueError(f"point {self.point} does not match chart dimension {spec.dim}")

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def epsilon(self) -> float:
        return self.spec.epsilon

    def field(self, nested, order: Optional[int] = None) -> Jet:
        return self.spec.field_jet(_tuplify(nested), self.point, self.order if order is None else order)

    # metric -------------------------------------------------------------

    @cached_property
    def g(self) -> Jet:
        return self.spec.metric_jet(self.point, self.order)

    @cached_property
    def metric(self) -> MetricAtPoint:
        return invert_metric(self.g.value)

    @cached_property
    def g_inv(self) -> Jet:
        self.metric  # raises DegenerateMetric first
        return J.inv(self.g)

    @cached_property
    def frame(self) -> Frame:
        hint = None
        if self.spec.structure is not None:
            hint = self.field(self.spec.structure.xi, 0).value
        return build_frame(self.metric, hint=hint)

    # connection and curvature -------------------------------------------

    @cached_property
    def gamma(self) -> Jet:
        dg = self.g.grad()  # dg[m, i, j] = d_m g_ij
        # S[i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
        s = dg + dg.transpose(1, 0, 2) - dg.transpose(1, 2, 0)
        return J.einsum("kl,ijl->kij", self.g_inv, s) * 0.5

    @cached_property
    def riemann(self) -> Jet:
        gam = self.gamma
        dgam = gam.grad()  # dgam[m, k, i, j] = d_m Gamma^k_ij
        term = dgam.transpose(1, 3, 0, 2) - dgam.transpose(1, 3, 2, 0)
        quad = J.einsum("lim,mjk->lkij", gam, gam) - J.einsum("ljm,mik->lkij", gam, gam)
        return term + quad

    @cached_property
    def riemann_low(self) -> Jet:
        return J.einsum("wl,lkij->ijkw", self.g, self.riemann)

    @cached_property
    def ricci(self) -> Jet:
        return J.einsum("ikij->jk", self.riemann)

    @cached_property
    def ricci_op(self) -> Jet:
        return J.einsum("ac,bc->ab", self.g_inv, self.ricci)

    @cached_property
    def scalar(self) -> Jet:
        return J.einsum("aa->", self.ricci_op)

    @cached_property
    def weyl(self) -> Jet:
        d = self.dim
        R, ric, Q, r = self.riemann, self.ricci, self.ricci_op, self.scalar
        g = self.g.truncate(R.order)
        delta = np.eye(d)
        ric_x = J.einsum("jk,li->lkij", ric, delta) + J.einsum("jk,li->lkij", g, Q)
        ric_y = J.einsum("ik,lj->lkij", ric, delta) + J.einsum("ik,lj->lkij", g, Q)
        gg = J.einsum("jk,li->lkij", g, delta) - J.einsum("ik,lj->lkij", g, delta)
        return R - (ric_x - ric_y) * (1.0 / (d - 2)) + gg * r * (1.0 / ((d - 1) * (d - 2)))

    # derivatives -----------------------------------------------------------

    def nabla(self, t: Jet, variance: Sequence[str]) -> Jet:
        """Covariant derivative of a tensor jet; new lower slot goes first."""
        variance = tuple(variance)
        if t.ndim != len(variance):
            raise ValueError("variance does not match tensor rank")
        out = t.grad()
        if not variance:
            return out
        gam = self.gamma
        letters = string.ascii_lowercase[: len(variance)]
        for s, v in enumerate(variance):
            src = letters[:s] + "z" + letters[s + 1 :]
            if v == UP:
                out = out + J.einsum(f"{letters[s]}mz,{src}->m{letters}", gam, t)
            else:
                out = out - J.einsum(f"zm{letters[s]},{src}->m{letters}", gam, t)
        return out

    def lie(self, v: Jet, t: Jet, variance: Sequence[str]) -> Jet:
        """Lie derivative of a tensor jet along the vector jet ``v``."""
        variance = tuple(variance)
        nv = self.nabla(v, (UP,))  # nv[m, a] = nabla_m V^a
        if not variance:
            return J.einsum("m,m->", v, t.grad())
        letters = string.ascii_lowercase[: len(variance)]
        out = J.einsum(f"m,m{letters}->{letters}", v, self.nabla(t, variance))
        for s, var in enumerate(variance):
            src = letters[:s] + "z" + letters[s + 1 :]
            if var == UP:
                out = out - J.einsum(f"{src},z{letters[s]}->{letters}", t, nv)
            else:
                out = out + J.einsum(f"{src},{letters[s]}z->{letters}", t, nv)
        return out

    def lie_metric(self, v: Jet) -> Jet:
        """(L_V g)(X, Y) = g(nabla_X V, Y) + g(nabla_Y V, X)."""
        nv = self.nabla(v, (UP,))
        g = self.g
        return J.einsum("ia,aj->ij", nv, g) + J.einsum("ja,ai->ij", nv, g)

    def lie_connection(self, v: Jet) -> Jet:
        """(L_V nabla)(X, Y) = nabla_X nabla_Y V - nabla_{nabla_X Y} V + R(V, X) Y.

        Layout ``[k, i, j]`` with X = d_i, Y = d_j, like ``gamma``.
        """
        nv = self.nabla(v, (UP,))  # [j, k]
        nnv = self.nabla(nv, (DOWN, UP))  # [i, j, k]
        return nnv.transpose(2, 0, 1) + J.einsum("kjli,l->kij", self.riemann, v)

    def lie_riemann(self, v: Jet) -> Jet:
        """(L_V R)(X,Y)Z = (nabla_X L_V nabla)(Y,Z) - (nabla_Y L_V nabla)(X,Z)."""
        nl = self.nabla(self.lie_connection(v), (UP, DOWN, DOWN))  # [m, l, i, j]
        return nl.transpose(1, 3, 0, 2) - nl.transpose(1, 3, 2, 0)

    @cached_property
    def nabla_riemann_low(self) -> Jet:
        return self.nabla(self.riemann_low, (DOWN,) * 4)

    @cached_property
    def nabla_riemann(self) -> Jet:
        """(nabla_m R)^l_{kij}, layout ``[m, l, k, i, j]``."""
        return self.nabla(self.riemann, (UP, DOWN, DOWN, DOWN))

    @cached_property
    def nabla_ricci_op(self) -> Jet:
        return self.nabla(self.ricci_op, (UP, DOWN))

    @cached_property
    def scalar_gradient(self) -> Jet:
        """D r with g(D r, X) = X(r)."""
        return J.einsum("ab,b->a", self.g_inv, self.scalar.grad())

    # pointwise helpers ---------------------------------------------------

    def inner(self, x, y) -> float:
        return self.metric.inner(x, y)

    def sectional(self, x, y, tol: float = PLANE_TOL) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        g = self.metric.g
        den = (x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2
        # compare against frame lengths so the test is independent of chart scaling
        fx, fy = np.linalg.solve(self.frame.vectors, np.stack([x, y], axis=1)).T
        ref = float(fx @ fx) * float(fy @ fy)
        if ref == 0.0 or abs(den) < tol * ref:
            raise DegeneratePlane(f"plane is degenerate (Gram determinant {den:.3e})")
        num = np.einsum("ijkw,i,j,k,w->", self.riemann_low.value, x, y, y, x)
        return float(num / den)


def _tuplify(x):
    if isinstance(x, (list, tuple)):
        return tuple(_tuplify(v) for v in x)
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return repr(float(x))
    return x


@functools.lru_cache(maxsize=1024)
def local_geometry(spec: ManifoldSpec, point, order: int = 3) -> LocalGeometry:
    return LocalGeometry(spec, point, order)


def _geo(spec, point, order=3) -> LocalGeometry:
    return local_geometry(spec, _as_point(point), order)


# --- public operations ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConnectionValue:
    gamma: np.ndarray
    dgamma: Optional[np.ndarray] = None  # [l, k, i, j] = d_l Gamma^k_ij
    d2gamma: Optional[np.ndarray] = None  # [m, l, k, i, j]


@dataclass(frozen=True, eq=False)
class CurvatureBundle:
    riemann: np.ndarray
    riemann_low: np.ndarray
    ricci: np.ndarray
    ricci_op: np.ndarray
    scalar: float
    weyl: np.ndarray
    nabla_riemann: Optional[np.ndarray] = None  # (0,5), [m, i, j, k, w]


def christoffel(spec: ManifoldSpec, point, derivatives: int = 2) -> ConnectionValue:
    geo = _geo(spec, point)
    gam = geo.gamma
    dgam = gam.grad() if derivatives >= 1 else None
    d2 = dgam.grad().value if derivatives >= 2 else None
    return ConnectionValue(gam.value, dgam.value if dgam is not None else None, d2)


def curvature(spec: ManifoldSpec, point, with_nabla: bool = False) -> CurvatureBundle:
    geo = _geo(spec, point)
    return CurvatureBundle(
        riemann=geo.riemann.value,
        riemann_low=geo.riemann_low.value,
        ricci=geo.ricci.value,
        ricci_op=geo.ricci_op.value,
        scalar=float(geo.scalar.value),
        weyl=geo.weyl.value,
        nabla_riemann=geo.nabla_riemann_low.value if with_nabla else None,
    )


def covariant_derivative(field, variance: Sequence[str], spec: ManifoldSpec, point) -> TensorValue:
    """nabla of a tensor field given by (nested) expressions; extra lower slot first."""
    geo = _geo(spec, point)
    t = geo.field(field)
    return TensorValue(geo.nabla(t, variance).value, (DOWN,) + tuple(variance))


def nabla_riemann(spec: ManifoldSpec, point) -> TensorValue:
    return TensorValue(_geo(spec, point).nabla_riemann_low.value, (DOWN,) * 5)


def lie_derivative_metric(V, spec: ManifoldSpec, point) -> TensorValue:
    geo = _geo(spec, point)
    return TensorValue(geo.lie_metric(geo.field(V)).value, (DOWN, DOWN))


def lie_derivative_tensor(V, field, variance: Sequence[str], spec: ManifoldSpec, point) -> TensorValue:
    geo = _geo(spec, point)
    out = geo.lie(geo.field(V), geo.field(field), variance)
    return TensorValue(out.value, tuple(variance))


def lie_derivative_connection(V, spec: ManifoldSpec, point) -> TensorValue:
    geo = _geo(spec, point)
    return TensorValue(geo.lie_connection(geo.field(V)).value, (UP, DOWN, DOWN))


def lie_derivative_riemann(V, spec: ManifoldSpec, point) -> TensorValue:
    geo = _geo(spec, point)
    return TensorValue(geo.lie_riemann(geo.field(V)).value, (UP, DOWN, DOWN, DOWN))


def sectional_curvature(X, Y, spec: ManifoldSpec, point, tol: float = PLANE_TOL) -> float:
    return _geo(spec, point).sectional(X, Y, tol)
