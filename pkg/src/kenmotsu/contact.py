"""Almost contact pseudo-metric structures and their residuals.

All residuals are tensors expressed in a pseudo-orthonormal frame at the
sample point (``Frame`` from :mod:`kenmotsu.tensor`) and reduced with a max
norm, so they are unit-scale regardless of how strongly the chart warps the
metric.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable

import numpy as np

from kenmotsu import jet as J
from kenmotsu.geometry import LocalGeometry, local_geometry
from kenmotsu.jet import Jet
from kenmotsu.manifold import ManifoldSpec
from kenmotsu.report import check, info
from kenmotsu.tensor import DOWN, UP, frame_components

DEFAULT_TOL = 1e-8


class MissingStructure(ValueError):
    pass


class DimensionError(ValueError):
    pass


class StructureInvalid(ValueError):
    """The almost contact axioms fail, so Kenmotsu identities are meaningless."""


def frame_norm(geo: LocalGeometry, comps, variance) -> float:
    comps = np.asarray(J.value(comps), dtype=float)
    if comps.ndim == 0:
        return float(abs(comps))
    return float(np.max(np.abs(frame_components(comps, variance, geo.frame))))


class LocalStructure:
    """The structure tensors (phi, xi, eta) of a spec around one point."""

    def __init__(self, geo: LocalGeometry):
        if geo.spec.structure is None:
            raise MissingStructure(f"{geo.spec.name}: no structure block")
        if geo.dim % 2 == 0:
            raise DimensionError("almost contact structures need odd dimension")
        self.geo = geo
        self.block = geo.spec.structure

    @property
    def eps(self) -> float:
        return self.geo.epsilon

    @property
    def n(self) -> int:
        return (self.geo.dim - 1) // 2

    @cached_property
    def phi(self) -> Jet:
        """phi^a_b, with phi(d_b) = phi^a_b d_a."""
        return self.geo.field(self.block.phi)

    @cached_property
    def xi(self) -> Jet:
        return self.geo.field(self.block.xi)

    @cached_property
    def eta_from_xi(self) -> Jet:
        return J.einsum("ab,b->a", self.geo.g, self.xi) * self.eps

    @cached_property
    def eta(self) -> Jet:
        if self.block.eta is None:
            return self.eta_from_xi
        return self.geo.field(self.block.eta)

    @cached_property
    def g_phi(self) -> Jet:
        """(g phi)_{ab} = g(d_a, phi d_b), i.e. the fundamental 2-form."""
        return J.einsum("ac,cb->ab", self.geo.g, self.phi)

    @cached_property
    def nabla_phi(self) -> Jet:
        return self.geo.nabla(self.phi, (UP, DOWN))  # [m, a, b]

    @cached_property
    def nabla_eta(self) -> Jet:
        return self.geo.nabla(self.eta, (DOWN,))  # [m, b]

    @cached_property
    def nabla_xi(self) -> Jet:
        return self.geo.nabla(self.xi, (UP,))  # [m, a]

    def norm(self, comps, variance) -> float:
        return frame_norm(self.geo, comps, variance)

    # axioms ------------------------------------------------------------

    def axiom_residuals(self) -> dict:
        v = J.value
        phi, xi, eta = v(self.phi), v(self.xi), v(self.eta)
        g = v(self.geo.g)
        d = self.geo.dim
        eps = self.eps
        eye = np.eye(d)
        n = self.norm
        out = {
            "phi_squared": n(phi @ phi + eye - np.outer(xi, eta), (UP, DOWN)),
            "eta_of_xi": abs(eta @ xi - 1.0),
            "phi_xi": n(phi @ xi, (UP,)),
            "eta_phi": n(eta @ phi, (DOWN,)),
            "metric_compatibility": n(phi.T @ g @ phi - g + eps * np.outer(eta, eta), (DOWN, DOWN)),
            "eta_is_metric_dual": n(eta - eps * g @ xi, (DOWN,)),
            "phi_skew": n(phi.T @ g + g @ phi, (DOWN, DOWN)),
            "xi_norm": abs(xi @ g @ xi - eps),
        }
        return out

    # Kenmotsu tensors ------------------------------------------------

    def kenmotsu_tensor(self) -> np.ndarray:
        """[a, m, b]: (nabla_m phi) d_b + eta(d_b) phi d_m + eps g(d_m, phi d_b) xi."""
        v = J.value
        nphi, phi, xi, eta, gphi = (
            v(self.nabla_phi),
            v(self.phi),
            v(self.xi),
            v(self.eta),
            v(self.g_phi),
        )
        return (
            nphi.transpose(1, 0, 2)
            + np.einsum("b,am->amb", eta, phi)
            + self.eps * np.einsum("mb,a->amb", gphi, xi)
        )

    def normality_tensor(self) -> np.ndarray:
        """[a, m, b]: (nabla_{phi X} phi) Y - phi (nabla_X phi) Y + (nabla_X eta)(Y) xi."""
        v = J.value
        nphi, phi, xi, neta = v(self.nabla_phi), v(self.phi), v(self.xi), v(self.nabla_eta)
        return (
            np.einsum("cm,cab->amb", phi, nphi)
            - np.einsum("ac,mcb->amb", phi, nphi)
            + np.einsum("mb,a->amb", neta, xi)
        )

    def exterior(self) -> dict:
        eta = self.eta
        Phi = self.g_phi
        deta = eta.grad()
        d_eta = (deta - deta.transpose(1, 0)).value
        dPhi_j = Phi.grad()  # [i, j, k] = d_i Phi_jk
        d_Phi = (dPhi_j + dPhi_j.transpose(1, 2, 0) + dPhi_j.transpose(2, 0, 1)).value
        e, P = J.value(eta), J.value(Phi)
        wedge = (
            np.einsum("i,jk->ijk", e, P)
            + np.einsum("j,ki->ijk", e, P)
            + np.einsum("k,ij->ijk", e, P)
        )
        return {"d_eta": d_eta, "Phi": P, "d_Phi": d_Phi, "eta_wedge_Phi": wedge}


def local_structure(spec: ManifoldSpec, point) -> LocalStructure:
    return LocalStructure(local_geometry(spec, tuple(float(x) for x in point)))


# --- operations -------------------------------------------------------------


def validate_structure(spec: ManifoldSpec, points: Iterable, tol: float = DEFAULT_TOL) -> list:
    """Max residual per almost contact axiom over ``points``."""
    if spec.dim % 2 == 0:
        raise DimensionError("almost contact structures need odd dimension")
    worst: dict = {}
    for p in points:
        for name, r in local_structure(spec, p).axiom_residuals().items():
            worst[name] = max(worst.get(name, 0.0), r)
    return [check(f"structure.{k}", v, tol) for k, v in worst.items()]


def structure_valid(spec: ManifoldSpec, points, tol: float = DEFAULT_TOL) -> bool:
    return all(e.passed for e in validate_structure(spec, points, tol))


def exterior_derivatives(spec: ManifoldSpec, point) -> dict:
    """d(eta), d(Phi) and the residual of d(Phi) - 2 eta ^ Phi at ``point``.

    d uses dw(X,Y) = X w(Y) - Y w(X) - w([X,Y]) (no 1/2), wedge the
    determinant convention.
    """
    ls = local_structure(spec, point)
    ex = ls.exterior()
    ex["residual"] = ls.norm(ex["d_Phi"] - 2.0 * ex["eta_wedge_Phi"], (DOWN,) * 3)
    ex["d_eta_norm"] = ls.norm(ex["d_eta"], (DOWN, DOWN))
    ex["contact_residual"] = ls.norm(ex["d_eta"] - ex["Phi"], (DOWN, DOWN))
    return ex


def normality_residual(spec: ManifoldSpec, point, X, Y) -> np.ndarray:
    t = local_structure(spec, point).normality_tensor()
    return np.einsum("amb,m,b->a", t, np.asarray(X, float), np.asarray(Y, float))


def kenmotsu_residual(spec: ManifoldSpec, point, X, Y) -> np.ndarray:
    t = local_structure(spec, point).kenmotsu_tensor()
    return np.einsum("amb,m,b->a", t, np.asarray(X, float), np.asarray(Y, float))


def kenmotsu_tensor_norm(spec: ManifoldSpec, point) -> float:
    ls = local_structure(spec, point)
    return ls.norm(ls.kenmotsu_tensor(), (UP, DOWN, DOWN))


def normality_tensor_norm(spec: ManifoldSpec, point) -> float:
    ls = local_structure(spec, point)
    return ls.norm(ls.normality_tensor(), (UP, DOWN, DOWN))


def identity_residuals(ls: LocalStructure) -> dict:
    """Frame-norm residuals of the first and second order Kenmotsu identities."""
    geo = ls.geo
    v = J.value
    d, n, eps = geo.dim, ls.n, ls.eps
    g = v(geo.g)
    phi, xi, eta, gphi = v(ls.phi), v(ls.xi), v(ls.eta), v(ls.g_phi)
    R = v(geo.riemann)
    Rlow = v(geo.riemann_low)
    ric, Q = v(geo.ricci), v(geo.ricci_op)
    nR = v(geo.nabla_riemann)
    nQ = v(geo.nabla_ricci_op)
    dl = np.eye(d)
    U, L = UP, DOWN
    nm = ls.norm
    out = {}

    out["nabla_xi"] = nm(v(ls.nabla_xi) - (dl - np.outer(eta, xi)), (L, U))
    out["nabla_eta"] = nm(v(ls.nabla_eta) - (eps * g - np.outer(eta, eta)), (L, L))
    lie_g = v(geo.lie_metric(ls.xi))
    out["lie_xi_metric"] = nm(lie_g - 2 * (g - eps * np.outer(eta, eta)), (L, L))
    out["lie_xi_phi"] = nm(v(geo.lie(ls.xi, ls.phi, (U, L))), (U, L))
    out["lie_xi_eta"] = nm(v(geo.lie(ls.xi, ls.eta, (L,))), (L,))

    # R(X,Y)xi = eta(X)Y - eta(Y)X, layout [l, i, j]
    r_xi = np.einsum("lkij,k->lij", R, xi)
    out["curvature_on_xi"] = nm(
        r_xi - (np.einsum("i,lj->lij", eta, dl) - np.einsum("j,li->lij", eta, dl)), (U, L, L)
    )
    # eta(R(X,Y)Z) = eps{eta(Y)g(X,Z) - eta(X)g(Y,Z)}, layout [k, i, j]
    out["eta_of_curvature"] = nm(
        np.einsum("l,lkij->kij", eta, R)
        - eps * (np.einsum("j,ik->kij", eta, g) - np.einsum("i,jk->kij", eta, g)),
        (L, L, L),
    )
    # R(X,xi)Y = eps g(X,Y) xi - eta(Y) X, layout [l, k, i] with X = d_i, Y = d_k
    out["curvature_x_xi"] = nm(
        np.einsum("lkia,a->lki", R, xi)
        - (eps * np.einsum("ik,l->lki", g, xi) - np.einsum("k,li->lki", eta, dl)),
        (U, L, L),
    )
    out["ricci_on_xi"] = nm(ric @ xi + 2 * n * eta, (L,))
    out["ricci_operator_on_xi"] = nm(Q @ xi + 2 * n * eps * xi, (U,))
    # xi-sectional curvature is -eps on ker(eta): Rlow(xi,X,Y,xi) + g(X,Y) = 0 there
    proj = dl - np.outer(xi, eta)
    B = np.einsum("axyb,a,b->xy", Rlow, xi, xi) + g
    out["xi_sectional"] = nm(proj.T @ B @ proj, (L, L))
    # (nabla_Z R)(X,Y)xi = eps{g(X,Z)Y - g(Y,Z)X} - R(X,Y)Z, layout [z, l, x, y]
    out["nabla_curvature_on_xi"] = nm(
        np.einsum("zlkxy,k->zlxy", nR, xi)
        - eps * (np.einsum("xz,ly->zlxy", g, dl) - np.einsum("yz,lx->zlxy", g, dl))
        + np.einsum("lzxy->zlxy", R),
        (L, U, L, L),
    )
    # R(X,Y)phi Z - phi R(X,Y)Z, layout [l, k, i, j]
    lhs = np.einsum("laij,ak->lkij", R, phi) - np.einsum("la,akij->lkij", phi, R)
    rhs = eps * (
        np.einsum("jk,li->lkij", g, phi)
        - np.einsum("ik,lj->lkij", g, phi)
        + np.einsum("ik,lj->lkij", gphi, dl)
        - np.einsum("jk,li->lkij", gphi, dl)
    )
    out["curvature_phi_commutator"] = nm(lhs - rhs, (U, L, L, L))
    lhs = np.einsum("lkab,ai,bj->lkij", R, phi, phi) - R
    rhs = eps * (
        np.einsum("jk,li->lkij", g, dl)
        - np.einsum("ik,lj->lkij", g, dl)
        + np.einsum("jk,li->lkij", gphi, phi)
        - np.einsum("ik,lj->lkij", gphi, phi)
    )
    out["curvature_phi_phi"] = nm(lhs - rhs, (U, L, L, L))
    # (nabla_X Q) xi = -QX - 2n eps X, layout [m, a]
    out["nabla_ricci_op_on_xi"] = nm(
        np.einsum("mab,b->ma", nQ, xi) + Q.T + 2 * n * eps * dl, (L, U)
    )
    # (nabla_xi Q) X = -2QX - 4n eps X, layout [a, b]
    out["nabla_xi_ricci_op"] = nm(
        np.einsum("m,mab->ab", xi, nQ) + 2 * Q + 4 * n * eps * dl, (U, L)
    )
    return out


def kenmotsu_identity_suite(
    spec: ManifoldSpec, points, tol: float = DEFAULT_TOL, require_valid: bool = True
) -> list:
    """Residuals of the Kenmotsu identities over ``points``.

    Refuses to run (``MissingStructure`` / ``StructureInvalid``) unless the
    structure block is present and satisfies the almost contact axioms.
    """
    points = list(points)
    if spec.structure is None:
        raise MissingStructure(f"{spec.name}: no structure block")
    if require_valid:
        bad = [e for e in validate_structure(spec, points, tol) if not e.passed]
        if bad:
            names = ", ".join(e.name for e in bad)
            raise StructureInvalid(f"{spec.name}: almost contact axioms fail ({names})")
    worst: dict = {}
    for p in points:
        for k, r in identity_residuals(local_structure(spec, p)).items():
            worst[k] = max(worst.get(k, 0.0), r)
    return [check(f"kenmotsu.{k}", v, tol) for k, v in worst.items()]


def kenmotsu_checks(spec: ManifoldSpec, points, tol: float = DEFAULT_TOL) -> list:
    """Kenmotsu condition, normality and the exterior-derivative conditions."""
    kres = nres = dphi = deta = contact = 0.0
    for p in points:
        kres = max(kres, kenmotsu_tensor_norm(spec, p))
        nres = max(nres, normality_tensor_norm(spec, p))
        ex = exterior_derivatives(spec, p)
        dphi = max(dphi, ex["residual"])
        deta = max(deta, ex["d_eta_norm"])
        contact = max(contact, ex["contact_residual"])
    return [
        check("kenmotsu.condition", kres, tol),
        check("kenmotsu.normality", nres, tol),
        check("kenmotsu.d_eta", deta, tol),
        check("kenmotsu.d_Phi", dphi, tol),
        info("contact.d_eta_minus_Phi", contact, "informational"),
    ]


def random_vectors(geo: LocalGeometry, rng: np.random.Generator, count: int) -> np.ndarray:
    """Random unit-scale vectors: frame combinations with N(0,1) coefficients."""
    return (geo.frame.vectors @ rng.standard_normal((geo.dim, count))).T


def kernel_eta_vectors(ls: LocalStructure, rng: np.random.Generator, count: int, min_norm: float = 0.1) -> list:
    """Random non-light-like vectors in ker(eta), via the projection -phi^2."""
    phi = J.value(ls.phi)
    proj = -(phi @ phi)
    g = ls.geo.metric.g
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count + 100:
            raise RuntimeError("could not sample non-light-like vectors in ker(eta)")
        x = proj @ random_vectors(ls.geo, rng, 1)[0]
        fx = np.linalg.solve(ls.geo.frame.vectors, x)
        if abs(x @ g @ x) < min_norm * (fx @ fx):
            continue
        out.append(x)
    return out


def xi_sectional(spec: ManifoldSpec, point, X) -> float:
    """K(xi, X) = g(R(xi,X)X, xi) / (eps g(X,X)) for X in ker(eta)."""
    ls = local_structure(spec, point)
    return ls.geo.sectional(J.value(ls.xi), X)


def phi_sectional(spec: ManifoldSpec, point, X) -> float:
    """K(X, phi X) = g(R(phi X, X)X, phi X) / g(X,X)^2 for X in ker(eta)."""
    ls = local_structure(spec, point)
    return ls.geo.sectional(J.value(ls.phi) @ np.asarray(X, float), X)
