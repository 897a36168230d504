"""Theorem-level diagnostics on sampled points.

Fitted constants are global least-squares values over every sampled point
(and every sampled direction); a verdict passes when the worst pointwise
residual after the refit is below tolerance. Residual tensors are measured
in the pseudo-orthonormal frame of each point, so the tolerances are
unit-scale.

Entries named ``consistency.*`` are instance checks of implications: they
are only evaluated where the hypotheses hold and are skipped otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from kenmotsu import jet as J
from kenmotsu.contact import (
    DEFAULT_TOL,
    MissingStructure,
    StructureInvalid,
    kenmotsu_checks,
    kernel_eta_vectors,
    local_structure,
    random_vectors,
    validate_structure,
)
from kenmotsu.geometry import DegeneratePlane, LocalGeometry, local_geometry
from kenmotsu.manifold import ManifoldSpec, SolitonBlock
from kenmotsu.report import CheckEntry, Report, check, info, skipped
from kenmotsu.tensor import DOWN, UP, frame_components

# planes whose Gram determinant is this small relative to |X|^2 |Y|^2 are
# rejected when sampling: K loses digits quickly as the plane turns null
PLANE_SAMPLE_TOL = 0.05

ClassificationReport = Report


def _geo(spec, p) -> LocalGeometry:
    return local_geometry(spec, tuple(float(x) for x in p))


def _fnorm(geo: LocalGeometry, comps, variance) -> float:
    comps = np.asarray(comps, dtype=float)
    if comps.ndim == 0:
        return float(abs(comps))
    return float(np.max(np.abs(frame_components(comps, variance, geo.frame))))


def _require_structure(spec: ManifoldSpec, points, tol, require_valid=True):
    if spec.structure is None:
        raise MissingStructure(f"{spec.name}: no structure block")
    if require_valid:
        bad = [e.name for e in validate_structure(spec, points, tol) if not e.passed]
        if bad:
            raise StructureInvalid(f"{spec.name}: almost contact axioms fail ({', '.join(bad)})")


def _g_wedge(g: np.ndarray) -> np.ndarray:
    """[l, k, i, j] components of g(Y,Z)X - g(X,Z)Y with X = d_i, Y = d_j, Z = d_k."""
    d = g.shape[0]
    dl = np.eye(d)
    return np.einsum("jk,li->lkij", g, dl) - np.einsum("ik,lj->lkij", g, dl)


# --- eta-Einstein ----------------------------------------------------------


@dataclass
class EtaEinsteinFit:
    a: float
    b: float
    a_closed: float
    b_closed: float
    fit_residual: float
    closed_gap: float
    constraint_gap: float  # max |eps a + b + 2n|
    a_spread: float
    b_spread: float
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries if e.name == "eta_einstein.fit")


def eta_einstein_fit(spec: ManifoldSpec, points, tol: float = DEFAULT_TOL, require_valid: bool = True):
    """Fit Ric = a g + b eta(x)eta at each point and compare with the closed form.

    The closed form is a = r/2n + eps, b = -(eps r/2n + 2n + 1).
    """
    points = list(points)
    _require_structure(spec, points, tol, require_valid)
    eps, n = spec.epsilon, spec.n
    a_pts, b_pts, fit, gap, cons = [], [], 0.0, 0.0, 0.0
    for p in points:
        ls = local_structure(spec, p)
        geo = ls.geo
        E = geo.frame.vectors
        ric = E.T @ geo.ricci.value @ E
        G = E.T @ geo.metric.g @ E
        eta = J.value(ls.eta) @ E
        H = np.outer(eta, eta)
        basis = np.stack([G.ravel(), H.ravel()], axis=1)
        (a, b), *_ = np.linalg.lstsq(basis, ric.ravel(), rcond=None)
        fit = max(fit, float(np.max(np.abs(ric - a * G - b * H))))
        r = float(geo.scalar.value)
        ac, bc = r / (2 * n) + eps, -(eps * r / (2 * n) + 2 * n + 1)
        gap = max(gap, abs(a - ac), abs(b - bc))
        cons = max(cons, abs(eps * a + b + 2 * n))
        a_pts.append(a)
        b_pts.append(b)
        last_closed = (ac, bc)
    a_arr, b_arr = np.array(a_pts), np.array(b_pts)
    res = EtaEinsteinFit(
        a=float(a_arr.mean()),
        b=float(b_arr.mean()),
        a_closed=last_closed[0],
        b_closed=last_closed[1],
        fit_residual=fit,
        closed_gap=gap,
        constraint_gap=cons,
        a_spread=float(np.ptp(a_arr)),
        b_spread=float(np.ptp(b_arr)),
    )
    res.entries = [
        check("eta_einstein.fit", max(fit, gap), tol, "fit residual and gap to the closed form"),
        check("einstein", max(fit, float(np.max(np.abs(b_arr)))), tol, "eta-Einstein with b = 0"),
        info("eta_einstein.a_spread", res.a_spread, "variation of a across points"),
    ]
    return res


# --- constant phi-sectional curvature ---------------------------------------


def phi_sectional_model(ls, c: float) -> np.ndarray:
    """[l, k, i, j] of the curvature of constant phi-sectional curvature c."""
    eps = ls.eps
    v = J.value
    g, phi, xi, eta, gphi = v(ls.geo.g), v(ls.phi), v(ls.xi), v(ls.eta), v(ls.g_phi)
    dl = np.eye(g.shape[0])
    first = _g_wedge(g)
    second = (
        eps * np.einsum("i,k,lj->lkij", eta, eta, dl)
        - eps * np.einsum("j,k,li->lkij", eta, eta, dl)
        + np.einsum("j,ik,l->lkij", eta, g, xi)
        - np.einsum("i,jk,l->lkij", eta, g, xi)
        + np.einsum("ik,lj->lkij", gphi, phi)
        - np.einsum("jk,li->lkij", gphi, phi)
        + 2 * np.einsum("ij,lk->lkij", gphi, phi)
    )
    return 0.25 * ((c - 3 * eps) * first + (c + eps) * second)


@dataclass
class PhiSectionalResult:
    c: float
    spread: float
    model_residual: float
    samples: int
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def constant_phi_sectional_check(
    spec: ManifoldSpec, points, directions: int = 8, tol: float = DEFAULT_TOL, seed: int = 0,
    require_valid: bool = True,
):
    """Estimate c from K(X, phi X) on ker(eta) and test the model tensor with it."""
    points = list(points)
    _require_structure(spec, points, tol, require_valid)
    rng = np.random.default_rng(seed)
    ks = []
    for p in points:
        ls = local_structure(spec, p)
        phi = J.value(ls.phi)
        for x in kernel_eta_vectors(ls, rng, directions):
            ks.append(ls.geo.sectional(x, phi @ x))
    ks = np.array(ks)
    c = float(ks.mean())
    spread = float(np.max(np.abs(ks - c)))
    model = 0.0
    for p in points:
        ls = local_structure(spec, p)
        diff = ls.geo.riemann.value - phi_sectional_model(ls, c)
        model = max(model, _fnorm(ls.geo, diff, (UP, DOWN, DOWN, DOWN)))
    return PhiSectionalResult(
        c,
        spread,
        model,
        len(ks),
        [
            check("phi_sectional.constant", spread, tol, f"c = {c:.12g}"),
            check("phi_sectional.model", model, tol),
        ],
    )


# --- conformal curvature ------------------------------------------------------


@dataclass
class ConformalResult:
    xi_flat: float
    phi_flat: float
    conformally_flat: float
    entries: list = field(default_factory=list)


def conformal_flatness_check(spec: ManifoldSpec, points, tol: float = DEFAULT_TOL):
    """Max frame norm of C(X,Y)xi, phi^2 C(phiX, phiY)phiZ and C itself.

    The two projections need a structure block; without one they are skipped.
    """
    xi_r = phi_r = full = 0.0
    for p in points:
        geo = _geo(spec, p)
        C = geo.weyl.value
        full = max(full, _fnorm(geo, C, (UP, DOWN, DOWN, DOWN)))
        if spec.structure is None:
            continue
        ls = local_structure(spec, p)
        xi, phi = J.value(ls.xi), J.value(ls.phi)
        xi_r = max(xi_r, _fnorm(geo, np.einsum("lkij,k->lij", C, xi), (UP, DOWN, DOWN)))
        proj = np.einsum("zkxy,kc,xa,yb->zcab", C, phi, phi, phi)
        proj = np.einsum("lm,ms,szab->lzab", phi, phi, proj)
        phi_r = max(phi_r, _fnorm(geo, proj, (UP, DOWN, DOWN, DOWN)))
    entries = [check("conformal.flat", full, tol)]
    if spec.structure is None:
        entries += [
            skipped("conformal.xi_flat", "no structure block"),
            skipped("conformal.phi_flat", "no structure block"),
        ]
    else:
        entries = [check("conformal.xi_flat", xi_r, tol), check("conformal.phi_flat", phi_r, tol)] + entries
    return ConformalResult(xi_r, phi_r, full, entries)


# --- scalar curvature gradient --------------------------------------------------


@dataclass
class ScalarGradientResult:
    gradient_residual: float  # |Dr - eps xi(r) xi|
    soliton_gap: float  # |xi(r) + 2(r + eps 2n(2n+1))|
    scalar_range: tuple
    entries: list = field(default_factory=list)


def scalar_gradient_check(spec: ManifoldSpec, points, tol: float = DEFAULT_TOL):
    points = list(points)
    if spec.structure is None:
        raise MissingStructure(f"{spec.name}: no structure block")
    eps, n = spec.epsilon, spec.n
    res = gap = 0.0
    rs = []
    for p in points:
        ls = local_structure(spec, p)
        geo = ls.geo
        xi = J.value(ls.xi)
        dr = geo.scalar.grad().value
        Dr = geo.scalar_gradient.value
        xir = float(dr @ xi)
        r = float(geo.scalar.value)
        rs.append(r)
        res = max(res, _fnorm(geo, Dr - eps * xir * xi, (UP,)))
        gap = max(gap, abs(xir + 2 * (r + eps * 2 * n * (2 * n + 1))))
    out = ScalarGradientResult(res, gap, (min(rs), max(rs)))
    out.entries = [
        info("scalar.gradient_along_xi", res, "Dr - eps xi(r) xi"),
        info("scalar.xi_r_soliton_gap", gap, "xi(r) + 2(r + eps 2n(2n+1))"),
    ]
    return out


# --- phi-symmetry -----------------------------------------------------------------


def phi_symmetry_residual(spec: ManifoldSpec, point, X, Y, Z, W) -> np.ndarray:
    """phi^2 (nabla_W R)(X, Y) Z as a coordinate vector."""
    ls = local_structure(spec, point)
    phi = J.value(ls.phi)
    nR = ls.geo.nabla_riemann.value
    a = [np.asarray(v, dtype=float) for v in (W, X, Y, Z)]
    vec = np.einsum("mlkij,m,i,j,k->l", nR, a[0], a[1], a[2], a[3])
    return phi @ phi @ vec


def phi_symmetry_norm(spec: ManifoldSpec, points) -> float:
    worst = 0.0
    for p in points:
        ls = local_structure(spec, p)
        phi = J.value(ls.phi)
        t = np.einsum("ab,bc,mckij->makij", phi, phi, ls.geo.nabla_riemann.value)
        worst = max(worst, _fnorm(ls.geo, t, (DOWN, UP, DOWN, DOWN, DOWN)))
    return worst


# --- Ricci solitons -----------------------------------------------------------------


def _soliton_block(spec: ManifoldSpec, sol: Optional[SolitonBlock]) -> SolitonBlock:
    sol = sol if sol is not None else spec.soliton
    if sol is None:
        raise MissingStructure("no soliton block")
    return sol


def _soliton_parts(spec, p, V):
    """Frame components of (L_V g + 2 Ric) and of g."""
    geo = _geo(spec, p)
    E = geo.frame.vectors
    A = geo.lie_metric(geo.field(V)).value + 2 * geo.ricci.value
    return geo, E.T @ A @ E, E.T @ geo.metric.g @ E


def soliton_residual(spec: ManifoldSpec, points, sol: Optional[SolitonBlock] = None, lam=None) -> float:
    """Max frame norm of L_V g + 2 Ric + 2 lambda g over ``points``."""
    sol = _soliton_block(spec, sol)
    if lam is None:
        lam = spec.with_soliton(sol).lam_value()
    worst = 0.0
    for p in points:
        _, A, G = _soliton_parts(spec, p, sol.V)
        worst = max(worst, float(np.max(np.abs(A + 2 * lam * G))))
    return worst


def soliton_eta_coefficient(spec: ManifoldSpec, points, V=None) -> float:
    """Largest |b| over points when L_V g + 2 Ric is fitted as a g + b eta(x)eta.

    lambda only shifts a, so b != 0 rules out a soliton for every lambda.
    """
    if V is None:
        V = _soliton_block(spec, None).V
    if spec.structure is None:
        raise MissingStructure(f"{spec.name}: no structure block")
    worst = 0.0
    for p in points:
        geo, A, G = _soliton_parts(spec, p, V)
        eta = J.value(local_structure(spec, p).eta) @ geo.frame.vectors
        basis = np.stack([G.ravel(), np.outer(eta, eta).ravel()], axis=1)
        (_, b), *_ = np.linalg.lstsq(basis, A.ravel(), rcond=None)
        worst = max(worst, abs(float(b)))
    return worst


@dataclass
class LambdaSolve:
    lam: float
    residual: float
    target: float  # 2 n eps
    eta_lie_xi_gap: Optional[float]  # max |eta(L_V xi) - (lam - 2n eps)|
    entries: list = field(default_factory=list)


def soliton_solve_lambda(
    spec: ManifoldSpec, points, V=None, tol: float = DEFAULT_TOL
) -> LambdaSolve:
    """Least-squares lambda over all points: -sum<A, G> / (2 sum<G, G>)."""
    points = list(points)
    if V is None:
        V = _soliton_block(spec, None).V
    parts = [_soliton_parts(spec, p, V) for p in points]
    num = sum(float(np.sum(A * G)) for _, A, G in parts)
    den = sum(float(np.sum(G * G)) for _, A, G in parts)
    lam = -num / (2 * den)
    resid = max(float(np.max(np.abs(A + 2 * lam * G))) for _, A, G in parts)
    target = 2 * spec.n * spec.epsilon
    gap = None
    if spec.structure is not None:
        gap = 0.0
        for p in points:
            ls = local_structure(spec, p)
            lie_xi = ls.geo.lie(ls.geo.field(V), ls.xi, (UP,)).value
            gap = max(gap, abs(float(J.value(ls.eta) @ lie_xi) - (lam - target)))
    out = LambdaSolve(lam, resid, target, gap)
    out.entries = [
        check("soliton.residual_at_solved_lambda", resid, tol, f"lambda* = {lam:.12g}"),
        info("soliton.lambda_gap", abs(lam - target), "|lambda* - 2n eps|"),
    ]
    if gap is not None:
        out.entries.append(info("soliton.eta_lie_xi_gap", gap, "eta(L_V xi) - (lambda* - 2n eps)"))
    return out


# --- Lie derivative of curvature ------------------------------------------------------


@dataclass
class LieCurvatureResult:
    route_gap: float  # connection route vs tensor route for L_V R
    curvature_on_xi: float  # (L_V R)(X,Y)xi against its Ricci-operator form
    curvature_xi_xi: float  # (L_V R)(X,xi)xi
    ricci_on_xi: float  # (L_V Ric)(X,xi) + X(r) - xi(r)eta(X)
    entries: list = field(default_factory=list)


def lie_curvature_check(
    spec: ManifoldSpec, points, sol: Optional[SolitonBlock] = None, tol: float = DEFAULT_TOL,
    assert_identities: bool = True,
) -> LieCurvatureResult:
    """L_V R by two routes plus the soliton identities for L_V R and L_V Ric.

    The identities only follow when (g, V) is a soliton on a Kenmotsu
    manifold; pass ``assert_identities=False`` to report them as info.
    """
    sol = _soliton_block(spec, sol)
    if spec.structure is None:
        raise MissingStructure(f"{spec.name}: no structure block")
    eps, n = spec.epsilon, spec.n
    route = on_xi = xi_xi = ric_xi = 0.0
    for p in points:
        ls = local_structure(spec, p)
        geo = ls.geo
        d = geo.dim
        dl = np.eye(d)
        V = geo.field(sol.V)
        LR = geo.lie_riemann(V).value
        LR_tensor = geo.lie(V, geo.riemann, (UP, DOWN, DOWN, DOWN)).value
        route = max(route, _fnorm(geo, LR - LR_tensor, (UP, DOWN, DOWN, DOWN)))

        xi, eta = J.value(ls.xi), J.value(ls.eta)
        Q = geo.ricci_op.value
        nQ = geo.nabla_ricci_op.value  # [m, a, b]
        lhs = np.einsum("lkij,k->lij", LR, xi)
        S = Q + 2 * n * eps * dl
        rhs = (
            2 * np.einsum("i,lj->lij", eta, S)
            - 2 * np.einsum("j,li->lij", eta, S)
            + 2 * (np.einsum("ilj->lij", nQ) - np.einsum("jli->lij", nQ))
        )
        on_xi = max(on_xi, _fnorm(geo, lhs - rhs, (UP, DOWN, DOWN)))
        xi_xi = max(xi_xi, _fnorm(geo, np.einsum("lij,j->li", lhs, xi), (UP, DOWN)))

        Lric = geo.lie(V, geo.ricci, (DOWN, DOWN)).value
        dr = geo.scalar.grad().value
        ric_res = Lric @ xi + dr - float(dr @ xi) * eta
        ric_xi = max(ric_xi, _fnorm(geo, ric_res, (DOWN,)))
    mk = check if assert_identities else (lambda name, r, t, note="": info(name, r, note))
    return LieCurvatureResult(
        route,
        on_xi,
        xi_xi,
        ric_xi,
        [
            check("lie_curvature.route_agreement", route, tol, "connection route vs tensor route"),
            mk("lie_curvature.on_xi", on_xi, tol),
            mk("lie_curvature.xi_xi", xi_xi, tol),
            mk("lie_curvature.ricci_on_xi", ric_xi, tol),
        ],
    )


# --- dimension three ---------------------------------------------------------------------


@dataclass
class Dim3Result:
    reconstruction: float
    ricci_operator: Optional[float]
    entries: list = field(default_factory=list)


def dim3_reconstruction(geo: LocalGeometry) -> np.ndarray:
    """R rebuilt from Q, Ric, g and r, layout [l, k, i, j]."""
    g, Q, ric, r = geo.g.value, geo.ricci_op.value, geo.ricci.value, float(geo.scalar.value)
    dl = np.eye(3)
    return (
        np.einsum("jk,li->lkij", g, Q)
        - np.einsum("ik,lj->lkij", g, Q)
        + np.einsum("jk,li->lkij", ric, dl)
        - np.einsum("ik,lj->lkij", ric, dl)
        - 0.5 * r * _g_wedge(g)
    )


def dim3_reconstruction_check(spec: ManifoldSpec, points, tol: float = DEFAULT_TOL, kenmotsu: bool = False):
    """Compare R with its Ricci reconstruction; on Kenmotsu 3-manifolds also
    Q = (r/2 + eps) I - (r/2 + 3 eps) eta(x)xi."""
    if spec.dim != 3:
        raise ValueError("the Ricci reconstruction of curvature needs dimension 3")
    eps = spec.epsilon
    rec = 0.0
    qres = 0.0 if kenmotsu else None
    for p in points:
        geo = _geo(spec, p)
        rec = max(rec, _fnorm(geo, geo.riemann.value - dim3_reconstruction(geo), (UP, DOWN, DOWN, DOWN)))
        if kenmotsu:
            ls = local_structure(spec, p)
            r = float(geo.scalar.value)
            model = (r / 2 + eps) * np.eye(3) - (r / 2 + 3 * eps) * np.outer(J.value(ls.xi), J.value(ls.eta))
            qres = max(qres, _fnorm(geo, geo.ricci_op.value - model, (UP, DOWN)))
    entries = [check("dim3.reconstruction", rec, tol)]
    if kenmotsu:
        entries.append(check("dim3.ricci_operator", qres, tol))
    return Dim3Result(rec, qres, entries)


# --- space forms -----------------------------------------------------------------------


@dataclass
class SpaceFormResult:
    kappa: float
    spread: float
    model_residual: float
    samples: int
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def random_planes(geo: LocalGeometry, rng, count: int, tol: float = PLANE_SAMPLE_TOL):
    """``count`` random nondegenerate planes as (X, Y, K(X, Y))."""
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count + 100:
            raise RuntimeError("could not sample nondegenerate planes")
        x, y = random_vectors(geo, rng, 2)
        try:
            out.append((x, y, geo.sectional(x, y, tol)))
        except DegeneratePlane:
            continue
    return out


def space_form_check(spec: ManifoldSpec, points, directions: int = 8, tol: float = DEFAULT_TOL, seed: int = 0):
    """Fit kappa from sectional curvatures and test R = kappa (g(Y,Z)X - g(X,Z)Y)."""
    points = list(points)
    rng = np.random.default_rng(seed)
    ks = []
    for p in points:
        ks += [k for _, _, k in random_planes(_geo(spec, p), rng, directions)]
    ks = np.array(ks)
    kappa = float(ks.mean())
    spread = float(np.max(np.abs(ks - kappa)))
    model = 0.0
    for p in points:
        geo = _geo(spec, p)
        diff = geo.riemann.value - kappa * _g_wedge(geo.g.value)
        model = max(model, _fnorm(geo, diff, (UP, DOWN, DOWN, DOWN)))
    return SpaceFormResult(
        kappa,
        spread,
        model,
        len(ks),
        [
            check("space_form.sectional", spread, tol, f"kappa = {kappa:.12g}"),
            check("space_form.model", model, tol),
        ],
    )


# --- aggregate -----------------------------------------------------------------------------


def _implication(name, hypothesis: bool, residual, tol, why: str) -> CheckEntry:
    if not hypothesis:
        return skipped(name, f"hypothesis not met: {why}")
    return check(name, residual, tol, why)


def classify(
    spec: ManifoldSpec,
    points: Sequence,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    directions: int = 8,
    engine: str = "",
    digest: str = "",
) -> Report:
    """Run every diagnostic that applies to ``spec`` and collect the verdicts."""
    points = [tuple(float(x) for x in p) for p in points]
    eps, n, d = spec.epsilon, spec.n, spec.dim
    entries: list = []
    consts: dict = {}

    sf = space_form_check(spec, points, directions, tol, seed)
    entries += sf.entries
    consts["kappa"] = sf.kappa
    conf = conformal_flatness_check(spec, points, tol)
    entries += conf.entries
    r_vals = [float(_geo(spec, p).scalar.value) for p in points]
    consts["scalar_curvature_min"] = min(r_vals)
    consts["scalar_curvature_max"] = max(r_vals)
    if d == 3:
        dim3 = dim3_reconstruction_check(spec, points, tol)
        entries.append(check("consistency.dim3_reconstruction", dim3.reconstruction, tol))

    valid = False
    kenmotsu = False
    if spec.structure is None:
        entries.append(skipped("structure", "no structure block"))
    else:
        sv = validate_structure(spec, points, tol)
        entries += sv
        valid = all(e.passed for e in sv)
        if not valid:
            entries.append(skipped("classification", "almost contact axioms fail"))
        else:
            kc = kenmotsu_checks(spec, points, tol)
            entries += kc
            kenmotsu = all(e.passed for e in kc if e.name in ("kenmotsu.condition", "kenmotsu.normality"))

    if valid:
        ee = eta_einstein_fit(spec, points, tol)
        entries += ee.entries
        consts.update(a=ee.a, b=ee.b, a_closed=ee.a_closed, b_closed=ee.b_closed)
        ee_pass = ee.passed

        ps = constant_phi_sectional_check(spec, points, directions, tol, seed)
        entries += ps.entries
        consts["c"] = ps.c

        sym = phi_symmetry_norm(spec, points)
        entries.append(check("phi_symmetric", sym, tol))

        sg = scalar_gradient_check(spec, points, tol)
        entries += sg.entries

        xi_flat = conf.xi_flat < tol
        phi_flat = conf.phi_flat < tol
        r_target = -eps * 2 * n * (2 * n + 1)
        max_r_gap = max(abs(r - r_target) for r in r_vals)
        ck = "Kenmotsu"
        entries += [
            _implication(
                "consistency.eta_einstein_constraint", kenmotsu and ee_pass, ee.constraint_gap, tol,
                "eta-Einstein Kenmotsu has eps a + b = -2n",
            ),
            _implication(
                "consistency.xi_flat_iff_eta_einstein", kenmotsu, float(xi_flat != ee_pass), 0.5,
                f"{ck}: xi-conformally flat exactly when eta-Einstein",
            ),
            _implication(
                "consistency.scalar_gradient", kenmotsu and ee_pass and d > 3, sg.gradient_residual, tol,
                "eta-Einstein Kenmotsu of dim > 3 has Dr = eps xi(r) xi",
            ),
            _implication(
                "consistency.phi_flat_scalar", kenmotsu and phi_flat and d > 3, max_r_gap, tol,
                "phi-conformally flat Kenmotsu of dim > 3 has r = -eps 2n(2n+1)",
            ),
            _implication(
                "consistency.conformally_flat_space_form",
                kenmotsu and conf.conformally_flat < tol and d > 3, abs(sf.kappa + eps) + sf.model_residual, tol,
                "conformally flat Kenmotsu of dim > 3 has curvature -eps",
            ),
            _implication(
                "consistency.phi_sectional_space_form", kenmotsu and ps.passed,
                max(abs(ps.c + eps), abs(sf.kappa - ps.c)) + sf.model_residual, tol,
                "constant phi-sectional curvature c forces c = kappa = -eps",
            ),
            _implication(
                "consistency.phi_symmetric_space_form", kenmotsu and sym < tol,
                abs(sf.kappa + eps) + sf.model_residual, tol,
                "phi-symmetric Kenmotsu has curvature -eps",
            ),
        ]
        if d == 3:
            entries.append(
                _implication(
                    "consistency.dim3_ricci_operator", kenmotsu,
                    dim3_reconstruction_check(spec, points, tol, kenmotsu=kenmotsu).ricci_operator or 0.0,
                    tol, "Kenmotsu 3-manifold Ricci operator",
                )
            )

    if spec.soliton is not None:
        lam = spec.lam_value()
        sres = soliton_residual(spec, points)
        entries.append(check("soliton.residual", sres, tol, f"lambda = {lam:.12g}"))
        solved = soliton_solve_lambda(spec, points, tol=tol)
        entries += solved.entries
        consts["lambda"] = solved.lam
        is_soliton = sres < tol
        entries.append(
            _implication(
                "consistency.soliton_lambda", kenmotsu and is_soliton, abs(solved.lam - solved.target), tol,
                "Kenmotsu soliton has lambda = 2n eps",
            )
        )
        if d == 3:
            entries.append(
                _implication(
                    "consistency.soliton_space_form", kenmotsu and is_soliton,
                    abs(sf.kappa + eps) + sf.model_residual, tol,
                    "Kenmotsu soliton 3-manifold has curvature -eps",
                )
            )
        if spec.structure is not None and valid:
            lc = lie_curvature_check(spec, points, tol=tol, assert_identities=kenmotsu and is_soliton)
            entries += lc.entries

    return Report(
        command="classify",
        manifold=spec.name,
        digest=digest,
        epsilon=eps,
        n=n,
        seed=seed,
        entries=entries,
        constants=consts,
        points=points,
        engine=engine,
    )


def classification_failed(report: Report) -> bool:
    """A classification fails only when a theorem instance is violated."""
    return any(e.failed for e in report.entries if e.name.startswith("consistency."))
