import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kenmotsu import builtin
from kenmotsu.classifier import (
    classification_failed,
    classify,
    conformal_flatness_check,
    constant_phi_sectional_check,
    dim3_reconstruction_check,
    eta_einstein_fit,
    lie_curvature_check,
    phi_sectional_model,
    phi_symmetry_norm,
    phi_symmetry_residual,
    scalar_gradient_check,
    soliton_residual,
    soliton_solve_lambda,
    space_form_check,
)
from kenmotsu.contact import kernel_eta_vectors, local_structure
from kenmotsu.manifold import ManifoldSpec, SolitonBlock
from oracle import random_metric_entries

EPS = [1.0, -1.0]


def pts(spec):
    return spec.sample_points()


def entries(result):
    return {e.name: e for e in result.entries}


# --- eta-Einstein ------------------------------------------------------------


@pytest.mark.parametrize("eps", EPS)
def test_eta_einstein_kenmotsu3(eps):
    spec = builtin("kenmotsu3", eps)
    fit = eta_einstein_fit(spec, pts(spec))
    assert fit.a == pytest.approx(-2 * eps, abs=1e-10)
    assert fit.b == pytest.approx(0.0, abs=1e-10)
    assert eps * fit.a + fit.b == pytest.approx(-2.0, abs=1e-10)
    assert fit.a_closed == pytest.approx(-2 * eps, abs=1e-10)
    e = entries(fit)
    assert e["eta_einstein.fit"].passed and e["einstein"].passed


@pytest.mark.parametrize("eps", EPS)
def test_eta_einstein_warped3_not_einstein(eps):
    spec = builtin("warped3", eps)
    fit = eta_einstein_fit(spec, pts(spec))
    e = entries(fit)
    assert e["eta_einstein.fit"].passed
    assert not e["einstein"].passed
    # the coefficients vary from point to point
    assert fit.a_spread > 0.1
    assert fit.constraint_gap < 1e-9


def test_eta_einstein_flat_with_dummy_structure():
    spec = builtin("flat3").with_structure(builtin("kenmotsu3").structure)
    fit = eta_einstein_fit(spec, pts(spec))
    assert fit.a == pytest.approx(0.0, abs=1e-14)
    assert fit.b == pytest.approx(0.0, abs=1e-14)
    assert fit.fit_residual < 1e-14
    assert fit.constraint_gap == pytest.approx(2.0)
    assert not entries(fit)["eta_einstein.fit"].passed


# --- phi-sectional curvature ---------------------------------------------------


@pytest.mark.parametrize("name", ["kenmotsu3", "kenmotsu5"])
@pytest.mark.parametrize("eps", EPS)
def test_constant_phi_sectional(name, eps):
    spec = builtin(name, eps)
    res = constant_phi_sectional_check(spec, pts(spec))
    assert res.c == pytest.approx(-eps, abs=1e-9)
    assert res.model_residual < 1e-9
    assert res.passed


def test_phi_sectional_warped3_fails():
    spec = builtin("warped3")
    res = constant_phi_sectional_check(spec, pts(spec))
    assert not res.passed


@settings(max_examples=30)
@given(st.floats(-5, 5), st.sampled_from(EPS), st.integers(0, 1000))
def test_model_tensor_reproduces_c(c, eps, seed):
    spec = builtin("warped3", eps)
    ls = local_structure(spec, (0.3, -0.2, 0.1))
    M = phi_sectional_model(ls, c)
    g = ls.geo.metric.g
    phi = ls.phi.value
    Ml = np.einsum("wl,lkij->ijkw", g, M)
    for x in kernel_eta_vectors(ls, np.random.default_rng(seed), 3):
        y = phi @ x
        den = (x @ g @ x) * (y @ g @ y) - (x @ g @ y) ** 2
        K = np.einsum("ijkw,i,j,k,w->", Ml, x, y, y, x) / den
        assert K == pytest.approx(c, abs=1e-9 * (1 + abs(c)))
    # algebraic curvature tensor symmetries
    assert np.allclose(Ml, -Ml.transpose(1, 0, 2, 3), atol=1e-12)
    assert np.allclose(Ml, Ml.transpose(2, 3, 0, 1), atol=1e-12)


def test_model_tensor_at_minus_eps_is_space_form():
    for eps in EPS:
        ls = local_structure(builtin("warped3", eps), (0.1, 0.2, 0.3))
        g = ls.geo.metric.g
        d = np.eye(3)
        cc = -eps * (np.einsum("jk,li->lkij", g, d) - np.einsum("ik,lj->lkij", g, d))
        assert np.allclose(phi_sectional_model(ls, -eps), cc, atol=1e-12)


# --- conformal flatness and scalar gradient ---------------------------------------


@pytest.mark.parametrize("eps", EPS)
def test_conformal_kenmotsu3_dim3(eps):
    spec = builtin("kenmotsu3", eps)
    res = conformal_flatness_check(spec, pts(spec))
    assert all(e.passed for e in res.entries)


@pytest.mark.parametrize("eps", EPS)
def test_conformal_kenmotsu5(eps):
    spec = builtin("kenmotsu5", eps)
    res = conformal_flatness_check(spec, pts(spec))
    assert all(e.passed for e in res.entries)
    fit = eta_einstein_fit(spec, pts(spec))
    # xi-flat and eta-Einstein hold together
    assert res.xi_flat < 1e-9 and fit.passed
    r = [float(local_structure(spec, p).geo.scalar.value) for p in pts(spec)]
    assert np.allclose(r, -20 * eps, atol=1e-9)


def test_conformal_without_structure():
    spec = builtin("flat3")
    e = entries(conformal_flatness_check(spec, pts(spec)))
    assert e["conformal.flat"].passed
    assert e["conformal.xi_flat"].verdict == "skipped"


@pytest.mark.parametrize("name, eps", [("kenmotsu5", 1.0), ("kenmotsu5", -1.0), ("kenmotsu3", 1.0), ("kenmotsu3", -1.0)])
def test_scalar_gradient(name, eps):
    spec = builtin(name, eps)
    res = scalar_gradient_check(spec, pts(spec))
    assert res.gradient_residual < 1e-10
    # xi(r) = -2(r + eps 2n(2n+1)) holds with both sides zero
    assert res.soliton_gap < 1e-9


def test_scalar_gradient_reported_only():
    spec = builtin("warped3")
    res = scalar_gradient_check(spec, pts(spec))
    assert all(e.tolerance is None for e in res.entries)


# --- phi-symmetry ----------------------------------------------------------------


@pytest.mark.parametrize("eps", EPS)
def test_phi_symmetric_kenmotsu3(eps):
    spec = builtin("kenmotsu3", eps)
    assert phi_symmetry_norm(spec, pts(spec)) < 1e-8


def test_phi_symmetry_perturbed():
    spec = builtin("perturbed3")
    p = (0.3, -0.2, 0.1)
    rng = np.random.default_rng(1)
    X, Y, Z, W = rng.standard_normal((4, 3))
    assert np.abs(phi_symmetry_residual(spec, p, X, Y, Z, W)).max() > 1e-3
    assert np.allclose(phi_symmetry_residual(spec, p, X, X, Z, W), 0.0, atol=1e-13)


# --- solitons ---------------------------------------------------------------------------


@pytest.mark.parametrize("eps", EPS)
def test_soliton_kenmotsu3(eps):
    spec = builtin("kenmotsu3", eps)
    assert soliton_residual(spec, pts(spec)) < 1e-10
    zero = SolitonBlock(("0", "0", "0"), "2*eps")
    assert soliton_residual(spec, pts(spec), zero) < 1e-10
    solved = soliton_solve_lambda(spec, pts(spec))
    assert solved.lam == pytest.approx(2 * eps, abs=1e-10)
    assert solved.residual < 1e-10
    assert solved.target == 2 * eps
    # eta(L_V xi) = lambda - 2n eps
    assert solved.eta_lie_xi_gap < 1e-10


@pytest.mark.parametrize("eps", EPS)
def test_soliton_lambda_independent_of_alpha(eps):
    spec = builtin("kenmotsu3", eps)
    a = soliton_solve_lambda(spec, pts(spec)).lam
    b = soliton_solve_lambda(spec.with_params(alpha=0.0), pts(spec)).lam
    c = soliton_solve_lambda(spec, pts(spec), V=("0", "0", "0")).lam
    assert a == pytest.approx(b, abs=1e-12)
    assert a == pytest.approx(c, abs=1e-12)


@pytest.mark.parametrize("eps", EPS)
def test_soliton_kenmotsu5(eps):
    spec = builtin("kenmotsu5", eps)
    solved = soliton_solve_lambda(spec, pts(spec))
    assert solved.lam == pytest.approx(4 * eps, abs=1e-10)
    assert solved.residual < 1e-10


@pytest.mark.parametrize("eps", EPS)
def test_soliton_xi_cannot_hold(eps):
    spec = builtin("kenmotsu3", eps)
    xi = SolitonBlock(("0", "0", "1"), "0")
    for lam in np.linspace(-6, 6, 25):
        assert soliton_residual(spec, pts(spec), xi, lam=lam) >= 1.0 - 1e-12
    solved = soliton_solve_lambda(spec, pts(spec), V=xi.V)
    # minimiser balances the xi-xi entry against the ker(eta) entries
    assert solved.lam == pytest.approx(4 / 3 if eps > 0 else -8 / 3, abs=1e-10)
    assert solved.residual == pytest.approx(4 / 3, abs=1e-10)
    assert not entries(solved)["soliton.residual_at_solved_lambda"].passed


@pytest.mark.parametrize("eps", EPS)
def test_lie_curvature_killing(eps):
    spec = builtin("kenmotsu3", eps)
    res = lie_curvature_check(spec, pts(spec))
    assert all(e.passed for e in res.entries)
    zero = lie_curvature_check(spec, pts(spec), SolitonBlock(("0", "0", "0"), "2*eps"))
    assert max(e.residual for e in zero.entries) < 1e-12


def test_lie_curvature_routes_agree_off_soliton():
    spec = builtin("warped3").with_soliton(SolitonBlock(("x*y", "z^2", "sin(x)"), "1"))
    res = lie_curvature_check(spec, pts(spec), assert_identities=False)
    e = entries(res)
    assert e["lie_curvature.route_agreement"].passed
    assert e["lie_curvature.on_xi"].tolerance is None


# --- dimension three and space forms -------------------------------------------------


@pytest.mark.parametrize("eps", EPS)
def test_dim3_kenmotsu3(eps):
    spec = builtin("kenmotsu3", eps)
    res = dim3_reconstruction_check(spec, pts(spec), kenmotsu=True)
    assert res.reconstruction < 1e-9
    assert res.ricci_operator < 1e-9


@pytest.mark.parametrize("eps", EPS)
def test_dim3_ricci_operator_warped3(eps):
    # not Einstein, so the eta(x)xi coefficient is genuinely exercised
    spec = builtin("warped3", eps)
    res = dim3_reconstruction_check(spec, pts(spec), kenmotsu=True)
    assert res.ricci_operator < 1e-9


def test_dim3_flat():
    spec = builtin("flat3")
    assert dim3_reconstruction_check(spec, pts(spec)).reconstruction == 0.0


def test_dim3_rejects_other_dimensions():
    with pytest.raises(ValueError):
        dim3_reconstruction_check(builtin("kenmotsu5"), [(0.0,) * 5])


@settings(max_examples=20)
@given(st.integers(0, 100_000), st.sampled_from([(1, 1, 1), (1, -1, 1), (-1, 1, -1)]))
def test_dim3_reconstruction_random_metrics(seed, signs):
    rng = np.random.default_rng(seed)
    coords, g = random_metric_entries(rng, 3, list(signs), ["x", "y", "z"])
    spec = ManifoldSpec(name="random3", coords=tuple(coords), epsilon=1.0, metric=g)
    p = tuple(rng.uniform(-0.4, 0.4, 3))
    assert dim3_reconstruction_check(spec, [p]).reconstruction < 1e-9


@pytest.mark.parametrize("name, eps, kappa", [
    ("kenmotsu3", 1.0, -1.0), ("kenmotsu3", -1.0, 1.0), ("kenmotsu5", 1.0, -1.0),
    ("kenmotsu5", -1.0, 1.0), ("flat3", 1.0, 0.0),
])
def test_space_form(name, eps, kappa):
    spec = builtin(name, eps)
    res = space_form_check(spec, pts(spec), directions=10)
    assert res.kappa == pytest.approx(kappa, abs=1e-9)
    assert res.model_residual < 1e-9
    assert res.passed


def test_space_form_fails_on_warped3():
    spec = builtin("warped3")
    assert not space_form_check(spec, pts(spec)).passed


def test_space_form_is_seeded():
    spec = builtin("warped3")
    a = space_form_check(spec, pts(spec), seed=3)
    b = space_form_check(spec, pts(spec), seed=3)
    assert a.kappa == b.kappa and a.spread == b.spread


# --- classify --------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["kenmotsu3", "kenmotsu5"])
@pytest.mark.parametrize("eps", EPS)
def test_classify_kenmotsu_space_forms(name, eps):
    spec = builtin(name, eps)
    rep = classify(spec, pts(spec))
    assert not classification_failed(rep)
    n = spec.n
    c = rep.constants
    assert c["kappa"] == pytest.approx(-eps, abs=1e-9)
    assert c["c"] == pytest.approx(-eps, abs=1e-9)
    assert c["a"] == pytest.approx(-2 * n * eps, abs=1e-9)
    assert c["b"] == pytest.approx(0.0, abs=1e-9)
    assert c["lambda"] == pytest.approx(2 * n * eps, abs=1e-9)
    ran = [e for e in rep.entries if e.name.startswith("consistency.") and e.verdict != "skipped"]
    assert len(ran) >= 4
    for name_ in ("einstein", "space_form.sectional", "phi_symmetric", "soliton.residual"):
        assert rep.entry(name_).passed


def test_classify_warped3():
    spec = builtin("warped3")
    rep = classify(spec, pts(spec))
    assert not classification_failed(rep)
    assert rep.entry("eta_einstein.fit").passed
    assert not rep.entry("einstein").passed
    assert not rep.entry("space_form.sectional").passed
    assert rep.entry("consistency.dim3_ricci_operator").passed


def test_classify_perturbed3_and_flat3():
    rep = classify(builtin("perturbed3"), pts(builtin("perturbed3")))
    assert not classification_failed(rep)
    assert rep.entry("classification").verdict == "skipped"
    rep = classify(builtin("flat3"), pts(builtin("flat3")))
    assert rep.constants["kappa"] == 0.0
    assert rep.entry("structure").verdict == "skipped"


def test_classification_failed_only_on_consistency():
    spec = builtin("kenmotsu3")
    rep = classify(spec, pts(spec))
    assert not classification_failed(rep)
    from kenmotsu.report import check

    rep.entries.append(check("einstein.extra", 1.0, 1e-8))
    assert not classification_failed(rep)
    rep.entries.append(check("consistency.fake", 1.0, 1e-8))
    assert classification_failed(rep)
