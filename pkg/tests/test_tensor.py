import numpy as np
import pytest
from hypothesis import given, strategies as st

from kenmotsu.tensor import (
    DOWN,
    UP,
    DegenerateMetric,
    FrameFailure,
    InvalidSlots,
    MetricAtPoint,
    TensorValue,
    build_frame,
    contract,
    frame_components,
    invert_metric,
)


def random_metric(rng, d):
    """Random nondegenerate symmetric matrix with a random signature."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eig = rng.uniform(0.3, 3.0, d) * rng.choice([-1.0, 1.0], d)
    return q @ np.diag(eig) @ q.T, int(np.sum(eig < 0))


def test_identity_metric():
    m = invert_metric(np.eye(3))
    assert np.allclose(m.g_inv, np.eye(3))
    assert m.signature == (3, 0)


def test_lorentzian_example_metric():
    m = invert_metric(np.diag([1.0, 1.0, -1.0]))
    assert np.allclose(m.g_inv, np.diag([1.0, 1.0, -1.0]))
    assert m.signature == (2, 1)


@pytest.mark.parametrize("g", [np.zeros((3, 3)), np.diag([1.0, 1.0, 0.0]), np.diag([1.0, 1e-14, 1.0])])
def test_degenerate(g):
    with pytest.raises(DegenerateMetric):
        invert_metric(g)


def test_asymmetric_rejected():
    with pytest.raises(ValueError):
        invert_metric(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_random_metrics(rng):
    for _ in range(200):
        d = int(rng.integers(2, 8))
        g, neg = random_metric(rng, d)
        m = invert_metric(g)
        assert np.allclose(g @ m.g_inv, np.eye(d), atol=1e-9)
        assert m.signature == (d - neg, neg)
        f = build_frame(m)
        gram = f.vectors.T @ g @ f.vectors
        assert np.allclose(gram, np.diag(f.signs), atol=1e-10)
        assert sum(s < 0 for s in f.signs) == neg


def test_frame_example_hint():
    f = build_frame(invert_metric(np.eye(3)), hint=[0, 0, 1])
    assert np.allclose(f.vectors[:, 0], [0, 0, 1])
    assert np.allclose(f.vectors[:, 1], [1, 0, 0])
    assert np.allclose(f.vectors[:, 2], [0, 1, 0])
    assert f.signs == (1, 1, 1)


def test_frame_timelike_hint():
    f = build_frame(invert_metric(np.diag([1.0, 1.0, -1.0])), hint=[0, 0, 1])
    assert f.signs == (-1, 1, 1)
    assert np.allclose(f.vectors[:, 0], [0, 0, 1])


def test_minkowski_one_negative():
    f = build_frame(invert_metric(np.diag([-1.0, 1.0, 1.0, 1.0])))
    assert sorted(f.signs) == [-1, 1, 1, 1]


def test_null_coordinate_basis():
    # both coordinate vectors are light-like; the pool falls back to e1 +- e2
    g = np.array([[0.0, 1.0], [1.0, 0.0]])
    f = build_frame(invert_metric(g))
    assert np.allclose(f.vectors.T @ g @ f.vectors, np.diag(f.signs))
    assert sorted(f.signs) == [-1, 1]


def test_null_hint_is_skipped():
    g = np.diag([1.0, -1.0, 1.0])
    f = build_frame(invert_metric(g), hint=[1.0, 1.0, 0.0])
    assert np.allclose(f.vectors.T @ g @ f.vectors, np.diag(f.signs))


def test_frame_failure_on_degenerate_input():
    bad = MetricAtPoint(np.zeros((2, 2)), np.zeros((2, 2)), 0.0, (0, 0))
    with pytest.raises(FrameFailure):
        build_frame(bad)


variances = st.lists(st.sampled_from([UP, DOWN]), min_size=1, max_size=4)


@given(variances, st.integers(0, 10_000))
def test_raise_lower_roundtrip(var, seed):
    rng = np.random.default_rng(seed)
    d = 3
    g, _ = random_metric(rng, d)
    m = invert_metric(g)
    t = TensorValue(rng.standard_normal((d,) * len(var)), var)
    for slot, v in enumerate(var):
        back = t.lower(slot, m).raise_(slot, m) if v == UP else t.raise_(slot, m).lower(slot, m)
        assert np.allclose(back.components, t.components, atol=1e-11 * (1 + np.abs(t.components).max()) * 50)


def test_lower_already_lower():
    m = invert_metric(np.eye(2))
    with pytest.raises(InvalidSlots):
        TensorValue(np.ones(2), (DOWN,)).lower(0, m)


def test_contract_trace_of_identity():
    m = invert_metric(np.diag([2.0, 3.0, -1.0]))
    t = TensorValue(m.g, (DOWN, DOWN))
    assert float(contract(t, 0, 1, m).components) == pytest.approx(3.0)


@pytest.mark.parametrize("eps", [1.0, -1.0])
def test_contract_ricci_operator(eps):
    Q = TensorValue(-2 * eps * np.eye(3), (UP, DOWN))
    assert float(contract(Q, 0, 1).components) == pytest.approx(-6 * eps)


def test_contract_rank_one():
    with pytest.raises(InvalidSlots):
        contract(TensorValue(np.ones(3), (UP,)), 0, 1)


@given(st.integers(0, 10_000))
def test_contract_linear(seed):
    rng = np.random.default_rng(seed)
    g, _ = random_metric(rng, 3)
    m = invert_metric(g)
    var = (DOWN, UP, DOWN)
    a = TensorValue(rng.standard_normal((3, 3, 3)), var)
    b = TensorValue(rng.standard_normal((3, 3, 3)), var)
    s, u = rng.standard_normal(2)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        lhs = contract(a * s + b * u, i, j, m).components
        rhs = s * contract(a, i, j, m).components + u * contract(b, i, j, m).components
        assert np.allclose(lhs, rhs, atol=1e-12)


def test_contract_frame_independent(rng):
    """Metric trace equals the eps_a-weighted frame trace."""
    g, _ = random_metric(rng, 4)
    m = invert_metric(g)
    t = rng.standard_normal((4, 4))
    f = build_frame(m)
    ref = sum(s * (f.vectors[:, a] @ t @ f.vectors[:, a]) for a, s in enumerate(f.signs))
    got = float(contract(TensorValue(t, (DOWN, DOWN)), 0, 1, m).components)
    assert got == pytest.approx(ref)


def test_frame_components_metric_is_signs(rng):
    g, _ = random_metric(rng, 5)
    m = invert_metric(g)
    f = build_frame(m)
    assert np.allclose(frame_components(g, (DOWN, DOWN), f), np.diag(f.signs), atol=1e-10)
    assert np.allclose(frame_components(np.eye(5), (UP, DOWN), f), np.eye(5), atol=1e-10)


def test_tensorvalue_validation():
    with pytest.raises(ValueError):
        TensorValue(np.ones((2, 3)), (UP, DOWN))
    with pytest.raises(ValueError):
        TensorValue(np.ones(2), ("x",))
    t = TensorValue(np.ones(2), (UP,))
    with pytest.raises(ValueError):
        t.components[0] = 3.0
