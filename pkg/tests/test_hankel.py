import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tidt.hankel import (
    HankelConfig,
    check_periodicity_bound,
    check_smoothness_bound,
    hankel_forward,
    hankel_inverse,
    periodicity,
    rank_error,
    smoothness,
    symmetric_pad,
    symmetric_unpad,
)


def test_hankel_forward_matches_display_example():
    m = np.array([1.0, 2.0, 3.0])
    h = hankel_forward(m, HankelConfig(2))
    expected = np.array([[1.0, 2.0], [2.0, 3.0], [3.0, 1.0]]) / math.sqrt(2)
    assert np.allclose(h, expected, atol=1e-15)
    assert abs(np.linalg.norm(h) ** 2 - 14.0) < 1e-12


def test_hankel_forward_k1_is_reshape():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((5, 2, 3))
    h = hankel_forward(x, HankelConfig(1))
    assert h.shape == (5, 1, 2, 3)
    assert np.array_equal(h[:, 0], x)


def test_order_increase_is_one():
    rng = np.random.default_rng(1)
    for shape in [(6,), (6, 2), (6, 2, 3), (6, 2, 2, 2)]:
        x = rng.standard_normal(shape)
        h = hankel_forward(x, HankelConfig(3))
        assert h.ndim == x.ndim + 1
        assert h.shape == (shape[0], 3) + shape[1:]


def test_hankel_face_structure_is_cyclic():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((7, 2, 2))
    h = hankel_forward(x, HankelConfig(4))
    t = 7
    for i in range(t - 1):
        for j in range(1, 4):
            assert np.allclose(h[i + 1, j - 1], h[i, j])
    # wraparound: last row, column j continues from x[(t-1+j) % t]
    for j in range(4):
        assert np.allclose(h[t - 1, j] * math.sqrt(4), x[(t - 1 + j) % t])


def test_k_out_of_range():
    x = np.zeros(4)
    with pytest.raises(ValueError):
        hankel_forward(x, HankelConfig(5))
    hankel_forward(x, HankelConfig(8, "symmetric"))  # padded extent allows up to 2t
    with pytest.raises(ValueError):
        hankel_forward(x, HankelConfig(9, "symmetric"))
    with pytest.raises(ValueError):
        HankelConfig(0)
    with pytest.raises(ValueError):
        HankelConfig(3, "weird")


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 31), order=st.integers(1, 4),
       padding=st.sampled_from(["none", "symmetric"]))
def test_round_trip_identity(seed, order, padding):
    rng = np.random.default_rng(seed)
    t = int(rng.integers(2, 9))
    spatial = tuple(int(rng.integers(1, 4)) for _ in range(order - 1))
    x = rng.standard_normal((t,) + spatial)
    kmax = 2 * t if padding == "symmetric" else t
    k = int(rng.integers(1, kmax + 1))
    cfg = HankelConfig(k, padding)
    back = hankel_inverse(hankel_forward(x, cfg), cfg)
    assert np.abs(back - x).max() < 1e-12 * max(1.0, np.abs(x).max())


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 31))
def test_isometry_distance_preservation(seed):
    rng = np.random.default_rng(seed)
    t = int(rng.integers(2, 10))
    k = int(rng.integers(1, t + 1))
    x = rng.standard_normal((t, 3))
    y = rng.standard_normal((t, 3))
    cfg = HankelConfig(k)
    d_orig = np.linalg.norm(x - y)
    d_emb = np.linalg.norm(hankel_forward(x, cfg) - hankel_forward(y, cfg))
    assert abs(d_orig - d_emb) < 1e-12 * max(1.0, d_orig)


def test_adjoint_inner_product_identity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        t = int(rng.integers(2, 9))
        k = int(rng.integers(1, t + 1))
        cfg = HankelConfig(k)
        x = rng.standard_normal((t, 2, 2))
        z = rng.standard_normal((t, k, 2, 2))
        lhs = np.vdot(hankel_forward(x, cfg), z)
        rhs = np.vdot(x, hankel_inverse(z, cfg))
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_inverse_zero_and_shape_validation():
    cfg = HankelConfig(3)
    assert np.all(hankel_inverse(np.zeros((5, 3, 2)), cfg) == 0)
    with pytest.raises(ValueError):
        hankel_inverse(np.zeros((5, 4, 2)), cfg)


def test_symmetric_pad_unpad():
    x = np.array([1.0, 2.0, 3.0])
    p = symmetric_pad(x)
    assert np.array_equal(p, [1, 2, 3, 3, 2, 1])
    assert np.array_equal(symmetric_unpad(p), x)
    with pytest.raises(ValueError):
        symmetric_unpad(np.zeros(5))


def test_smoothness_and_periodicity_examples():
    const = np.ones((6, 2))
    assert smoothness(const) == 0.0
    periodic = np.tile(np.array([1.0, -2.0, 0.5]), 4)
    assert periodicity(periodic, 3) == 0.0
    m = np.array([1.0, 2.0, 3.0, 4.0])
    assert abs(smoothness(m) - math.sqrt(12)) < 1e-12
    with pytest.raises(ValueError):
        periodicity(m, 5)
    with pytest.raises(ValueError):
        periodicity(m, 0)


def test_rank_error_edges():
    rng = np.random.default_rng(4)
    m = rng.standard_normal(6)
    h = hankel_forward(m, HankelConfig(4))
    assert rank_error(h, 4) < 1e-12
    assert abs(rank_error(h, 0) - np.linalg.norm(h)) < 1e-12
    const = hankel_forward(np.ones(6), HankelConfig(4))
    assert rank_error(const, 1) < 1e-12
    with pytest.raises(ValueError):
        rank_error(h, 5)
    with pytest.raises(ValueError):
        rank_error(h, -1)


def test_bound_checks_trivial_cases():
    const = np.ones(8)
    chk = check_smoothness_bound(const, 4, 1)
    assert chk.holds and chk.lhs < 1e-12 and chk.rhs < 1e-12
    periodic = np.tile(np.array([2.0, -1.0]), 6)  # period 2 divides t=12 and k=4
    chk = check_periodicity_bound(periodic, 4, 2)
    assert chk.holds and chk.lhs < 1e-10 and chk.rhs < 1e-10


def test_bound_checks_randomized_smoke():
    rng = np.random.default_rng(5)
    for _ in range(25):
        m = np.cumsum(rng.normal(scale=0.1, size=32))
        for r in (1, 2, 4):
            assert check_smoothness_bound(m, 16, r).holds
        tau = 4
        base = np.tile(rng.standard_normal(tau), 8)
        m = base + rng.normal(scale=0.01, size=32)
        assert check_periodicity_bound(m, 16, tau).holds


def test_bound_checks_tensor_variants():
    rng = np.random.default_rng(6)
    m = np.cumsum(rng.normal(scale=0.1, size=(24, 3, 2)), axis=0)
    for r in (1, 2, 3):
        assert check_smoothness_bound(m, 12, r).holds
    base = np.tile(rng.standard_normal((4, 3, 2)), (6, 1, 1))
    m = base + rng.normal(scale=0.01, size=base.shape)
    assert check_periodicity_bound(m, 12, 4).holds
