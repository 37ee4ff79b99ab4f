import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detproc.exterior import (
    KVector,
    compound2,
    gram_cross_inner,
    gram_norm_sq,
    inner,
    pair_rank,
    plucker_coords,
    subset_rank,
    validate_combo,
    wedge,
    wedge_columns,
)

finite = st.floats(-2.0, 2.0, allow_nan=False)


def vec(dim):
    return st.lists(finite, min_size=dim, max_size=dim).map(np.array)


def test_validate_combo_rejects_disorder():
    with pytest.raises(ValueError):
        validate_combo((2, 1))
    with pytest.raises(ValueError):
        validate_combo((1, 1))
    with pytest.raises(ValueError):
        validate_combo((0, 1))
    with pytest.raises(ValueError):
        validate_combo((1, 5), n=4)
    assert validate_combo([1, 3], n=4) == (1, 3)


def test_pair_and_subset_rank_agree_with_lex_order():
    import itertools

    for m in (2, 4, 7):
        pairs = list(itertools.combinations(range(1, m + 1), 2))
        for pos, (i, j) in enumerate(pairs):
            assert pair_rank(i, j, m) == pos
    for n, k in ((6, 3), (5, 2), (4, 4)):
        combos = list(itertools.combinations(range(1, n + 1), k))
        for pos, c in enumerate(combos):
            assert subset_rank(c, n) == pos


def test_basis_wedge_and_sign():
    e1 = KVector.basis(3, (1,))
    e2 = KVector.basis(3, (2,))
    assert wedge(e1, e2).coeffs == {(1, 2): 1.0}
    assert wedge(e2, e1).coeffs == {(1, 2): -1.0}
    assert wedge(e1, e1).coeffs == {}


def test_wedge_of_two_vectors_matches_pair_determinants():
    # expected values from the 2x2 determinants x_i y_j - x_j y_i
    a = KVector.from_vector([1, 2, 3, 4])
    b = KVector.from_vector([5, 6, 7, 8])
    got = wedge(a, b).coeffs
    assert got == {
        (1, 2): -4.0, (1, 3): -8.0, (1, 4): -12.0,
        (2, 3): -4.0, (2, 4): -8.0, (3, 4): -4.0,
    }


def test_wedge_dimension_mismatch():
    with pytest.raises(ValueError):
        wedge(KVector.from_vector([1, 0]), KVector.from_vector([1, 0, 0]))


def test_overfull_wedge_is_zero():
    a = KVector.basis(2, (1, 2))
    b = KVector.from_vector([1.0, 1.0])
    assert wedge(a, b).grade == 3
    assert wedge(a, b).coeffs == {}


def test_inner_basic_cases():
    e12 = KVector.basis(3, (1, 2))
    e13 = KVector.basis(3, (1, 3))
    assert inner(e12, e12) == 1.0
    assert inner(e12, e13) == 0.0
    with pytest.raises(ValueError):
        inner(e12, KVector.basis(3, (1,)))


@settings(max_examples=60, deadline=None)
@given(vec(4), vec(4))
def test_two_vector_norm_identity(u, v):
    w = wedge(KVector.from_vector(u), KVector.from_vector(v))
    expected = (u @ u) * (v @ v) - (u @ v) ** 2
    assert w.norm_sq() == pytest.approx(expected, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 3), st.integers(0, 2), st.data())
def test_wedge_antisymmetry(ga, gb, data):
    dim = 5
    combos_a = list(__import__("itertools").combinations(range(1, dim + 1), ga))
    combos_b = list(__import__("itertools").combinations(range(1, dim + 1), gb))
    ca = {c: data.draw(finite) for c in combos_a}
    cb = {c: data.draw(finite) for c in combos_b}
    a = KVector(ga, dim, ca)
    b = KVector(gb, dim, cb)
    ab = wedge(a, b)
    ba = wedge(b, a)
    sign = (-1.0) ** (ga * gb)
    for combo in set(ab.coeffs) | set(ba.coeffs):
        assert ab.coeffs.get(combo, 0.0) == pytest.approx(
            sign * ba.coeffs.get(combo, 0.0), abs=1e-12
        )


def test_wedge_columns_counterexample_frame():
    s = 1 / math.sqrt(2)
    cols = [np.array([s, 0.0]), np.array([0.0, s]), np.array([s, 0.0]), np.array([0.0, s])]
    assert wedge_columns(cols, ()).coeffs == {(): 1.0}
    assert wedge_columns(cols, (1, 3)).norm_sq() == pytest.approx(0.0, abs=1e-15)
    assert wedge_columns(cols, (1, 2)).norm_sq() == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(ValueError):
        wedge_columns(cols, (1, 5))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(1, 3), st.data())
def test_cauchy_binet_gram_vs_expansion(p, k, data):
    n_cols = p + 2
    cols = np.array(
        [[data.draw(finite) for _ in range(p)] for _ in range(n_cols)]
    ).T
    S = tuple(sorted(data.draw(
        st.lists(st.integers(1, n_cols), min_size=k, max_size=k, unique=True)
    )))
    kv = wedge_columns(list(cols.T), S)
    assert kv.norm_sq() == pytest.approx(
        gram_norm_sq(cols[:, [i - 1 for i in S]]), abs=1e-8
    )


def test_gram_cross_inner_matches_expansion():
    rng = np.random.default_rng(5)
    A = rng.standard_normal((5, 3))
    B = rng.standard_normal((5, 3))
    ka = wedge_columns(list(A.T), (1, 2, 3))
    kb = wedge_columns(list(B.T), (1, 2, 3))
    assert inner(ka, kb) == pytest.approx(gram_cross_inner(A, B), abs=1e-10)


def test_compound2_identity_and_diag():
    assert np.allclose(compound2(np.eye(3)), np.eye(3))
    got = compound2(np.diag([2.0, 3.0, 5.0]))
    assert np.allclose(got, np.diag([6.0, 10.0, 15.0]))
    with pytest.raises(ValueError):
        compound2(np.ones((1, 3)))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(2, 4), st.integers(0, 10**6))
def test_compound2_multiplicative(a, b, c, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((a, b))
    N = rng.standard_normal((b, c))
    assert np.allclose(compound2(M @ N), compound2(M) @ compound2(N), atol=1e-10)


def test_compound2_norm_transfer_identity():
    rng = np.random.default_rng(11)
    H = rng.standard_normal((4, 6))
    t = rng.standard_normal(6)
    lhs = np.linalg.norm(t @ compound2(H)) ** 2
    rhs = t @ compound2(H @ H.T) @ t
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_plucker_coords_cases():
    assert np.allclose(plucker_coords([1, 2, 3], [1, 2, 3]).values, 0.0)
    assert plucker_coords([1, 0], [0, 1]).t(1, 2) == 1.0
    t = plucker_coords([1, 2, 3, 4], [5, 6, 7, 8])
    assert t.t(1, 2) * t.t(3, 4) + t.t(1, 4) * t.t(2, 3) == pytest.approx(64.0)
    assert t.t(1, 3) * t.t(2, 4) == pytest.approx(64.0)
    assert t.t(2, 1) == -t.t(1, 2)
    assert t.t(2, 2) == 0.0
    with pytest.raises(ValueError):
        plucker_coords([1, 2], [1, 2, 3])


@settings(max_examples=50, deadline=None)
@given(vec(5), vec(5))
def test_plucker_relation(x, y):
    t = plucker_coords(x, y)
    for (i, j, k, l) in __import__("itertools").combinations(range(1, 6), 4):
        rel = t.t(i, j) * t.t(k, l) - t.t(i, k) * t.t(j, l) + t.t(i, l) * t.t(j, k)
        assert abs(rel) < 1e-12 * max(1.0, t.norm_sq())


def test_plucker_matches_kvector_route():
    x = np.array([0.3, -1.2, 0.7, 2.0])
    y = np.array([1.1, 0.4, -0.5, 0.2])
    t = plucker_coords(x, y)
    kv = wedge(KVector.from_vector(x), KVector.from_vector(y))
    assert t.as_kvector().coeffs == pytest.approx(kv.coeffs)
