import numpy as np
import pytest

from hpcgblas import (
    GridDims,
    SmootherConfig,
    build_from_triplets,
    build_matrix,
    make_level,
    rbgs_backward,
    rbgs_forward,
    rbgs_symmetric,
)
from hpcgblas import smoother as smoother_mod

from conftest import laplacian_1d


def scalar_gs(A, z, r, order):
    """Sequential Gauss-Seidel visiting ``order``; each update sees the latest z.

    Uses the add-back update (r_i - sum_j a_ij z_j + a_ii z_i) / a_ii with the
    row sum taken left to right in stored column order.
    """
    z = z.copy()
    for i in order:
        cols, vals = A.row(i)
        s = 0.0
        d = 0.0
        for c, v in zip(cols.tolist(), vals.tolist()):
            s += v * z[c]
            if c == i:
                d = v
        z[i] = (r[i] - s + z[i] * d) / d
    return z


def scalar_gs_textbook(A, z, r, order):
    z = z.copy()
    for i in order:
        cols, vals = A.row(i)
        off = sum(v * z[c] for c, v in zip(cols.tolist(), vals.tolist()) if c != i)
        z[i] = (r[i] - off) / A.to_dense()[i, i]
    return z


def color_order(level, reverse=False):
    masks = level.colors[::-1] if reverse else level.colors
    return [int(i) for m in masks for i in m.members]


@pytest.fixture
def lap4():
    return make_level(laplacian_1d(4))


@pytest.fixture(scope="module")
def hpcg4():
    return make_level(build_matrix(GridDims(4, 4, 4)))


def test_identity_one_sweep():
    lvl = make_level(build_from_triplets(3, 3, [(i, i, 1.0) for i in range(3)]))
    r = np.array([1.5, -2.0, 3.25])
    for fn in (rbgs_forward, rbgs_backward):
        z = np.array([9.0, 9.0, 9.0])
        assert fn(lvl, z, r).tolist() == r.tolist()


def test_1d_colors(lap4):
    assert [m.members.tolist() for m in lap4.colors] == [[0, 2], [1, 3]]


@pytest.mark.parametrize("reverse", [False, True])
def test_1d_matches_scalar_oracle(lap4, rng, reverse):
    z0, r = rng.standard_normal(4), rng.standard_normal(4)
    fn = rbgs_backward if reverse else rbgs_forward
    got = fn(lap4, z0.copy(), r)
    np.testing.assert_array_equal(got, scalar_gs(lap4.A, z0, r, color_order(lap4, reverse)))
    np.testing.assert_allclose(got, scalar_gs_textbook(lap4.A, z0, r, color_order(lap4, reverse)),
                               rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("reverse", [False, True])
def test_hpcg_matches_scalar_oracle(hpcg4, rng, reverse):
    z0, r = rng.standard_normal(64), rng.standard_normal(64)
    fn = rbgs_backward if reverse else rbgs_forward
    got = fn(hpcg4, z0.copy(), r)
    np.testing.assert_array_equal(got, scalar_gs(hpcg4.A, z0, r, color_order(hpcg4, reverse)))


def test_fixed_point(hpcg4, rng):
    zs = rng.standard_normal(64)
    r = hpcg4.A.to_dense() @ zs
    for fn in (rbgs_forward, rbgs_backward, rbgs_symmetric):
        z = fn(hpcg4, zs.copy(), r)
        np.testing.assert_allclose(z, zs, rtol=1e-14, atol=1e-14 * np.abs(zs).max())


def test_intra_color_order_is_irrelevant(hpcg4, rng):
    z0, r = rng.standard_normal(64), rng.standard_normal(64)
    ref = rbgs_forward(hpcg4, z0.copy(), r)
    for _ in range(5):
        order = []
        for m in hpcg4.colors:
            order += rng.permutation(m.members).tolist()
        np.testing.assert_array_equal(scalar_gs(hpcg4.A, z0, r, order), ref)


def test_symmetric_is_forward_then_backward(hpcg4, rng):
    z0, r = rng.standard_normal(64), rng.standard_normal(64)
    a = rbgs_symmetric(hpcg4, z0.copy(), r, SmootherConfig(1))
    b = rbgs_backward(hpcg4, rbgs_forward(hpcg4, z0.copy(), r), r)
    np.testing.assert_array_equal(a, b)
    two = rbgs_symmetric(hpcg4, z0.copy(), r, SmootherConfig(2))
    twice = rbgs_symmetric(hpcg4, rbgs_symmetric(hpcg4, z0.copy(), r), r)
    np.testing.assert_array_equal(two, twice)


def test_energy_error_non_increasing(hpcg4, rng):
    D = hpcg4.A.to_dense()
    r = rng.standard_normal(64)
    zs = np.linalg.solve(D, r)
    z = np.zeros(64)
    errs = []
    for _ in range(10):
        e = z - zs
        errs.append(float(e @ D @ e))
        rbgs_symmetric(hpcg4, z, r)
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.5 * errs[0]


def test_linearity(hpcg4, rng):
    r = rng.standard_normal(64)
    base = rbgs_forward(hpcg4, np.zeros(64), r)
    for alpha in (3.0, -0.125, 1e3):
        np.testing.assert_allclose(rbgs_forward(hpcg4, np.zeros(64), alpha * r), alpha * base,
                                   rtol=1e-12, atol=1e-12 * abs(alpha) * np.abs(base).max())


def smoother_matrix(level):
    n = level.n
    M = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        M[:, j] = rbgs_symmetric(level, np.zeros(n), e)
    return M


def test_symmetric_smoother_is_symmetric(hpcg4, rng):
    M = smoother_matrix(hpcg4)
    normM = np.linalg.norm(M, 2)
    for _ in range(10):
        x, y = rng.standard_normal(64), rng.standard_normal(64)
        xMy = x @ rbgs_symmetric(hpcg4, np.zeros(64), y)
        yMx = y @ rbgs_symmetric(hpcg4, np.zeros(64), x)
        assert abs(xMy - yMx) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y) * normM


def test_forward_alone_is_not_symmetric(hpcg4):
    n = hpcg4.n
    F = np.column_stack([rbgs_forward(hpcg4, np.zeros(n), np.eye(n)[j]) for j in range(n)])
    assert np.abs(F - F.T).max() > 1e-3


def test_each_index_updated_once_per_direction(hpcg4, monkeypatch):
    counts = np.zeros(64, dtype=int)
    real = smoother_mod._update

    def counting(idx, *vecs):
        np.add.at(counts, idx, 1)
        real(idx, *vecs)

    monkeypatch.setattr(smoother_mod, "_update", counting)
    rbgs_forward(hpcg4, np.zeros(64), np.ones(64))
    assert np.all(counts == 1)
    rbgs_symmetric(hpcg4, np.zeros(64), np.ones(64), SmootherConfig(2))
    assert np.all(counts == 5)


def test_bad_sizes(hpcg4):
    with pytest.raises(ValueError):
        rbgs_forward(hpcg4, np.zeros(63), np.zeros(64))
    with pytest.raises(ValueError):
        SmootherConfig(0)
