import itertools

import numpy as np
import pytest

from hpcgblas import (
    GridDims,
    KernelTimer,
    SmootherConfig,
    linearize,
    mg_vcycle,
    rbgs_symmetric,
    refine_and_add,
    restrict_vector,
    work_counter,
)
from hpcgblas.algebra import TRANSPOSE, mxv, vector, waxpby

from conftest import hierarchy


def even_points(dims):
    return sorted(linearize(dims, x, y, z)
                  for x in range(0, dims.nx, 2)
                  for y in range(0, dims.ny, 2)
                  for z in range(0, dims.nz, 2))


def scripted_vcycle(level, z, r):
    # the cycle written out with fresh vectors, one step per line
    rbgs_symmetric(level, z, r)
    if level.coarser is None:
        return z
    f = mxv(vector(level.n), None, level.A, z)
    resid = waxpby(vector(level.n), 1.0, r, -1.0, f)
    r_c = mxv(vector(level.coarser.n), None, level.R, resid)
    z_c = vector(level.coarser.n)
    scripted_vcycle(level.coarser, z_c, r_c)
    corr = mxv(vector(level.n), None, level.R, z_c, desc=TRANSPOSE)
    waxpby(z, 1.0, z, 1.0, corr)
    rbgs_symmetric(level, z, r)
    return z


def test_single_level_is_one_smooth(rng):
    h = hierarchy(8, 1)
    r = rng.standard_normal(h.n)
    a = mg_vcycle(h, np.zeros(h.n), r)
    b = rbgs_symmetric(h, np.zeros(h.n), r)
    np.testing.assert_array_equal(a, b)


def test_zero_stays_zero():
    h = hierarchy(8, 3)
    assert not mg_vcycle(h, np.zeros(h.n), np.zeros(h.n)).any()


@pytest.mark.parametrize("n,levels", [(8, 2), (8, 3), (16, 4)])
def test_matches_scripted_cycle(rng, n, levels):
    h = hierarchy(n, levels)
    r = rng.standard_normal(h.n)
    got = mg_vcycle(h, np.zeros(h.n), r)
    ref = scripted_vcycle(h, np.zeros(h.n), r)
    np.testing.assert_allclose(got, ref, rtol=0, atol=1e-14 * np.abs(ref).max())


class TestRestrict:
    def test_ones(self):
        h = hierarchy(8, 2)
        assert restrict_vector(h, np.ones(h.n)).tolist() == [1.0] * 64

    def test_injection_pattern(self):
        h = hierarchy(8, 2)
        fine = np.full(h.n, -5.0)
        cd = h.coarser.dims
        for cx, cy, cz in itertools.product(range(4), repeat=3):
            fine[linearize(h.dims, 2 * cx, 2 * cy, 2 * cz)] = linearize(cd, cx, cy, cz)
        assert restrict_vector(h, fine).tolist() == list(map(float, range(64)))

    def test_linear(self, rng):
        h = hierarchy(8, 2)
        u, v = rng.standard_normal(h.n), rng.standard_normal(h.n)
        lhs = restrict_vector(h, 2.0 * u - 3.0 * v)
        np.testing.assert_allclose(lhs, 2.0 * restrict_vector(h, u) - 3.0 * restrict_vector(h, v),
                                   rtol=1e-15)

    def test_coarsest_errors(self):
        h = hierarchy(8, 2)
        with pytest.raises(ValueError):
            restrict_vector(h.coarser, np.ones(64))
        with pytest.raises(ValueError):
            refine_and_add(h.coarser, np.ones(64), np.ones(8))


class TestRefine:
    def test_zero_correction(self, rng):
        h = hierarchy(8, 2)
        z = rng.standard_normal(h.n)
        before = z.copy()
        refine_and_add(h, z, np.zeros(64))
        np.testing.assert_array_equal(z, before)

    def test_ones_land_on_even_points(self):
        h = hierarchy(8, 2)
        z = refine_and_add(h, np.zeros(h.n), np.ones(64))
        assert np.flatnonzero(z).tolist() == even_points(h.dims)
        assert set(z[z != 0].tolist()) == {1.0}

    def test_only_injected_positions_change(self, rng):
        h = hierarchy(8, 2)
        z = rng.standard_normal(h.n)
        before = z.copy()
        refine_and_add(h, z, rng.standard_normal(64))
        others = np.setdiff1d(np.arange(h.n), even_points(h.dims))
        np.testing.assert_array_equal(z[others], before[others])

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_restrict_refine_round_trip(self, rng, n):
        h = hierarchy(n, 2)
        zc = rng.standard_normal(h.coarser.n)
        fine = refine_and_add(h, np.zeros(h.n), zc)
        np.testing.assert_array_equal(restrict_vector(h, fine), zc)


@pytest.mark.parametrize("n,levels", [(4, 2), (8, 3), (16, 4)])
def test_vcycle_operator_symmetric(rng, n, levels):
    h = hierarchy(n, levels)
    for _ in range(3):
        x, y = rng.standard_normal(h.n), rng.standard_normal(h.n)
        xMy = x @ mg_vcycle(h, np.zeros(h.n), y)
        yMx = y @ mg_vcycle(h, np.zeros(h.n), x)
        assert abs(xMy - yMx) <= 1e-12 * np.linalg.norm(x) * np.linalg.norm(y)


def test_vcycle_positive_definite_on_small_grid():
    h = hierarchy(4, 2)
    M = np.column_stack([mg_vcycle(h, np.zeros(64), e) for e in np.eye(64)])
    np.testing.assert_allclose(M, M.T, atol=1e-14)
    assert np.linalg.eigvalsh((M + M.T) / 2).min() > 0


def expected_visits(h, sweeps):
    total = 0
    for lvl in h.levels():
        if lvl.coarser is None:
            total += 2 * sweeps * lvl.A.nnz
        else:
            total += (4 * sweeps + 1) * lvl.A.nnz + 2 * lvl.R.nnz
    return total


@pytest.mark.parametrize("sweeps", [1, 2])
def test_work_count_exact(sweeps):
    h = hierarchy(16, 4)
    work_counter.reset()
    mg_vcycle(h, np.zeros(h.n), np.ones(h.n), SmootherConfig(sweeps))
    assert work_counter.nnz_visits == expected_visits(h, sweeps)
    # linear in n: every pass over a level is bounded by 27 n_level
    n = h.n
    bound = 27 * n * (1 + 1 / 8 + 1 / 64 + 1 / 512) * (4 * sweeps + 1) + 2 * n * (1 / 8 + 1 / 64 + 1 / 512)
    assert work_counter.nnz_visits <= bound


def test_timer_records_every_level():
    h = hierarchy(16, 4)
    t = KernelTimer()
    ws = [(id(l.f), id(l.s), id(l.r_c), id(l.z_c)) for l in h.levels()]
    mg_vcycle(h, np.zeros(h.n), np.ones(h.n), timer=t)
    assert {lv for (k, lv) in t.totals if k == "smoother"} == {0, 1, 2, 3}
    assert {lv for (k, lv) in t.totals if k == "transfer"} == {0, 1, 2}
    assert all(v >= 0 for v in t.totals.values())
    assert ws == [(id(l.f), id(l.s), id(l.r_c), id(l.z_c)) for l in h.levels()]


def test_bad_sizes():
    h = hierarchy(8, 2)
    with pytest.raises(ValueError):
        mg_vcycle(h, np.zeros(5), np.zeros(h.n))
