import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from sqvar import core, lp
from _oracles import (
    lp_mpc_oracle,
    lp_newton_full,
    lp_ssv_newton_full,
    lp_step_cap,
)


def tiny_problem():
    """min x subject to x = 1, x >= 0; unique feasible point."""
    return lp.LpProblem(a=np.array([[1.0]]), b=np.array([1.0]),
                        c=np.array([1.0]), upper_idx=np.array([], dtype=int),
                        u=np.array([]))


def interior_point(p, seed, spread=(0.5, 2.0)):
    rng = np.random.default_rng(seed)
    k = p.upper_idx.size
    return lp.IpmIterate(
        x=rng.uniform(*spread, size=p.n),
        w=rng.uniform(*spread, size=k),
        lam=rng.standard_normal(p.m),
        s=rng.uniform(*spread, size=p.n),
        t=rng.uniform(*spread, size=k),
    )


def bounded_instance(n, m, k, seed):
    """Random full-rank instance with k upper-bounded variables."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.1, 1.0, size=(m, n))
    b = a @ rng.uniform(0.2, 1.0, size=n)
    c = rng.uniform(0.1, 1.0, size=n)
    idx = rng.choice(n, size=k, replace=False)
    u = rng.uniform(1.0, 5.0, size=k)
    return lp.LpProblem(a=a, b=b, c=c, upper_idx=idx, u=u)


class TestLpProblem:
    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lp.LpProblem(a=np.ones((2, 3)), b=np.ones(3), c=np.ones(3),
                         upper_idx=np.array([], dtype=int), u=np.array([]))

    def test_rank_deficient_rejected(self):
        a = np.array([[1.0, 1.0], [2.0, 2.0]])
        with pytest.raises(core.RankDeficient):
            lp.LpProblem(a=a, b=np.ones(2), c=np.ones(2),
                         upper_idx=np.array([], dtype=int), u=np.array([]))

    def test_upper_idx_out_of_range(self):
        with pytest.raises(ValueError):
            lp.LpProblem(a=np.ones((1, 2)), b=np.ones(1), c=np.ones(2),
                         upper_idx=np.array([2]), u=np.array([1.0]))

    def test_upper_idx_duplicates(self):
        with pytest.raises(ValueError):
            lp.LpProblem(a=np.ones((1, 3)), b=np.ones(1), c=np.ones(3),
                         upper_idx=np.array([1, 1]), u=np.array([1.0, 2.0]))

    def test_upper_bounds_positive(self):
        with pytest.raises(ValueError):
            lp.LpProblem(a=np.ones((1, 2)), b=np.ones(1), c=np.ones(2),
                         upper_idx=np.array([0]), u=np.array([0.0]))

    def test_upper_idx_sorted_with_bounds(self):
        p = lp.LpProblem(a=np.ones((1, 4)), b=np.ones(1), c=np.ones(4),
                         upper_idx=np.array([3, 1]), u=np.array([7.0, 9.0]))
        assert_array_equal(p.upper_idx, [1, 3])
        assert_allclose(p.u, [9.0, 7.0])

    def test_free_idx_complement(self):
        p = lp.LpProblem(a=np.ones((1, 5)), b=np.ones(1), c=np.ones(5),
                         upper_idx=np.array([1, 3]), u=np.array([2.0, 2.0]))
        assert_array_equal(p.free_idx, [0, 2, 4])


class TestGenRandomLp:
    def test_deterministic(self):
        p1 = lp.gen_random_lp(40, 20, seed=7)
        p2 = lp.gen_random_lp(40, 20, seed=7)
        assert_array_equal(p1.a, p2.a)
        assert_array_equal(p1.b, p2.b)
        assert_array_equal(p1.c, p2.c)
        assert_array_equal(p1.upper_idx, p2.upper_idx)
        assert_array_equal(p1.u, p2.u)

    def test_seed_changes_data(self):
        p1 = lp.gen_random_lp(40, 20, seed=0)
        p2 = lp.gen_random_lp(40, 20, seed=1)
        assert np.abs(p1.a - p2.a).max() > 1e-3

    def test_shapes_and_ranges(self):
        p = lp.gen_random_lp(100, 40, seed=3)
        assert p.a.shape == (40, 100)
        assert p.upper_idx.size == 2
        assert p.a.min() >= 0.0 and p.a.max() <= 1.0
        assert p.c.min() >= 0.0 and p.c.max() <= 1.0
        assert p.u.min() >= 1.0 and p.u.max() <= 21.0

    def test_bound_count_floor(self):
        assert lp.gen_random_lp(50, 19, seed=0).upper_idx.size == 0
        assert lp.gen_random_lp(50, 20, seed=0).upper_idx.size == 1
        assert lp.gen_random_lp(80, 41, seed=0).upper_idx.size == 2

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            lp.gen_random_lp(5, 6, seed=0)
        with pytest.raises(ValueError):
            lp.gen_random_lp(0, 0, seed=0)


class TestInitIterate:
    def test_scalar_example(self):
        p = lp.LpProblem(a=np.array([[1.0]]), b=np.array([2.0]),
                         c=np.array([3.0]),
                         upper_idx=np.array([], dtype=int), u=np.array([]))
        it = lp.init_iterate(p)
        assert_allclose(it.x, [300.0])
        assert_allclose(it.s, [300.0])
        assert_allclose(it.lam, [0.0])
        assert it.w.size == 0 and it.t.size == 0

    def test_ssv_square_roots(self):
        p = lp.LpProblem(a=np.array([[1.0]]), b=np.array([2.0]),
                         c=np.array([3.0]),
                         upper_idx=np.array([], dtype=int), u=np.array([]))
        it = lp.init_iterate(p, ssv=True)
        assert_allclose(it.v, [np.sqrt(300.0)], rtol=1e-15)
        assert_allclose(it.v * it.v, it.base.x, rtol=1e-15)

    def test_matrix_norm_is_row_sum(self):
        p = lp.LpProblem(a=np.array([[1.0, 1.0]]), b=np.array([1.0]),
                         c=np.array([0.5, 0.5]),
                         upper_idx=np.array([], dtype=int), u=np.array([]))
        it = lp.init_iterate(p)
        assert_allclose(it.x, [200.0, 200.0])

    def test_bounded_blocks_filled(self):
        p = bounded_instance(8, 3, 2, seed=1)
        it = lp.init_iterate(p)
        assert it.w.shape == (2,) and it.t.shape == (2,)
        assert it.w.min() > 0 and np.all(it.w == it.x[0])

    def test_initial_residual_finite_positive(self):
        p = lp.gen_random_lp(30, 10, seed=5)
        res = lp.compute_residuals(p, lp.init_iterate(p)).res
        assert np.isfinite(res) and res > 0.0


class TestComputeResiduals:
    def test_zero_at_optimum(self):
        p = tiny_problem()
        it = lp.IpmIterate(x=np.array([1.0]), w=np.zeros(0),
                           lam=np.array([1.0]), s=np.array([0.0]),
                           t=np.zeros(0))
        r = lp.compute_residuals(p, it)
        assert r.res == 0.0
        assert_allclose(r.r_x, [0.0])

    def test_complementarity_only_iterate(self):
        # dual feasible and primal feasible by construction, so res is
        # exactly the norm of the complementarity products over the
        # normalizer
        rng = np.random.default_rng(11)
        p = bounded_instance(10, 4, 2, seed=11)
        x = np.linalg.lstsq(p.a, p.b, rcond=None)[0]
        x = x - x.min() + 0.5
        b = p.a @ x
        p = lp.LpProblem(a=p.a, b=b, c=p.c, upper_idx=p.upper_idx,
                         u=np.maximum(p.u, x[p.upper_idx] + 1.0))
        w = p.u - x[p.upper_idx]
        lam = -rng.uniform(0.5, 1.0, size=p.m)
        t = rng.uniform(0.5, 1.0, size=2)
        s = p.c - p.a.T @ lam
        s[p.upper_idx] += t
        assert s.min() > 0
        it = lp.IpmIterate(x=x, w=w, lam=lam, s=s, t=t)
        r = lp.compute_residuals(p, it)
        expect = np.linalg.norm(np.concatenate([x * s, t * w]))
        expect /= 1.0 + max(np.linalg.norm(p.b), np.linalg.norm(p.c))
        assert_allclose(r.res, expect, rtol=1e-12)
        assert_allclose(r.r_cI, np.zeros(2), atol=1e-12)
        assert_allclose(r.r_x, np.zeros(p.m), atol=1e-12)

    def test_permutation_invariance(self):
        p = bounded_instance(9, 4, 3, seed=2)
        it = interior_point(p, seed=3)
        base = lp.compute_residuals(p, it).res
        rng = np.random.default_rng(4)
        perm = rng.permutation(p.n)
        inv = np.argsort(perm)
        new_idx = inv[p.upper_idx]
        order = np.argsort(new_idx)
        p2 = lp.LpProblem(a=p.a[:, perm], b=p.b, c=p.c[perm],
                          upper_idx=new_idx, u=p.u)
        it2 = lp.IpmIterate(x=it.x[perm], w=it.w[order], lam=it.lam,
                            s=it.s[perm], t=it.t[order])
        assert_allclose(lp.compute_residuals(p2, it2).res, base, rtol=1e-12)

    def test_negative_parts_enter(self):
        p = tiny_problem()
        good = lp.IpmIterate(x=np.array([1.0]), w=np.zeros(0),
                             lam=np.array([1.0]), s=np.array([0.0]),
                             t=np.zeros(0))
        bad = lp.IpmIterate(x=np.array([1.0]), w=np.zeros(0),
                            lam=np.array([1.0]), s=np.array([-0.3]),
                            t=np.zeros(0))
        # s enters r_cI/r_cIbar, not the hinge terms; x drives the hinge
        worse = lp.IpmIterate(x=np.array([-1.0]), w=np.zeros(0),
                              lam=np.array([1.0]), s=np.array([0.0]),
                              t=np.zeros(0))
        assert lp.compute_residuals(p, good).res == 0.0
        assert lp.compute_residuals(p, bad).res > 0.0
        assert lp.compute_residuals(p, worse).res > 0.0


class TestPdipDirection:
    def test_zero_at_central_path_root(self):
        # x = s = 1 with lam = 0 solves the sigma = 1 system exactly
        p = tiny_problem()
        it = lp.IpmIterate(x=np.array([1.0]), w=np.zeros(0),
                           lam=np.array([0.0]), s=np.array([1.0]),
                           t=np.zeros(0))
        d = lp.pdip_direction(p, it, sigma=1.0)
        assert_allclose(d.dx, [0.0], atol=1e-13)
        assert_allclose(d.dlam, [0.0], atol=1e-13)
        assert_allclose(d.ds, [0.0], atol=1e-13)

    def test_near_zero_at_near_root(self):
        p = tiny_problem()
        eps = 1e-12
        it = lp.IpmIterate(x=np.array([1.0]), w=np.zeros(0),
                           lam=np.array([1.0 - eps]), s=np.array([eps]),
                           t=np.zeros(0))
        d = lp.pdip_direction(p, it, sigma=0.0)
        assert abs(d.dx[0]) < 1e-10
        assert abs(d.dlam[0]) < 1e-10
        assert abs(d.ds[0]) < 1e-10

    def test_one_var_against_full_solve(self):
        p = tiny_problem()
        it = lp.IpmIterate(x=np.array([2.0]), w=np.zeros(0),
                           lam=np.array([0.0]), s=np.array([2.0]),
                           t=np.zeros(0))
        d = lp.pdip_direction(p, it, sigma=0.0)
        ox, ow, ol, os_, ot = lp_newton_full(
            p.a, p.b, p.c, p.upper_idx, p.u,
            (it.x, it.w, it.lam, it.s, it.t), sigma=0.0)
        assert_allclose(d.dx, ox, rtol=1e-12)
        assert_allclose(d.dlam, ol, rtol=1e-12)
        assert_allclose(d.ds, os_, rtol=1e-12)

    def test_matches_full_newton_solve(self):
        for seed in range(10):
            p = bounded_instance(20, 8, 3, seed=seed)
            it = interior_point(p, seed=seed + 100)
            d = lp.pdip_direction(p, it, sigma=0.3)
            full = lp_newton_full(p.a, p.b, p.c, p.upper_idx, p.u,
                                  (it.x, it.w, it.lam, it.s, it.t),
                                  sigma=0.3)
            scale = 1.0 + max(np.abs(z).max() for z in full)
            for got, want in zip((d.dx, d.dw, d.dlam, d.ds, d.dt), full):
                assert np.abs(got - want).max() <= 1e-9 * scale

    def test_block_equations_hold(self):
        # substitute the direction into all six linearized equations
        p = bounded_instance(20, 8, 2, seed=42)
        it = interior_point(p, seed=43)
        d = lp.pdip_direction(p, it, sigma=0.0)
        r = lp.compute_residuals(p, it)
        ui, free = p.upper_idx, p.free_idx
        eqs = np.concatenate([
            p.a[:, ui].T @ d.dlam + d.ds[ui] - d.dt + r.r_cI,
            p.a[:, free].T @ d.dlam + d.ds[free] + r.r_cIbar,
            p.a @ d.dx + r.r_x,
            d.dx[ui] + d.dw + r.r_u,
            it.x * d.ds + it.s * d.dx + r.r_xs,
            it.w * d.dt + it.t * d.dw + r.r_rw,
        ])
        rhs = np.concatenate([r.r_cI, r.r_cIbar, r.r_x, r.r_u,
                              r.r_xs, r.r_rw])
        assert np.linalg.norm(eqs) <= 1e-8 * (1.0 + np.linalg.norm(rhs))

    def test_sigma_validated(self):
        p = tiny_problem()
        it = lp.IpmIterate(x=np.array([2.0]), w=np.zeros(0),
                           lam=np.array([0.0]), s=np.array([2.0]),
                           t=np.zeros(0))
        with pytest.raises(ValueError):
            lp.pdip_direction(p, it, sigma=1.5)
        with pytest.raises(ValueError):
            lp.pdip_direction(p, it, sigma=-0.1)


class TestMpcDirection:
    def test_matches_oracle(self):
        for seed in range(10):
            p = bounded_instance(12, 5, 2, seed=seed)
            it = interior_point(p, seed=seed + 50)
            got = lp.mpc_direction(p, it)
            (ox, ow, ol, os_, ot), sigma, mu_aff = lp_mpc_oracle(
                p.a, p.b, p.c, p.upper_idx, p.u,
                (it.x, it.w, it.lam, it.s, it.t), second_order=True)
            assert_allclose(got.sigma, sigma, rtol=1e-12)
            assert_allclose(got.mu_aff, mu_aff, rtol=1e-9, atol=1e-14)
            scale = 1.0 + max(np.abs(z).max() for z in (ox, ow, ol, os_, ot))
            for a, b in zip((got.delta.dx, got.delta.dw, got.delta.dlam,
                             got.delta.ds, got.delta.dt),
                            (ox, ow, ol, os_, ot)):
                assert np.abs(a - b).max() <= 1e-9 * scale

    def test_plain_corrector_matches_oracle(self):
        p = bounded_instance(12, 5, 2, seed=77)
        it = interior_point(p, seed=78)
        got = lp.mpc_direction(p, it, corrector="plain")
        (ox, _, ol, os_, _), sigma, _ = lp_mpc_oracle(
            p.a, p.b, p.c, p.upper_idx, p.u,
            (it.x, it.w, it.lam, it.s, it.t), second_order=False)
        assert_allclose(got.sigma, sigma, rtol=1e-12)
        assert_allclose(got.delta.dx, ox, rtol=1e-8, atol=1e-12)

    def test_affine_hit_gives_zero_sigma(self):
        # from this point the affine dual step lands exactly on s = 0, so
        # mu_aff vanishes and the corrector reduces to the affine system
        p = tiny_problem()
        eps = 1e-3
        it = lp.IpmIterate(x=np.array([1.0]), w=np.zeros(0),
                           lam=np.array([1.0 - eps]), s=np.array([eps]),
                           t=np.zeros(0))
        got = lp.mpc_direction(p, it)
        assert got.sigma == 0.0
        assert abs(got.mu_aff) < 1e-15
        aff = lp.pdip_direction(p, it, sigma=0.0)
        assert_allclose(got.delta.ds, aff.ds, rtol=1e-12)

    def test_centering_cube_edges(self):
        assert lp._centering_sigma(0.0, 2.0) == 0.0
        assert lp._centering_sigma(2.0, 2.0) == 1.0
        assert lp._centering_sigma(5.0, 2.0) == 1.0
        assert_allclose(lp._centering_sigma(1.0, 2.0), 0.125, rtol=1e-15)
        assert lp._centering_sigma(1.0, 0.0) == 0.0

    def test_correctors_differ(self):
        p = bounded_instance(15, 6, 1, seed=5)
        it = interior_point(p, seed=6)
        d1 = lp.mpc_direction(p, it, corrector="mehrotra")
        d2 = lp.mpc_direction(p, it, corrector="plain")
        assert np.abs(d1.delta.dx - d2.delta.dx).max() > 1e-10

    def test_bad_corrector_rejected(self):
        p = tiny_problem()
        it = lp.IpmIterate(x=np.array([2.0]), w=np.zeros(0),
                           lam=np.array([0.0]), s=np.array([2.0]),
                           t=np.zeros(0))
        with pytest.raises(ValueError):
            lp.mpc_direction(p, it, corrector="classic")


class TestSsvSqpDirection:
    def test_matches_full_newton_solve(self):
        for seed in range(10):
            p = bounded_instance(12, 5, 2, seed=seed)
            base = interior_point(p, seed=seed + 200)
            rng = np.random.default_rng(seed + 300)
            it = lp.SsvIterate(base=base,
                               v=rng.uniform(0.5, 2.0, size=p.n),
                               y=rng.uniform(0.5, 2.0, size=2))
            d = lp.ssv_sqp_direction(p, it)
            full = lp_ssv_newton_full(
                p.a, p.b, p.c, p.upper_idx, p.u,
                (base.x, base.w, base.lam, base.s, base.t, it.v, it.y))
            scale = 1.0 + max(np.abs(z).max() for z in full)
            got = (d.dx, d.dw, d.dlam, d.ds, d.dt, d.dv, d.dy)
            for a, b in zip(got, full):
                assert np.abs(a - b).max() <= 1e-9 * scale

    def test_near_zero_at_near_root(self):
        p = tiny_problem()
        eps = 1e-12
        base = lp.IpmIterate(x=np.array([1.0]), w=np.zeros(0),
                             lam=np.array([1.0 - eps]), s=np.array([eps]),
                             t=np.zeros(0))
        it = lp.SsvIterate(base=base, v=np.array([1.0]), y=np.zeros(0))
        d = lp.ssv_sqp_direction(p, it)
        assert abs(d.dx[0]) < 1e-10
        assert abs(d.dv[0]) < 1e-10
        assert abs(d.dlam[0]) < 1e-10

    def test_step_relation_to_pdip(self):
        # with no upper bounds, x = v * v and Ax = b, the squared-variable
        # step shares (dlam, ds) with the affine interior-point step and
        # moves x exactly twice as far
        for seed in range(50):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(6, 21))
            m = int(rng.integers(2, n))
            a = rng.standard_normal((m, n))
            x = rng.uniform(0.5, 2.0, size=n)
            p = lp.LpProblem(a=a, b=a @ x, c=rng.standard_normal(n),
                             upper_idx=np.array([], dtype=int),
                             u=np.array([]))
            base = lp.IpmIterate(x=x, w=np.zeros(0),
                                 lam=rng.standard_normal(m),
                                 s=rng.uniform(0.5, 2.0, size=n),
                                 t=np.zeros(0))
            it = lp.SsvIterate(base=base, v=np.sqrt(x), y=np.zeros(0))
            ssv = lp.ssv_sqp_direction(p, it)
            ipm = lp.pdip_direction(p, base, sigma=0.0)
            scale = 1.0 + np.abs(ipm.dx).max()
            assert np.abs(ssv.dx - 2.0 * ipm.dx).max() <= 1e-9 * scale
            assert np.abs(ssv.dlam - ipm.dlam).max() <= 1e-9 * (
                1.0 + np.abs(ipm.dlam).max())
            assert np.abs(ssv.ds - ipm.ds).max() <= 1e-9 * (
                1.0 + np.abs(ipm.ds).max())

    def test_square_residual_recursion(self):
        # starting consistent (x = v * v), after a step of length alpha the
        # gap v+ * v+ - x+ equals alpha^2 / 4 * dx * dx / x
        for seed in range(20):
            rng = np.random.default_rng(seed + 600)
            n, m = 10, 4
            a = rng.uniform(0.1, 1.0, size=(m, n))
            x = rng.uniform(0.5, 2.0, size=n)
            p = lp.LpProblem(a=a, b=a @ x, c=rng.uniform(0.1, 1.0, size=n),
                             upper_idx=np.array([], dtype=int),
                             u=np.array([]))
            base = lp.IpmIterate(x=x, w=np.zeros(0),
                                 lam=rng.standard_normal(m),
                                 s=rng.uniform(0.5, 2.0, size=n),
                                 t=np.zeros(0))
            it = lp.SsvIterate(base=base, v=np.sqrt(x), y=np.zeros(0))
            d = lp.ssv_sqp_direction(p, it)
            for alpha in (0.3, 0.7, 1.0):
                v_new = it.v + alpha * d.dv
                x_new = base.x + alpha * d.dx
                gap = v_new * v_new - x_new
                want = 0.25 * alpha ** 2 * d.dx * d.dx / base.x
                assert np.abs(gap - want).max() <= 1e-10 * (
                    1.0 + np.abs(want).max())


class TestRatioStep:
    def test_single_blocking_index(self):
        assert lp.ratio_step(np.array([1.0, 2.0]),
                             np.array([-2.0, 1.0]), tau=1.0) == 0.5

    def test_unblocked_returns_tau(self):
        assert lp.ratio_step(np.array([1.0, 2.0]),
                             np.array([0.5, 0.0]), tau=0.7) == 0.7

    def test_tau_scales(self):
        assert_allclose(lp.ratio_step(np.array([1.0, 2.0]),
                                      np.array([-2.0, 1.0]), tau=0.9),
                        0.45, rtol=1e-15)

    def test_capped_at_one(self):
        assert lp.ratio_step(np.array([10.0]), np.array([-1.0]),
                             tau=1.0) == 1.0

    def test_empty_returns_tau(self):
        assert lp.ratio_step(np.zeros(0), np.zeros(0), tau=0.5) == 0.5

    def test_validation(self):
        with pytest.raises(ValueError):
            lp.ratio_step(np.array([0.0]), np.array([-1.0]), tau=1.0)
        with pytest.raises(ValueError):
            lp.ratio_step(np.array([1.0]), np.array([-1.0]), tau=0.0)
        with pytest.raises(ValueError):
            lp.ratio_step(np.array([1.0]), np.array([-1.0]), tau=1.1)
        with pytest.raises(ValueError):
            lp.ratio_step(np.array([1.0, 2.0]), np.array([-1.0]), tau=1.0)

    def test_positivity_preserved(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            pos = rng.uniform(0.1, 3.0, size=6)
            delta = rng.standard_normal(6) * 3.0
            alpha = lp.ratio_step(pos, delta, tau=0.95)
            assert np.all(pos + alpha * delta > 0.0)
            assert lp_step_cap(pos, delta) * 0.95 == pytest.approx(alpha)


class TestLpSolve:
    def test_one_var_all_methods(self):
        p = tiny_problem()
        for method in ("pdip", "mpc", "ssv"):
            r = lp.lp_solve(p, method=method, eps=1e-10)
            assert r.status == lp.SOLVED
            base = r.iterate.base if method == "ssv" else r.iterate
            assert_allclose(base.x, [1.0], atol=1e-6)
            assert r.res <= 1e-10

    def test_iteration_limit(self):
        p = lp.gen_random_lp(40, 12, seed=0)
        r = lp.lp_solve(p, method="pdip", eps=1e-12, max_iter=2)
        assert r.status == lp.ITER_LIMIT
        assert r.iterations == 2

    def test_time_limit(self):
        p = lp.gen_random_lp(40, 12, seed=0)
        r = lp.lp_solve(p, method="mpc", eps=1e-12, max_seconds=0.0)
        assert r.status == lp.TIME_LIMIT
        assert r.iterations == 0

    def test_infeasible_not_solved(self):
        p = lp.LpProblem(a=np.array([[1.0, 1.0]]), b=np.array([-1.0]),
                         c=np.array([1.0, 1.0]),
                         upper_idx=np.array([], dtype=int), u=np.array([]))
        r = lp.lp_solve(p, method="mpc", eps=1e-8, max_iter=60)
        assert r.status != lp.SOLVED

    def test_trace_shape_and_monotone_counter(self):
        p = lp.gen_random_lp(50, 15, seed=4)
        r = lp.lp_solve(p, method="mpc", eps=1e-8)
        assert r.trace.columns == ("iter", "res", "mu", "alpha_p",
                                   "alpha_d", "sigma")
        assert len(r.trace.rows) == r.iterations + 1
        assert r.trace.rows[0][0] == 0
        r.trace.validate()
        r2 = lp.lp_solve(p, method="ssv", eps=1e-8)
        assert r2.trace.columns == ("iter", "res", "mu", "alpha_p",
                                    "alpha_d")
        r2.trace.validate()

    def test_deterministic(self):
        p = lp.gen_random_lp(50, 15, seed=9)
        r1 = lp.lp_solve(p, method="ssv", eps=1e-8)
        r2 = lp.lp_solve(p, method="ssv", eps=1e-8)
        assert r1.iterations == r2.iterations
        assert r1.trace.rows == r2.trace.rows

    def test_final_iterate_positive(self):
        p = lp.gen_random_lp(60, 20, seed=1)
        r = lp.lp_solve(p, method="mpc", eps=1e-8)
        it = r.iterate
        assert it.x.min() > 0 and it.s.min() > 0
        assert it.w.min() > 0 and it.t.min() > 0
        r2 = lp.lp_solve(p, method="ssv", eps=1e-8)
        assert r2.iterate.v.min() > 0 and r2.iterate.y.min() > 0
        assert r2.iterate.base.s.min() > 0 and r2.iterate.base.t.min() > 0

    def test_methods_agree_on_objective(self):
        p = lp.gen_random_lp(60, 20, seed=3)
        objs = [lp.lp_solve(p, method=m, eps=1e-9).objective
                for m in ("pdip", "mpc", "ssv")]
        assert_allclose(objs[1], objs[0], rtol=1e-5)
        assert_allclose(objs[2], objs[0], rtol=1e-5)

    def test_upper_bounds_respected(self):
        p = lp.gen_random_lp(60, 20, seed=2)
        r = lp.lp_solve(p, method="mpc", eps=1e-8)
        assert np.all(r.iterate.x[p.upper_idx] <= p.u + 1e-6)

    def test_augmented_path_agrees(self):
        p = lp.gen_random_lp(40, 12, seed=6)
        r1 = lp.lp_solve(p, method="mpc", eps=1e-8)
        r2 = lp.lp_solve(p, method="mpc", eps=1e-8,
                         solver_path="augmented")
        assert r2.status == lp.SOLVED
        assert_allclose(r2.objective, r1.objective, rtol=1e-7)

    def test_reset_squares_variant_solves(self):
        p = lp.gen_random_lp(60, 20, seed=5)
        r = lp.lp_solve(p, method="ssv", eps=1e-8, reset_squares=True)
        assert r.status == lp.SOLVED

    def test_plain_corrector_needs_more_iterations(self):
        p = lp.gen_random_lp(200, 20, seed=0)
        fast = lp.lp_solve(p, method="mpc", eps=1e-8)
        slow = lp.lp_solve(p, method="mpc", eps=1e-8, corrector="plain")
        assert slow.status == lp.SOLVED and fast.status == lp.SOLVED
        assert slow.iterations > fast.iterations

    def test_validation(self):
        p = tiny_problem()
        with pytest.raises(ValueError):
            lp.lp_solve(p, method="simplex")
        with pytest.raises(ValueError):
            lp.lp_solve(p, eps=0.0)
        with pytest.raises(ValueError):
            lp.lp_solve(p, tau=1.5)
