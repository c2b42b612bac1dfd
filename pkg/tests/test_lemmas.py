import numpy as np
import pytest
from mpmath import mp, mpf

from turanlab import (
    CHEB01,
    MONOMIAL,
    InequalityViolation,
    Polynomial,
    Weight,
    ZeroRestrictionError,
    check_bernstein_restricted,
    check_decay,
    check_growth,
    disk_zero_count,
    estimate_constants,
    f_bound_check,
    muntz_chebyshev,
    run_lemma_suite,
)
from turanlab.lemmas import ConstantEstimates


class TestGrowth:
    def test_chebyshev_at_two(self, ctx):
        rep = check_growth(Polynomial((-1, 0, 2)), 2, -1, 1, [2], ctx)
        with ctx.workprec():
            assert abs(rep.worst_margin - mpf(7) / 16) < 1e-12
        assert rep.passed and rep.lemma_id == "3.1"

    def test_linear_on_unit_interval(self, ctx):
        rep = check_growth(Polynomial((0, 1)), 1, 0, 1, [2], ctx)
        with ctx.workprec():
            assert abs(rep.worst_margin - mpf(1) / 3) < 1e-12
        assert rep.lemma_id == "3.2"

    def test_margin_scale_invariant(self, ctx):
        q = Polynomial((0.2, -0.7, 0.4), CHEB01)
        xs = [-1.5, 2.5, 4]
        m1 = check_growth(q, 2, -1, 1, xs, ctx).worst_margin
        m2 = check_growth(q.scaled(17), 2, -1, 1, xs, ctx).worst_margin
        assert abs(m1 - m2) <= 1e-12 * m1

    def test_rejects_interior_sample(self, ctx):
        with pytest.raises(ValueError):
            check_growth(Polynomial((0, 1)), 1, 0, 1, [0.5], ctx)


class TestDecay:
    def test_pure_power(self, ctx):
        rep = check_decay(20, 1, Polynomial((1,), MONOMIAL), Weight.UNIT, ctx)
        assert rep.worst_margin <= 1 + 1e-10
        # region is [0, 0.5]; margin is x^10 there, at most about 1e-3
        assert rep.worst_margin < mpf("1e-2")

    def test_vacuous_region(self, ctx):
        rep = check_decay(20, 2, Polynomial((1,), MONOMIAL), Weight.UNIT, ctx)
        assert rep.trials == 0 and rep.worst_margin == 0 and rep.passed

    def test_region_shrinks_with_k(self, ctx):
        with ctx.workprec():
            e1 = 1 - mpf(10) * 2 / 80
            e2 = 1 - mpf(10) * 4 / 80
            assert e2 < e1

    def test_randomized_circle(self, ctx):
        rng = np.random.default_rng(5)
        for _ in range(5):
            q = Polynomial(tuple(mpf(float(c)) for c in rng.uniform(-1, 1, 2)), CHEB01)
            rep = check_decay(80, 2, q, Weight.CIRCLE, ctx, grid=257)
            assert rep.worst_margin <= 1 + 1e-10

    def test_degree_cap(self, ctx):
        with pytest.raises(ValueError):
            check_decay(20, 1, Polynomial((1, 1, 1)), Weight.UNIT, ctx)


class TestFBound:
    def test_example_values(self, ctx):
        rec = f_bound_check(40, 2, ctx)
        with ctx.workprec():
            assert abs(rec.f_at_edge - mpf("0.011873366")) < 1e-6
            assert abs(rec.cap - mpf("0.53674020")) < 1e-6
        assert rec.monotone_ok
        assert rec.f_at_edge <= rec.cap <= 1

    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_cap_below_one(self, ctx, k):
        rec = f_bound_check(12 * k, k, ctx)
        assert rec.cap < 1

    def test_edge_zero_when_n_is_10k(self, ctx):
        rec = f_bound_check(20, 2, ctx)
        assert rec.f_at_edge == 0

    def test_precondition(self, ctx):
        with pytest.raises(ValueError):
            f_bound_check(19, 2, ctx)


class TestBernsteinRestricted:
    def test_pure_power_ratio(self, ctx):
        r = check_bernstein_restricted(Polynomial((1,), MONOMIAL), 10, 1, ctx)
        assert abs(r - mpf("0.41415")) < 1e-4

    def test_constant_ratio_zero(self, ctx):
        r = check_bernstein_restricted(Polynomial((1,), MONOMIAL), 0, 1, ctx)
        assert r == 0

    def test_muntz_input(self, ctx):
        mc = muntz_chebyshev(20, 2, ctx)
        r = check_bernstein_restricted(mc, 20, 2, ctx)
        assert 0 < r < 3

    def test_rejects_disk_zero(self, ctx):
        with pytest.raises(ZeroRestrictionError):
            check_bernstein_restricted(Polynomial((-0.5, 1)), 3, 1, ctx)

    def test_disk_counts(self, ctx):
        assert disk_zero_count(Polynomial((-0.5, 1)), ctx) == 1
        assert disk_zero_count(Polynomial((-2, 1)), ctx) == 0
        assert disk_zero_count(Polynomial((1, 0, 1)), ctx) == 0  # roots at +-i
        # (x - 0.4)(x - 0.6): two zeros inside
        assert disk_zero_count(Polynomial((0.24, -1, 1)), ctx) == 2


class TestSuites:
    @pytest.mark.parametrize("lemma", ["3.1", "3.2", "4.1"])
    def test_bounded_suites_small(self, ctx, lemma):
        rep = run_lemma_suite(lemma, trials=40, ctx=ctx)
        assert rep.passed
        assert rep.worst_margin <= 1 + 1e-10

    @pytest.mark.parametrize("lemma", ["3.4", "3.5"])
    def test_decay_suites_small(self, ctx, lemma):
        rep = run_lemma_suite(lemma, trials=25, ctx=ctx)
        assert rep.passed

    def test_seed_determinism(self, ctx):
        r1 = run_lemma_suite("3.2", trials=10, seed=123, ctx=ctx)
        r2 = run_lemma_suite("3.2", trials=10, seed=123, ctx=ctx)
        assert r1.worst_margin == r2.worst_margin
        assert r1.worst_case == r2.worst_case

    def test_estimation_suite(self, ctx):
        rep = run_lemma_suite("3.6", trials=6, ctx=ctx)
        assert not rep.bounded
        assert rep.worst_margin > 0

    def test_unknown_id(self, ctx):
        with pytest.raises(ValueError):
            run_lemma_suite("9.9", 5, ctx=ctx)


class _Bracket:
    def __init__(self, lo, hi):
        self.value_lower, self.value_upper = mpf(lo), mpf(hi)


class _Row:
    def __init__(self, n, k, theorem, value, endpoint_value):
        self.n, self.k, self.theorem = n, k, theorem
        self.computed = _Bracket(value, value)
        self.endpoint = _Bracket(endpoint_value, endpoint_value)


class TestEstimateConstants:
    def test_single_instance(self, ctx):
        rows = [_Row(12, 1, "2.1", 13, 13)]
        est = estimate_constants(rows, ctx=ctx)
        with ctx.workprec():
            assert abs(est.c1_endpoint_hat - mpf(13) / 12) < 1e-25
            assert abs(est.c2_hat - mpf(1)) < 1e-25  # 13 / (12 + 1)
        assert est.c3_hat is None

    def test_c4_from_classical_zeros(self, ctx):
        from turanlab import zero_bound_check

        mc = muntz_chebyshev(0, 2, ctx)
        slacks = zero_bound_check(mc, ctx)
        est = estimate_constants([], zero_slacks=slacks, ctx=ctx)
        assert abs(est.c4_hat - mpf("0.5857864376")) < 1e-6

    def test_monotone_under_extension(self, ctx):
        base = [_Row(12, 1, "2.1", 13, 13)]
        more = base + [_Row(24, 2, "2.1", 14, 15)]
        e1 = estimate_constants(base, ctx=ctx)
        e2 = estimate_constants(more, ctx=ctx)
        assert e2.c1_endpoint_hat <= e1.c1_endpoint_hat
        assert e2.c2_hat >= e1.c2_hat

    def test_lower_constant_violation_raises(self, ctx):
        bad = [_Row(120, 1, "2.1", 1.0, 1.0)]  # ratio 1/120 below 1/12
        with pytest.raises(InequalityViolation):
            estimate_constants(bad, ctx=ctx)

    def test_empty_rejected(self, ctx):
        with pytest.raises(ValueError):
            estimate_constants([], ctx=ctx)

    def test_json(self, ctx):
        est = ConstantEstimates(mpf(1), mpf(1), mpf(2), mpf(2), None, None, mpf(1.2))
        d = est.to_json_dict(ctx)
        assert d["c3_hat"] is None
        assert isinstance(d["c5_hat"], str) and abs(float(d["c5_hat"]) - 1.2) < 1e-12
