import numpy as np
import pytest
from mpmath import mp, mpf

from turanlab import (
    CHEB01,
    ENDPOINT,
    VARIATION,
    IncompletePolynomial,
    Polynomial,
    RatioProblem,
    Weight,
    evaluate_ratio,
    monomial_witness,
    solve_endpoint,
    solve_variation,
    theorem_check,
)

# values recorded at bring-up from the certified solver; the certificates
# bound each by its own gap, so drift beyond 2e-6 relative is a regression
BRING_UP = {
    (ENDPOINT, 40, 2, "unit"): "15.637470722889928",
    (VARIATION, 40, 2, "unit"): "15.009384792200069",
    (ENDPOINT, 40, 2, "circle"): "3.3920032944344499",
    (VARIATION, 40, 2, "circle"): "3.0019797354915616",
    (ENDPOINT, 20, 3, "unit"): "5.6731447346251313",
    (VARIATION, 20, 3, "unit"): "5.5558947709530015",
}


class TestEndpointClosedForms:
    @pytest.mark.parametrize("n", [1, 10, 100])
    def test_k1_unit(self, ctx, n):
        cert = solve_endpoint(RatioProblem(n, 1, ENDPOINT, Weight.UNIT), ctx)
        assert abs(cert.value_upper - (n + 1)) <= 1e-10 * (n + 1)
        assert cert.gap <= 1e-6

    def test_k1_circle_calculus(self, ctx):
        n = 10
        cert = solve_endpoint(RatioProblem(n, 1, ENDPOINT, Weight.CIRCLE), ctx)
        with ctx.workprec():
            expect = mp.sqrt(mpf(n + 1)) * (mpf(n) / (n + 1)) ** (mpf(n) / 2)
            assert abs(cert.value_upper - expect) <= 1e-9 * expect

    def test_k1_variation_equals_endpoint(self, ctx):
        ce = solve_endpoint(RatioProblem(10, 1, ENDPOINT, Weight.UNIT), ctx)
        cv = solve_variation(RatioProblem(10, 1, VARIATION, Weight.UNIT), ctx)
        assert abs(cv.value_upper - ce.value_upper) <= 1e-8 * ce.value_upper


class TestBringUpGoldens:
    @pytest.mark.parametrize("key", sorted(BRING_UP, key=str))
    def test_regression(self, ctx, key):
        denom, n, k, wname = key
        problem = RatioProblem(n, k, denom, Weight(wname))
        if denom == ENDPOINT:
            cert = solve_endpoint(problem, ctx)
        else:
            cert = solve_variation(problem, ctx)
        expect = mpf(BRING_UP[key])
        assert abs(cert.value_upper - expect) <= 2e-6 * expect
        assert cert.gap <= 1e-6


class TestCertificates:
    def test_brackets_and_reproduction(self, ctx):
        cert = solve_endpoint(RatioProblem(40, 2, ENDPOINT, Weight.UNIT), ctx)
        assert cert.value_lower <= cert.value_upper
        assert cert.gap >= 0
        ip = IncompletePolynomial(40, 2, cert.R_opt)
        again = evaluate_ratio(ip, ENDPOINT, Weight.UNIT, ctx)
        assert abs(again - cert.value_upper) <= 1e-10 * cert.value_upper

    def test_variation_reproduction(self, ctx):
        cert = solve_variation(RatioProblem(20, 2, VARIATION, Weight.UNIT), ctx)
        ip = IncompletePolynomial(20, 2, cert.R_opt)
        again = evaluate_ratio(ip, VARIATION, Weight.UNIT, ctx)
        assert abs(again - cert.value_upper) <= 1e-10 * cert.value_upper

    def test_active_points_attain_sup(self, ctx):
        from turanlab.poly import _ipow, derivative_q

        cert = solve_endpoint(RatioProblem(40, 2, ENDPOINT, Weight.UNIT), ctx)
        ip = IncompletePolynomial(40, 2, cert.R_opt)
        q = derivative_q(ip, ctx)
        with ctx.workprec():
            for x in cert.active_points:
                val = abs(_ipow(x, 40) * q(x))
                assert abs(val - cert.value_upper) <= 1e-8 * cert.value_upper

    def test_scale_invariance_of_ratio(self, ctx):
        r = Polynomial((0.4, -0.9, 0.2), CHEB01)
        ip1 = IncompletePolynomial(15, 3, r)
        ip2 = IncompletePolynomial(15, 3, r.scaled(17))
        for denom in (ENDPOINT, VARIATION):
            v1 = evaluate_ratio(ip1, denom, Weight.UNIT, ctx)
            v2 = evaluate_ratio(ip2, denom, Weight.UNIT, ctx)
            assert abs(v1 - v2) <= 1e-12 * v1

    def test_soundness_against_fuzz(self, ctx):
        n, k = 20, 2
        ce = solve_endpoint(RatioProblem(n, k, ENDPOINT, Weight.UNIT), ctx)
        cv = solve_variation(RatioProblem(n, k, VARIATION, Weight.UNIT), ctx)
        rng = np.random.default_rng(0x5EED)
        for _ in range(100):
            r = Polynomial(tuple(mpf(float(c)) for c in rng.uniform(-1, 1, k)), CHEB01)
            if r.is_zero:
                continue
            ip = IncompletePolynomial(n, k, r)
            with ctx.workprec():
                if abs(r(mpf(1))) > 1e-6:
                    re = evaluate_ratio(ip, ENDPOINT, Weight.UNIT, ctx)
                    assert re >= ce.value_lower * (1 - mpf("1e-9"))
                rv = evaluate_ratio(ip, VARIATION, Weight.UNIT, ctx)
                assert rv >= cv.value_lower * (1 - mpf("1e-9"))

    def test_monotone_sandwich(self, ctx):
        for (n, k, w) in ((20, 2, Weight.UNIT), (40, 2, Weight.CIRCLE), (20, 4, Weight.UNIT)):
            ce = solve_endpoint(RatioProblem(n, k, ENDPOINT, w), ctx)
            cv = solve_variation(RatioProblem(n, k, VARIATION, w), ctx)
            assert cv.value_upper <= ce.value_upper * (1 + mpf("1e-9"))

    def test_variation_guard(self, ctx):
        with pytest.raises(ValueError):
            solve_variation(RatioProblem(20, 9, VARIATION, Weight.UNIT), ctx)

    def test_problem_validation(self):
        with pytest.raises(ValueError):
            RatioProblem(0, 1)
        with pytest.raises(ValueError):
            RatioProblem(5, 1, "middle")

    def test_oracle_agreement_recorded(self, ctx):
        cert = solve_variation(RatioProblem(20, 2, VARIATION, Weight.UNIT), ctx)
        assert cert.oracle_value is not None
        assert abs(cert.oracle_value - cert.value_upper) <= 1e-3 * cert.value_upper

    def test_json_shape(self, ctx):
        cert = solve_endpoint(RatioProblem(12, 1, ENDPOINT, Weight.UNIT), ctx)
        d = cert.to_json_dict(ctx)
        assert d["problem"] == {"n": 12, "k": 1, "denominator": "endpoint", "weight": "unit"}
        assert {"value_lower", "value_upper", "gap", "R_opt", "active_points"} <= set(d)


class TestTheoremCheck:
    def test_k1_closed_case(self, ctx):
        rep = theorem_check(12, 1, "2.1", ctx)
        assert rep.theorem_lower == 1
        assert abs(rep.computed.value_upper - 13) <= 1e-8 * 13
        assert abs(rep.witness_ratio - 13) <= 1e-8 * 13
        assert rep.passed and rep.chain_ok and rep.proof_bound_ok

    def test_circle_small(self, ctx):
        rep = theorem_check(36, 4, "2.2", ctx)
        with ctx.workprec():
            assert abs(rep.theorem_lower - mpf("0.5")) < 1e-12
        assert rep.passed and rep.chain_ok and rep.proof_bound_ok
        assert rep.witness_kind == "monomial"

    def test_witness_selection(self, ctx):
        rep = theorem_check(80, 6, "2.1", ctx)
        assert rep.witness_kind == "t-squared"
        assert rep.passed

    def test_unknown_theorem(self, ctx):
        with pytest.raises(ValueError):
            theorem_check(10, 1, "2.3", ctx)
