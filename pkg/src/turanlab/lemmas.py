"""Property checks for the growth/decay inequalities and constant estimation.

Every check reduces to a margin: the ratio of the quantity being bounded to
its claimed bound.  The bounded inequalities must come out <= 1 on any
input (a violation means a solver or precision bug, not new mathematics);
the restricted-zero derivative check has an unknown absolute constant, so
its sweep maximum is reported as the empirical estimate instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .errors import InequalityViolation, ZeroRestrictionError
from .muntz import MuntzChebyshev, muntz_chebyshev
from .poly import (
    CHEB01,
    MONOMIAL,
    Polynomial,
    Weight,
    _ipow,
    sup_norm,
)
from .precision import DEFAULT_CTX, PrecisionContext

DEFAULT_SEED = 0x5EED
MARGIN_TOL = 1e-10

BOUNDED_LEMMAS = ("3.1", "3.2", "3.4", "3.5", "4.1")
ALL_LEMMAS = BOUNDED_LEMMAS + ("3.6",)


@dataclass
class LemmaReport:
    lemma_id: str
    trials: int
    worst_margin: object
    worst_case: dict
    bounded: bool = True

    @property
    def passed(self):
        if not self.bounded:
            return bool(self.worst_margin >= 0)
        return bool(self.worst_margin <= 1 + MARGIN_TOL)

    def to_json_dict(self, ctx: PrecisionContext = DEFAULT_CTX):
        return {
            "lemma": self.lemma_id,
            "trials": self.trials,
            "worst_margin": ctx.dec(self.worst_margin),
            "worst_case": self.worst_case,
            "pass": self.passed,
        }


@dataclass
class FBoundRecord:
    n: int
    k: int
    f_at_edge: object
    cap: object
    monotone_ok: bool


@dataclass
class ConstantEstimates:
    c1_endpoint_hat: object
    c1_sqrt_hat: object
    c2_hat: object
    c2_sqrt_hat: object
    c3_hat: object
    c4_hat: object
    c5_hat: object

    def to_json_dict(self, ctx: PrecisionContext = DEFAULT_CTX):
        out = {}
        for name in ("c1_endpoint_hat", "c1_sqrt_hat", "c2_hat", "c2_sqrt_hat",
                     "c3_hat", "c4_hat", "c5_hat"):
            v = getattr(self, name)
            out[name] = None if v is None else ctx.dec(v)
        return out


def check_growth(q: Polynomial, k: int, a, b, xs, ctx: PrecisionContext = DEFAULT_CTX):
    """Margin of |Q(x)| against |(4x - 2(a+b))/(b-a)|^k sup_[a,b]|Q| outside (a, b)."""
    with ctx.workprec():
        a, b = mpf(a), mpf(b)
        if not a < b:
            raise ValueError("need a < b")
        if q.degree > k:
            raise ValueError("degree of Q exceeds k")
        norm, _ = sup_norm(q, (a, b), Weight.UNIT, ctx)
        worst = mpf(0)
        worst_x = None
        for x in xs:
            x = mpf(x)
            if a < x < b:
                raise ValueError("sample point inside (a, b)")
            bound = abs((4 * x - 2 * (a + b)) / (b - a)) ** k
            margin = abs(q(x)) / (bound * norm)
            if margin > worst:
                worst, worst_x = margin, x
        return LemmaReport(
            lemma_id="3.2" if (a, b) != (mpf(-1), mpf(1)) else "3.1",
            trials=len(list(xs)),
            worst_margin=worst,
            worst_case={
                "coeffs": [float(c) for c in q.coeffs],
                "basis": q.basis,
                "a": float(a),
                "b": float(b),
                "k": k,
                "x": None if worst_x is None else float(worst_x),
            },
        )


def check_decay(n: int, k: int, factor: Polynomial, weight: Weight,
                ctx: PrecisionContext = DEFAULT_CTX, grid=2049):
    """Margin of |S(x)| against x^(n/2) sup|S| on [0, 1 - 10k/n].

    S = x^n factor(x) for the unit weight (deg factor <= k) and
    S = x^n factor(x) sqrt(1-x^2) for the circle weight (deg factor <= k-1).
    An empty region is a vacuous pass.
    """
    if n < 1 or k < 1:
        raise ValueError("n, k >= 1 required")
    cap = k if weight is Weight.UNIT else k - 1
    if factor.degree > cap:
        raise ValueError("factor degree exceeds the class bound")
    with ctx.workprec():
        edge = 1 - mpf(10) * k / n
        case = {
            "n": n,
            "k": k,
            "weight": weight.value,
            "coeffs": [float(c) for c in factor.coeffs],
            "basis": factor.basis,
        }
        if edge <= 0:
            return LemmaReport("3.4" if weight is Weight.UNIT else "3.5", 0,
                               mpf(0), dict(case, vacuous=True))
        s = lambda x: _ipow(x, n) * factor(x) * weight(x)
        norm, _ = sup_norm(lambda x: _ipow(x, n) * factor(x), (0, 1), weight, ctx)
        if norm == 0:
            return LemmaReport("3.4" if weight is Weight.UNIT else "3.5", 0,
                               mpf(0), dict(case, zero=True))
        worst = mpf(0)
        worst_x = None
        for i in range(1, grid + 1):
            x = edge * i / grid
            margin = abs(s(x)) / (_ipow(mp.sqrt(x), n) * norm)
            if margin > worst:
                worst, worst_x = margin, x
        case["x"] = None if worst_x is None else float(worst_x)
        return LemmaReport(
            lemma_id="3.4" if weight is Weight.UNIT else "3.5",
            trials=grid,
            worst_margin=worst,
            worst_case=case,
        )


def f_bound_check(n: int, k: int, ctx: PrecisionContext = DEFAULT_CTX, samples=64):
    """Edge value of f(x) = x^(n/2) ((4-4x)/(k/n))^k (1-k/n)^(-n) against (40/e^4)^k.

    Also verifies by first differences that f increases on [0, 1 - 2k/n].
    """
    with ctx.workprec():
        if 1 - mpf(10) * k / n < 0:
            raise ValueError("need 10k <= n")
        delta = mpf(k) / n

        def f(x):
            return (_ipow(mp.sqrt(x), n) * ((4 - 4 * x) / delta) ** k
                    * (1 - delta) ** (-n))

        edge = 1 - mpf(10) * k / n
        f_edge = f(edge) if edge > 0 else mpf(0)
        cap = (mpf(40) / mp.exp(4)) ** k
        hi = 1 - mpf(2) * k / n
        prev = f(mpf(0))
        monotone = True
        for i in range(1, samples + 1):
            cur = f(hi * i / samples)
            if cur < prev * (1 - mpf("1e-20")):
                monotone = False
                break
            prev = cur
        return FBoundRecord(n=n, k=k, f_at_edge=f_edge, cap=cap, monotone_ok=monotone)


def disk_zero_count(p: Polynomial, ctx: PrecisionContext = DEFAULT_CTX, nodes=1024):
    """Zeros of p inside the open disk with diameter (0, 1), by winding number.

    Trapezoidal quadrature of p'/p over the circle |z - 1/2| = 1/2; rejects
    inputs whose boundary values make the count ambiguous.
    """
    with ctx.workprec():
        dp = p.derivative()
        center, radius = mpf(1) / 2, mpf(1) / 2
        acc = mp.mpc(0)
        min_ratio = None
        for j in range(nodes):
            theta = 2 * mp.pi * j / nodes
            e = mp.expjpi(2 * mpf(j) / nodes)
            z = center + radius * e
            pz = p(z)
            apz = abs(pz)
            if min_ratio is None or apz < min_ratio:
                min_ratio = apz
            if apz == 0:
                raise ZeroRestrictionError("zero on the disk boundary")
            acc += dp(z) / pz * e
        count = acc * radius / nodes
        n_real = mp.re(count)
        n_int = int(mp.nint(n_real))
        if abs(n_real - n_int) > 0.1 or abs(mp.im(count)) > 0.1:
            raise ZeroRestrictionError(
                "winding number %s is not close to an integer" % mp.nstr(count, 8))
        return n_int


def check_bernstein_restricted(p, nu: int, kappa: int,
                               ctx: PrecisionContext = DEFAULT_CTX):
    """sup |P'(x)| sqrt(x(1-x)/((nu+kappa) kappa)) / sup |P| for restricted-zero P.

    Accepts a MuntzChebyshev (whose kappa real zeros all lie in the disk,
    meeting the bound 'at most kappa') or a Polynomial factor R with
    P = x^nu R, which is admitted only after the winding-number count of R
    over the disk comes back zero.
    """
    with ctx.workprec():
        if isinstance(p, MuntzChebyshev):
            if (p.nu, p.kappa) != (nu, kappa):
                raise ValueError("nu/kappa mismatch")
            f = p
            df = p.derivative_value
        else:
            if p.degree > kappa:
                raise ValueError("factor degree exceeds kappa")
            if disk_zero_count(p, ctx) != 0:
                raise ZeroRestrictionError("factor has zeros in the open disk")
            dr = p.derivative()

            def f(x):
                return _ipow(x, nu) * p(x)

            def df(x):
                if nu == 0:
                    return dr(x)
                return _ipow(x, nu - 1) * (nu * p(x) + x * dr(x))

        scale = mp.sqrt(mpf((nu + kappa) * kappa))
        g = lambda x: abs(df(x)) * mp.sqrt(x * (1 - x)) / scale
        num, _ = sup_norm(g, (0, 1), Weight.UNIT, ctx)
        den, _ = sup_norm(f, (0, 1), Weight.UNIT, ctx)
        if den == 0:
            return mpf(0)
        return num / den


def _random_poly(rng, degree, lo=-1.0, hi=1.0):
    return Polynomial(tuple(mpf(float(c)) for c in rng.uniform(lo, hi, degree + 1)),
                      CHEB01)


def _corner_polys(degree):
    out = []
    unit = [mpf(0)] * (degree + 1)
    unit[degree] = mpf(1)
    out.append(Polynomial(tuple(unit), CHEB01))      # top shifted-Chebyshev
    mono = [mpf(0)] * (degree + 1)
    mono[degree] = mpf(1)
    out.append(Polynomial(tuple(mono), MONOMIAL))    # bare monomial
    return out


_SUITE_KEYS = {"3.1": 1, "3.2": 2, "3.4": 4, "3.5": 5, "3.6": 6, "4.1": 41}


def run_lemma_suite(lemma_id: str, trials: int = 200, seed: int = DEFAULT_SEED,
                    ctx: PrecisionContext = DEFAULT_CTX):
    """Seeded randomized suite for one inequality; returns the merged report."""
    if lemma_id not in _SUITE_KEYS:
        raise ValueError("unknown lemma id %r" % lemma_id)
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                       spawn_key=(_SUITE_KEYS[lemma_id],)))
    worst = mpf(0)
    worst_case = {}
    count = 0

    def absorb(report_margin, case):
        nonlocal worst, worst_case, count
        count += 1
        if report_margin > worst:
            worst, worst_case = report_margin, case

    if lemma_id == "3.1":
        xs = [mpf("-1.01"), mpf("1.01"), mpf(-2), mpf(2), mpf(-10), mpf(10)]
        pool = _corner_polys(6) + [_random_poly(rng, int(rng.integers(1, 7)))
                                   for _ in range(trials - 2)]
        for q in pool:
            rep = check_growth(q, max(q.degree, 1), -1, 1, xs, ctx)
            absorb(rep.worst_margin, rep.worst_case)
    elif lemma_id == "3.2":
        for t in range(trials):
            a = mpf(float(rng.uniform(-2.0, 0.8)))
            b = a + mpf(float(rng.uniform(0.5, 2.0)))
            q = _random_poly(rng, int(rng.integers(1, 7)))
            span = b - a
            xs = [a - span * mpf("0.01"), a - 1, a - 5, b + span * mpf("0.01"), b + 1, b + 5]
            rep = check_growth(q, max(q.degree, 1), a, b, xs, ctx)
            absorb(rep.worst_margin, rep.worst_case)
    elif lemma_id in ("3.4", "3.5"):
        weight = Weight.UNIT if lemma_id == "3.4" else Weight.CIRCLE
        for t in range(trials):
            n = int(rng.integers(12, 121))
            k = int(rng.integers(1, 7))
            cap = k if weight is Weight.UNIT else max(k - 1, 0)
            factor = _random_poly(rng, cap) if cap >= 1 else Polynomial(
                (mpf(float(rng.uniform(-1, 1))),), CHEB01)
            rep = check_decay(n, k, factor, weight, ctx, grid=257)
            absorb(rep.worst_margin, rep.worst_case)
    elif lemma_id == "4.1":
        for t in range(trials):
            k = int(rng.integers(1, 7))
            n = int(rng.integers(10 * k, 12 * k + 120))
            rec = f_bound_check(n, k, ctx)
            if not rec.monotone_ok or rec.cap > 1:
                absorb(mpf(2), {"n": n, "k": k, "monotone": rec.monotone_ok})
            else:
                absorb(rec.f_at_edge / rec.cap, {"n": n, "k": k})
    elif lemma_id == "3.6":
        for t in range(trials):
            if t % 2 == 0:
                kap = int(rng.integers(1, 5))
                nu = int(rng.integers(max(kap + 1, 4), 80))
                mc = muntz_chebyshev(nu, kap, ctx)
                ratio = check_bernstein_restricted(mc, nu, kap, ctx)
                absorb(ratio, {"kind": "muntz", "nu": nu, "kappa": kap})
            else:
                kap = int(rng.integers(1, 5))
                nu = int(rng.integers(0, 40))
                r = _clean_disk_factor(rng, kap, ctx)
                ratio = check_bernstein_restricted(r, nu, kap, ctx)
                absorb(ratio, {"kind": "power", "nu": nu, "kappa": kap,
                               "coeffs": [float(c) for c in r.coeffs]})
    else:
        raise ValueError("unknown lemma id %r" % lemma_id)

    return LemmaReport(lemma_id=lemma_id, trials=count, worst_margin=worst,
                       worst_case=worst_case, bounded=lemma_id != "3.6")


def _clean_disk_factor(rng, degree, ctx, attempts=50):
    """Random real polynomial with no zeros in the disk, verified before use."""
    for _ in range(attempts):
        roots = []
        while len(roots) < degree:
            if degree - len(roots) >= 2 and rng.random() < 0.4:
                re = float(rng.uniform(-1.5, 2.5))
                im = float(rng.uniform(0.8, 2.5))
                roots.append(complex(re, im))
                roots.append(complex(re, -im))
            else:
                side = rng.random() < 0.5
                roots.append(float(rng.uniform(-2.5, -0.3)) if side
                             else float(rng.uniform(1.3, 3.5)))
        coeffs = np.poly(np.array(roots)).real[::-1]
        p = Polynomial(tuple(mpf(float(c)) for c in coeffs), MONOMIAL)
        try:
            if disk_zero_count(p, ctx) == 0:
                return p
        except ZeroRestrictionError:
            continue
    raise ZeroRestrictionError("could not draw a verified disk-free factor")


def estimate_constants(theorem_rows, bernstein_ratios=(), zero_slacks=(),
                       t2_ratios=(), ctx: PrecisionContext = DEFAULT_CTX):
    """Aggregate sweep extremes into the empirical absolute constants.

    theorem_rows: SandwichReport-like records carrying n, k, theorem, the
    computed certificate and the endpoint certificate.  The two lower-bound
    estimates are checked against 1/12 and 1/6, which must remain valid.
    """
    rows = list(theorem_rows)
    if not (rows or bernstein_ratios or zero_slacks or t2_ratios):
        raise ValueError("empty sweep")
    with ctx.workprec():
        c1_lin, c1_sqrt, c2_lin, c2_sqrt = None, None, None, None
        for row in rows:
            n, k = row.n, row.k
            phi = mpf(n) / k
            if row.theorem == "2.1":
                v = row.computed.value_lower / phi
                c1_lin = v if c1_lin is None else min(c1_lin, v)
                u = row.endpoint.value_upper / (phi + 1)
                c2_lin = u if c2_lin is None else max(c2_lin, u)
            else:
                v = row.computed.value_lower / mp.sqrt(phi)
                c1_sqrt = v if c1_sqrt is None else min(c1_sqrt, v)
                u = row.endpoint.value_upper / mp.sqrt(phi + 1)
                c2_sqrt = u if c2_sqrt is None else max(c2_sqrt, u)
        c3 = max(bernstein_ratios) if bernstein_ratios else None
        c4 = min(zero_slacks) if zero_slacks else None
        c5 = min(t2_ratios) if t2_ratios else None
        if c1_lin is not None and c1_lin < mpf(1) / 12:
            raise InequalityViolation("empirical c1 fell below 1/12: %s" % c1_lin)
        if c1_sqrt is not None and c1_sqrt < mpf(1) / 6:
            raise InequalityViolation("empirical sqrt c1 fell below 1/6: %s" % c1_sqrt)
        for name, v in (("c3", c3), ("c4", c4), ("c5", c5)):
            if v is not None and not v > 0:
                raise InequalityViolation("%s estimate is not positive" % name)
        return ConstantEstimates(
            c1_endpoint_hat=c1_lin,
            c1_sqrt_hat=c1_sqrt,
            c2_hat=c2_lin,
            c2_sqrt_hat=c2_sqrt,
            c3_hat=c3,
            c4_hat=c4,
            c5_hat=c5,
        )
