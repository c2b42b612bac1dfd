"""Chebyshev polynomials of Muntz spaces span{x^nu, ..., x^(nu+kappa)} on [0, 1].

The extremal element T is computed by exchange iteration on kappa+1
reference points: interpolate the alternating values (-1)^i with the
normalization T(1) = 1, relocate the references to the local extrema of T,
and repeat until the extremal values equalize.  The factor x^nu is carried
as a per-row scalar so only bounded shifted-Chebyshev entries reach the
linear solve; raw monomials x^nu..x^(nu+kappa) are numerically collinear
near 1 and would destroy the system long before the iteration failed.
"""

from __future__ import annotations

from dataclasses import dataclass

from mpmath import mp, mpf

from ._linalg import full_pivot_solve
from .errors import InequalityViolation, NonConvergence
from .poly import (
    CHEB01,
    MONOMIAL,
    IncompletePolynomial,
    Polynomial,
    Weight,
    _ipow,
    golden_max,
    sup_norm,
)
from .precision import DEFAULT_CTX, PrecisionContext

EXCHANGE_MAX_ITER = 100
EXCHANGE_REL_RESIDUAL = mpf("1e-10")


@dataclass(frozen=True)
class MuntzChebyshev:
    """Converged equioscillating element, normalized to T(1) = 1.

    coeffs[j] multiplies x^(nu+j); cheb_coeffs[j] multiplies x^nu T_j(2x-1)
    and is the numerically stable representation used for evaluation.
    alternation_points are descending with x_0 = 1; zeros are descending
    and interlace them: zeros[j-1] lies in (x_j, x_{j-1}).
    """

    nu: int
    kappa: int
    coeffs: tuple
    cheb_coeffs: tuple
    alternation_points: tuple
    zeros: tuple
    residual: object
    bits: int = 256

    def _factor(self):
        return Polynomial(self.cheb_coeffs, CHEB01)

    def __call__(self, x):
        # the shifted-Chebyshev coefficients reach x^-nu scale and cancel
        # down to O(1); evaluate at the precision the solve ran at
        with mp.workprec(self.bits):
            x = mpf(x)
            return _ipow(x, self.nu) * self._factor()(x)

    def derivative_value(self, x):
        """T'(x) = x^(nu-1) (nu B(x) + x B'(x)) for the factor B."""
        with mp.workprec(self.bits):
            x = mpf(x)
            b = self._factor()
            db = b.derivative()
            inner = self.nu * b(x) + x * db(x)
            if self.nu == 0:
                return db(x)
            return _ipow(x, self.nu - 1) * inner

    def to_json_dict(self, ctx: PrecisionContext = DEFAULT_CTX):
        return {
            "nu": self.nu,
            "kappa": self.kappa,
            "coeffs": [ctx.dec(c) for c in self.coeffs],
            "alternation_points": [ctx.dec(x) for x in self.alternation_points],
            "zeros": [ctx.dec(z) for z in self.zeros],
            "residual": ctx.dec(self.residual),
        }


@dataclass(frozen=True)
class QnCheckRecord:
    """Zero-location check for the equioscillating (x+1)^(n-k)-type element on [-1,1].

    rhos are the free zeros transferred from the [0,1] solve via rho = 2 beta - 1;
    gammas are the closed-form cosine bounds they must stay below.
    """

    n: int
    k: int
    alphas: tuple
    gammas: tuple
    rhos: tuple
    slacks: tuple


def _bisect_sign_change(f, lo, hi, flo, tol):
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def muntz_chebyshev(nu: int, kappa: int, ctx: PrecisionContext = DEFAULT_CTX):
    """Exchange iteration for the Chebyshev polynomial of span{x^nu..x^(nu+kappa)}."""
    if nu < 0 or kappa < 1 or nu + kappa < 1:
        raise ValueError("require nu >= 0, kappa >= 1, nu + kappa >= 1")
    if kappa > 64:
        raise ValueError("kappa > 64 exceeds the solver guard")
    with ctx.workprec():
        one = mpf(1)
        # cos-spaced references compressed into the oscillation zone near 1.
        # The zone floor 1 - 10 kappa/nu goes negative once kappa/nu is large;
        # exp(-10 kappa/nu) matches it to first order and keeps the x^-nu row
        # scalars representable, and the relocation step (whose last bracket
        # always reaches down to 0) corrects any overshoot on iteration one.
        if nu == 0:
            lo = mpf(0)
        else:
            t10 = mpf(10) * kappa / nu
            lo = max(1 - t10, mp.exp(-t10) / 2)
        refs = []
        for i in range(kappa + 1):
            u = (1 + mp.cos(mp.pi * i / kappa)) / 2
            refs.append(1 - (1 - u) * (1 - lo))
        refs[0] = one

        root_tol = mpf(ctx.root_tol)
        cheb = None
        residual = None

        def solve_at(points):
            dim = kappa + 2
            a = [[mpf(0)] * dim for _ in range(dim)]
            b = [mpf(0)] * dim
            for i, x in enumerate(points):
                row = a[i]
                bvals = _cheb_values(x, kappa)
                for j in range(kappa + 1):
                    row[j] = bvals[j]
                inv_pow = one if nu == 0 else _ipow(x, nu) ** -1
                row[kappa + 1] = -((-1) ** i) * inv_pow
            for j in range(kappa + 1):
                a[kappa + 1][j] = one
            b[kappa + 1] = one
            sol = full_pivot_solve(a, b, ctx.mantissa_bits)
            return tuple(sol[: kappa + 1]), sol[kappa + 1]

        def t_eval_factory(coeffs):
            factor = Polynomial(coeffs, CHEB01)
            return lambda x: _ipow(x, nu) * factor(x)

        for _ in range(EXCHANGE_MAX_ITER):
            cheb, _level = solve_at(refs)
            t = t_eval_factory(cheb)
            zs = []
            for i in range(kappa):
                zlo, zhi = refs[i + 1], refs[i]
                zs.append(_bisect_sign_change(t, zlo, zhi, t(zlo), root_tol))
            new_refs = [one]
            abst = lambda x: abs(t(x))
            for j in range(1, kappa):
                x_j, _ = golden_max(abst, zs[j], zs[j - 1], mpf(ctx.sup_tol))
                new_refs.append(x_j)
            x_last, v_last = golden_max(abst, mpf(0), zs[kappa - 1], mpf(ctx.sup_tol))
            if nu == 0 and abst(mpf(0)) >= v_last:
                x_last = mpf(0)
            new_refs.append(x_last)
            refs = new_refs
            vals = [abs(t(x)) for x in refs]
            vmax, vmin = max(vals), min(vals)
            residual = (vmax - vmin) / vmax
            if residual <= EXCHANGE_REL_RESIDUAL:
                break
        else:
            raise NonConvergence(
                "muntz exchange stalled at residual %s for nu=%d kappa=%d"
                % (mp.nstr(residual, 6), nu, kappa),
                bits=ctx.mantissa_bits,
            )

        t = t_eval_factory(cheb)
        zeros = []
        for i in range(kappa):
            zlo, zhi = refs[i + 1], refs[i]
            zeros.append(_bisect_sign_change(t, zlo, zhi, t(zlo), root_tol))

        norm_scan, _ = sup_norm(t, (0, 1), Weight.UNIT, ctx)
        norm = max([norm_scan] + [abs(t(x)) for x in refs])
        final_residual = max(abs(abs(t(x)) - norm) for x in refs)

        mono = Polynomial(cheb, CHEB01).to_monomial()
        coeffs = list(mono.coeffs) + [mpf(0)] * (kappa + 1 - len(mono.coeffs))
        return MuntzChebyshev(
            nu=nu,
            kappa=kappa,
            coeffs=tuple(coeffs),
            cheb_coeffs=tuple(cheb),
            alternation_points=tuple(refs),
            zeros=tuple(zeros),
            residual=final_residual,
            bits=ctx.mantissa_bits,
        )


def _cheb_values(x, deg):
    """T_j(2x - 1) for j = 0..deg by the three-term recurrence."""
    t = 2 * mpf(x) - 1
    vals = [mpf(1)]
    if deg >= 1:
        vals.append(t)
    for _ in range(1, deg):
        vals.append(2 * t * vals[-1] - vals[-2])
    return vals


def zero_bound_check(mc: MuntzChebyshev, ctx: PrecisionContext = DEFAULT_CTX):
    """Slack values (1 - beta_j) (nu+kappa) kappa / j^2; all must be positive."""
    with ctx.workprec():
        scale = mpf((mc.nu + mc.kappa) * mc.kappa)
        return [
            (1 - beta) * scale / ((j + 1) ** 2) for j, beta in enumerate(mc.zeros)
        ]


def t_squared_integral(mc: MuntzChebyshev, ctx: PrecisionContext = DEFAULT_CTX):
    """Exact-in-precision integral of T^2 over [0, 1] by coefficient convolution.

    T^2 has exponents 2 nu .. 2 nu + 2 kappa; heavy cancellation among the
    convolution terms is the reason the whole pipeline runs in extended
    precision.
    """
    with ctx.workprec():
        t = mc.coeffs
        kk = mc.kappa
        total = mpf(0)
        for m in range(2 * kk + 1):
            conv = mpf(0)
            for i in range(max(0, m - kk), min(kk, m) + 1):
                conv += t[i] * t[m - i]
            total += conv / (2 * mc.nu + m + 1)
        return total


def qn_gamma_check(n: int, k: int, ctx: PrecisionContext = DEFAULT_CTX):
    """Transfer the zeros of the [0,1] solve to [-1,1] and compare with the cosine bounds.

    The equioscillating element q(x) = (x+1)^(n-k) prod(x - rho_j) on [-1,1]
    maps under x = 2u - 1 to a multiple of the Muntz-Chebyshev element for
    span{u^(n-k), ..., u^n}, so rho_j = 2 beta_j - 1 without ever forming
    the overflowing (x+1)^(n-k) factor.
    """
    m = n - 2 * k
    if k < 1 or m < 1:
        raise ValueError("require k >= 1 and n - 2k >= 1")
    with ctx.workprec():
        mk = mpf(m) / k
        alphas = [1 + mp.cos(mp.pi * (2 * j - 1) / (4 * k)) for j in range(1, k + 1)]
        gammas = [(a - (1 - mk)) / (1 + mk) for a in alphas]
        for g0, g1 in zip(gammas, gammas[1:]):
            if not g0 > g1:
                raise InequalityViolation("gamma ordering failed for n=%d k=%d" % (n, k))
        if not (gammas[0] < 1 and gammas[-1] > 0):
            raise InequalityViolation("gamma range failed for n=%d k=%d" % (n, k))
        mc = muntz_chebyshev(n - k, k, ctx)
        rhos = [2 * b - 1 for b in mc.zeros]
        slacks = [g - r for g, r in zip(gammas, rhos)]
        return QnCheckRecord(
            n=n,
            k=k,
            alphas=tuple(alphas),
            gammas=tuple(gammas),
            rhos=tuple(rhos),
            slacks=tuple(slacks),
        )


def witness_upper(n: int, k: int, w: Weight, ctx: PrecisionContext = DEFAULT_CTX):
    """Upper-bound witness P(x) = integral of T^2 from 0 to x, with its ratio.

    Returns (ip, ratio) where ratio = sup |P' w| / P(1).  P has a zero of
    order n+1 at 0 and degree n+k-1, and P' = T^2 exactly, so the unit
    weight numerator is sup T^2 = 1 up to the converged residual.
    """
    if n % 2 or k % 2 or k < 6:
        raise ValueError("witness requires even n, even k >= 6")
    nu, kap = n // 2, (k - 2) // 2
    if 20 * kap > nu:
        raise ValueError("witness requires 20 (k-2)/2 <= n/2")
    with ctx.workprec():
        mc = muntz_chebyshev(nu, kap, ctx)
        t = mc.coeffs
        r_coeffs = []
        for m in range(2 * kap + 1):
            conv = mpf(0)
            for i in range(max(0, m - kap), min(kap, m) + 1):
                conv += t[i] * t[m - i]
            r_coeffs.append(conv / (2 * nu + m + 1))
        ip = IncompletePolynomial(n=n, k=k, R=Polynomial(tuple(r_coeffs), MONOMIAL))
        denom = sum(r_coeffs)  # P(1) = integral of T^2
        numer, _ = sup_norm(lambda x: mc(x) ** 2, (0, 1), w, ctx)
        return ip, numer / denom


def monomial_witness(n: int, k: int, w: Weight, ctx: PrecisionContext = DEFAULT_CTX):
    """Fallback witness P(x) = x^(n+1); ratio = sup |(n+1) x^n w(x)|."""
    with ctx.workprec():
        ip = IncompletePolynomial(n=n, k=k, R=Polynomial((mpf(1),), MONOMIAL))
        numer, _ = sup_norm(lambda x: (n + 1) * _ipow(x, n), (0, 1), w, ctx)
        return ip, numer
