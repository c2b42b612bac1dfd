"""Extended-precision polynomials and incomplete polynomials on [0, 1].

Two coefficient bases are supported: plain monomials, and the shifted
Chebyshev basis T_j(2x - 1), which keeps linear algebra well conditioned
near x = 1 where everything in this problem class concentrates.

An incomplete polynomial is the pair (n, R) representing
P(x) = x^(n+1) R(x) with deg R <= k - 1.  Its derivative factors as
P'(x) = x^n Q(x) with Q(x) = (n+1) R(x) + x R'(x), so the degree-(k-1)
factor Q is the only polynomial that ever needs root solving.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

from mpmath import mp, mpf

from .errors import EvenOrderRootWarning
from .precision import DEFAULT_CTX, PrecisionContext

MONOMIAL = "monomial"
CHEB01 = "shifted-chebyshev-[0,1]"

NEG_INF = float("-inf")

ROOT_DEGREE_GUARD = 64


class Weight(Enum):
    """Weight attached to the derivative sup-norm: 1 or sqrt(1 - x^2)."""

    UNIT = "unit"
    CIRCLE = "circle"

    def __call__(self, x):
        if self is Weight.UNIT:
            return mpf(1)
        s = 1 - x * x
        if s <= 0:
            return mpf(0)
        return mp.sqrt(s)


def _ipow(x, n):
    """x**n for integer n >= 0 by binary powering at the ambient precision."""
    if n == 0:
        return mpf(1)
    y = mpf(1)
    b = mpf(x)
    e = int(n)
    while e:
        if e & 1:
            y = y * b
        b = b * b
        e >>= 1
    return y


def _shifted_cheb_monomial_rows(deg):
    """Monomial coefficient rows of T_j(2x - 1) for j = 0..deg (exact integers)."""
    rows = [[mpf(1)]]
    if deg >= 1:
        rows.append([mpf(-1), mpf(2)])
    for j in range(1, deg):
        prev, cur = rows[j - 1], rows[j]
        nxt = [mpf(0)] * (j + 2)
        for m, c in enumerate(cur):
            nxt[m] += -2 * c
            nxt[m + 1] += 4 * c
        for m, c in enumerate(prev):
            nxt[m] -= c
        rows.append(nxt)
    return rows


@dataclass(frozen=True)
class Polynomial:
    """Dense real polynomial: coeffs[j] multiplies basis element of degree j."""

    coeffs: tuple
    basis: str = MONOMIAL

    def __post_init__(self):
        if self.basis not in (MONOMIAL, CHEB01):
            raise ValueError("unknown basis %r" % (self.basis,))
        cs = []
        for c in self.coeffs:
            if isinstance(c, mpf):
                cs.append(c)  # never re-round an existing mpf
            elif isinstance(c, int):
                with mp.workprec(max(mp.prec, c.bit_length() + 8)):
                    cs.append(mpf(c))
            else:
                cs.append(mpf(c))
        if not cs:
            raise ValueError("coeffs must be nonempty")
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self):
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return NEG_INF
        return len(self.coeffs) - 1

    @property
    def is_zero(self):
        return self.degree == NEG_INF

    def __call__(self, x):
        x = mp.mpmathify(x)
        if self.basis == MONOMIAL:
            acc = mpf(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        # Clenshaw recurrence in t = 2x - 1
        t = 2 * x - 1
        b1 = b2 = mpf(0)
        t2 = 2 * t
        for c in reversed(self.coeffs[1:]):
            b1, b2 = t2 * b1 - b2 + c, b1
        return t * b1 - b2 + self.coeffs[0]

    def scaled(self, c):
        return Polynomial(tuple(mpf(c) * a for a in self.coeffs), self.basis)

    def to_monomial(self):
        if self.basis == MONOMIAL:
            return self
        d = len(self.coeffs) - 1
        rows = _shifted_cheb_monomial_rows(d)
        out = [mpf(0)] * (d + 1)
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            for m, r in enumerate(rows[j]):
                out[m] += c * r
        return Polynomial(tuple(out), MONOMIAL)

    def to_cheb01(self):
        if self.basis == CHEB01:
            return self
        work = list(self.coeffs)
        d = len(work) - 1
        rows = _shifted_cheb_monomial_rows(d)
        out = [mpf(0)] * (d + 1)
        for j in range(d, 0, -1):
            lead = rows[j][j]  # 2^(2j-1)
            c = work[j] / lead
            out[j] = c
            for m, r in enumerate(rows[j]):
                work[m] -= c * r
        out[0] = work[0]
        return Polynomial(tuple(out), CHEB01)

    def derivative(self):
        mono = self.to_monomial()
        if mono.degree <= 0:
            return Polynomial((mpf(0),), self.basis)
        der = tuple(m * c for m, c in enumerate(mono.coeffs) if m >= 1)
        p = Polynomial(der, MONOMIAL)
        return p if self.basis == MONOMIAL else p.to_cheb01()

    def to_json_dict(self, ctx: PrecisionContext = DEFAULT_CTX):
        deg = self.degree
        return {
            "basis": self.basis,
            "coeffs": [ctx.dec(c) for c in self.coeffs],
            "degree": None if deg == NEG_INF else int(deg),
        }

    @classmethod
    def from_json_dict(cls, d, ctx: PrecisionContext = DEFAULT_CTX):
        with ctx.workprec():
            coeffs = tuple(mpf(s) for s in d["coeffs"])
        return cls(coeffs, d["basis"])


@dataclass(frozen=True)
class IncompletePolynomial:
    """P(x) = x^(n+1) R(x), a polynomial with a forced zero of order n+1 at 0."""

    n: int
    k: int
    R: Polynomial

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be >= 1")
        if self.R.degree != NEG_INF and self.R.degree > self.k - 1:
            raise ValueError("deg R = %s exceeds k - 1 = %d" % (self.R.degree, self.k - 1))

    @property
    def degree(self):
        if self.R.is_zero:
            return NEG_INF
        return self.n + 1 + self.R.degree


def eval_poly(p: Polynomial, x, ctx: PrecisionContext = DEFAULT_CTX):
    """Value of p at x in its declared basis (Horner or Clenshaw)."""
    with ctx.workprec():
        return p(mpf(x))


def incomplete_eval(ip: IncompletePolynomial, x, ctx: PrecisionContext = DEFAULT_CTX):
    """x^(n+1) R(x) for x in [0, 1]; the power uses binary powering."""
    with ctx.workprec():
        x = mpf(x)
        if x < 0 or x > 1:
            raise ValueError("incomplete polynomials are evaluated on [0, 1] only")
        if x == 0:
            return mpf(0)
        return _ipow(x, ip.n + 1) * ip.R(x)


def derivative_q(ip: IncompletePolynomial, ctx: PrecisionContext = DEFAULT_CTX):
    """The factor Q with P'(x) = x^n Q(x): Q = (n+1) R + x R'.

    In monomial coordinates this is a diagonal rescale, q_m = (n+1+m) r_m.
    """
    with ctx.workprec():
        r = ip.R.to_monomial()
        q = tuple((ip.n + 1 + m) * c for m, c in enumerate(r.coeffs))
        return Polynomial(q, MONOMIAL)


def chebyshev_points(a, b, count):
    """count points of a Chebyshev distribution on [a, b], ascending, endpoints included."""
    a, b = mpf(a), mpf(b)
    mid, half = (a + b) / 2, (b - a) / 2
    pts = [mid - half * mp.cos(mp.pi * i / (count - 1)) for i in range(count)]
    pts[0], pts[-1] = a, b
    return pts


def golden_max(g, lo, hi, rel_tol, span=None):
    """Golden-section maximizer of a unimodal g on [lo, hi]; returns (x, g(x))."""
    lo, hi = mpf(lo), mpf(hi)
    if span is None:
        span = hi - lo
    invphi = (mp.sqrt(5) - 1) / 2
    invphi2 = (3 - mp.sqrt(5)) / 2
    h = hi - lo
    x1 = lo + invphi2 * h
    x2 = lo + invphi * h
    f1, f2 = g(x1), g(x2)
    while h > rel_tol * span:
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            h = hi - lo
            x1 = lo + invphi2 * h
            f1 = g(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            h = hi - lo
            x2 = lo + invphi * h
            f2 = g(x2)
    if f1 >= f2:
        return x1, f1
    return x2, f2


def sup_norm(f, interval, w: Weight = Weight.UNIT, ctx: PrecisionContext = DEFAULT_CTX,
             scan_points=2049):
    """Sup of |f(x) w(x)| over [a, b] with the argmax.

    A Chebyshev-distributed scan brackets every local peak; each bracket is
    polished by golden-section ascent until its width falls below
    ctx.sup_tol relative to the interval, and the best peak wins.
    """
    a, b = interval
    with ctx.workprec():
        a, b = mpf(a), mpf(b)
        if not a < b:
            raise ValueError("interval must satisfy a < b")
        xs = chebyshev_points(a, b, scan_points)
        g = lambda x: abs(f(x) * w(x))
        vals = [g(x) for x in xs]
        best_v = mpf(0)
        best_x = xs[0]
        m = len(xs)
        for i in range(m):
            v = vals[i]
            left = vals[i - 1] if i > 0 else v - 1
            right = vals[i + 1] if i < m - 1 else v - 1
            if v < left or v < right:
                continue
            lo = xs[i - 1] if i > 0 else xs[0]
            hi = xs[i + 1] if i < m - 1 else xs[-1]
            if lo == hi:
                x_ref, v_ref = xs[i], v
            else:
                x_ref, v_ref = golden_max(g, lo, hi, mpf(ctx.sup_tol), span=b - a)
            if v_ref < v:
                x_ref, v_ref = xs[i], v
            if v_ref > best_v:
                best_v, best_x = v_ref, x_ref
        return best_v, best_x


def _bisect_root(q, lo, hi, flo, tol):
    """Bisection for a sign change of q bracketed by [lo, hi]."""
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = q(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def real_roots(q: Polynomial, ctx: PrecisionContext = DEFAULT_CTX, interval=(0, 1)):
    """All sign-change roots of q in the open interval, sorted ascending.

    Roots are bracketed on a refined scan grid and polished by bisection to
    ctx.root_tol.  Even-order roots produce no sign change; a derivative
    sign check flags the suspects with an EvenOrderRootWarning.
    """
    deg = q.degree
    if deg == NEG_INF:
        raise ValueError("cannot root-solve the zero polynomial")
    if deg > ROOT_DEGREE_GUARD:
        raise ValueError("degree %d exceeds the root-solver guard %d" % (deg, ROOT_DEGREE_GUARD))
    with ctx.workprec():
        lo, hi = mpf(interval[0]), mpf(interval[1])
        tol = mpf(ctx.root_tol)
        if deg <= 0:
            return []
        n0 = max(128, 16 * int(deg))
        xs = [lo + (hi - lo) * i / n0 for i in range(n0 + 1)]
        vals = [q(x) for x in xs]
        scale = max(abs(v) for v in vals)
        if scale == 0:
            return []

        def brackets(points, values):
            found = []
            for i in range(len(points) - 1):
                v0, v1 = values[i], values[i + 1]
                if v0 == 0:
                    if lo < points[i] < hi:
                        found.append((points[i], points[i], v0))
                    continue
                if v1 == 0:
                    continue
                if (v0 > 0) != (v1 > 0):
                    found.append((points[i], points[i + 1], v0))
            return found

        work = brackets(xs, vals)
        # refine cells that dip close to zero without crossing: close root pairs
        refined = []
        for i in range(n0):
            v0, v1 = vals[i], vals[i + 1]
            if (v0 > 0) == (v1 > 0) and min(abs(v0), abs(v1)) < scale * mpf("1e-2"):
                sub = [xs[i] + (xs[i + 1] - xs[i]) * j / 32 for j in range(33)]
                refined.extend(brackets(sub, [q(x) for x in sub]))
        work.extend(refined)

        roots = []
        for blo, bhi, flo in work:
            r = blo if blo == bhi else _bisect_root(q, blo, bhi, flo, tol)
            if lo < r < hi and all(abs(r - s) > 4 * tol for s in roots):
                roots.append(r)
        roots.sort()

        # flag possible even-order roots: critical points where q nearly
        # vanishes without a sign change (informational; they carry no
        # variation, see the total_variation contract)
        dq = q.derivative()
        flag_tol = scale * max(mpf(2) ** (-(ctx.mantissa_bits - 16)), tol * tol * mpf(1e8))
        if dq.degree != NEG_INF and dq.degree >= 1:
            dvals = [dq(x) for x in xs]
            for i in range(n0):
                d0, d1 = dvals[i], dvals[i + 1]
                if d0 == 0 or (d0 > 0) == (d1 > 0):
                    continue
                t = _bisect_root(dq, xs[i], xs[i + 1], d0, tol)
                if not (lo < t < hi):
                    continue
                near = any(abs(t - r) < mpf("1e-6") * (hi - lo) for r in roots)
                if not near and abs(q(t)) < flag_tol:
                    warnings.warn(
                        "possible even-order root of Q near x=%s skipped by sign scan" % mp.nstr(t, 12),
                        EvenOrderRootWarning,
                    )
        return roots


def total_variation(ip: IncompletePolynomial, ctx: PrecisionContext = DEFAULT_CTX):
    """V_0^1(P) as the telescoped |P| increments between critical points.

    P' = x^n Q is sign-definite times Q on (0, 1), so the only interior
    sign changes of P' are the odd-order roots of Q.
    """
    with ctx.workprec():
        if ip.R.is_zero:
            return mpf(0)
        q = derivative_q(ip, ctx)
        pts = [mpf(0)]
        if q.degree >= 1:
            pts.extend(real_roots(q, ctx))
        pts.append(mpf(1))
        v = mpf(0)
        prev = mpf(0)  # P(0) = 0 since n >= 1
        for t in pts[1:]:
            cur = incomplete_eval(ip, t, ctx)
            v += abs(cur - prev)
            prev = cur
        return v


def poly_to_json(p: Polynomial, ctx: PrecisionContext = DEFAULT_CTX):
    return p.to_json_dict(ctx)


def poly_from_json(d, ctx: PrecisionContext = DEFAULT_CTX):
    return Polynomial.from_json_dict(d, ctx)
