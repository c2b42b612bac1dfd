"""Working-precision control for every numerical routine in the package.

All arithmetic is done with mpmath binary floats.  A PrecisionContext fixes
the mantissa width and the two refinement tolerances; routines wrap their
bodies in ``ctx.workprec()`` so the ambient mpmath precision never leaks in.
"""

from dataclasses import dataclass

from mpmath import mp, mpf

DEFAULT_BITS = 256


@dataclass(frozen=True)
class PrecisionContext:
    """Mantissa width plus refinement tolerances.

    mantissa_bits: binary working precision (>= 64).
    sup_tol: relative bracket-shrink target for sup-norm peak refinement.
    root_tol: absolute bracket width for root bisection.
    """

    mantissa_bits: int = DEFAULT_BITS
    sup_tol: float = 1e-12
    root_tol: float = 1e-14

    def __post_init__(self):
        if self.mantissa_bits < 64:
            raise ValueError("mantissa_bits must be at least 64")
        if not (self.sup_tol > 0 and self.root_tol > 0):
            raise ValueError("tolerances must be strictly positive")

    def workprec(self):
        return mp.workprec(self.mantissa_bits)

    def mpf(self, x):
        with self.workprec():
            return mpf(x)

    @property
    def eps(self):
        return mpf(2) ** (-self.mantissa_bits)

    @property
    def decimal_digits(self):
        return int(self.mantissa_bits * 0.30103) + 2

    def dec(self, x):
        """Full-precision decimal string (round-trips through mpf)."""
        with self.workprec():
            return mp.nstr(mpf(x), self.decimal_digits, strip_zeros=True)

    def with_bits(self, bits):
        return PrecisionContext(bits, self.sup_tol, self.root_tol)


DEFAULT_CTX = PrecisionContext()
