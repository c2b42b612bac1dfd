"""Exception and warning types shared across the solvers."""


class TuranLabError(Exception):
    """Base class for all turanlab errors."""


class NonConvergence(TuranLabError):
    """An iterative solver stagnated before reaching its target residual."""

    def __init__(self, message, bits=None):
        if bits is not None:
            message = "%s (retry with mantissa_bits=%d)" % (message, 2 * bits)
        super().__init__(message)


class IllConditioned(TuranLabError):
    """A linear solve lost essentially all significant digits."""


class DegenerateNormalization(TuranLabError):
    """The normalized coefficient vector grew without bound during a solve."""


class OracleDisagreement(TuranLabError):
    """Two independent solution routes disagree beyond tolerance."""


class ZeroRestrictionError(TuranLabError):
    """An input polynomial failed its restricted-zero verification."""


class InequalityViolation(TuranLabError):
    """A margin that must hold by theorem was violated; indicates a solver bug."""


class EvenOrderRootWarning(UserWarning):
    """A root of even order may have been skipped by the sign-change scan."""
