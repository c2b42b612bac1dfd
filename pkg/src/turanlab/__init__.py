"""turanlab: reverse Markov/Bernstein extremal ratios for incomplete polynomials.

The library computes Chebyshev polynomials of Muntz spaces by exchange
iteration, solves the four extremal derivative-ratio problems over the
class x^(n+1) R(x) with certified brackets, property-tests the supporting
growth and decay inequalities, and reports empirical values of the
absolute constants involved.
"""

__version__ = "0.1.0"

from .errors import (
    DegenerateNormalization,
    EvenOrderRootWarning,
    IllConditioned,
    InequalityViolation,
    NonConvergence,
    OracleDisagreement,
    TuranLabError,
    ZeroRestrictionError,
)
from .extremal import (
    ENDPOINT,
    VARIATION,
    RatioCertificate,
    RatioProblem,
    SandwichReport,
    evaluate_ratio,
    solve_endpoint,
    solve_variation,
    theorem_check,
)
from .lemmas import (
    ConstantEstimates,
    FBoundRecord,
    LemmaReport,
    check_bernstein_restricted,
    check_decay,
    check_growth,
    disk_zero_count,
    estimate_constants,
    f_bound_check,
    run_lemma_suite,
)
from .muntz import (
    MuntzChebyshev,
    QnCheckRecord,
    monomial_witness,
    muntz_chebyshev,
    qn_gamma_check,
    t_squared_integral,
    witness_upper,
    zero_bound_check,
)
from .poly import (
    CHEB01,
    MONOMIAL,
    IncompletePolynomial,
    Polynomial,
    Weight,
    derivative_q,
    eval_poly,
    incomplete_eval,
    poly_from_json,
    poly_to_json,
    real_roots,
    sup_norm,
    total_variation,
)
from .precision import DEFAULT_CTX, PrecisionContext
from .sweep import SweepConfig, SweepReport, SweepRow, emit_csv, emit_json, run_sweep
