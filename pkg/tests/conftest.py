import time

import pytest

from turanlab import PrecisionContext, theorem_check

ACCEPTANCE_N = (20, 40, 80, 120)
ACCEPTANCE_K = (1, 2, 4, 6)


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext()


@pytest.fixture(scope="session")
def ctx128():
    return PrecisionContext(128)


@pytest.fixture(scope="session")
def theorem_grid(ctx):
    """All acceptance cells, computed once and shared across criteria."""
    out = {}
    for theorem in ("2.1", "2.2"):
        for n in ACCEPTANCE_N:
            for k in ACCEPTANCE_K:
                t0 = time.time()
                rep = theorem_check(n, k, theorem, ctx)
                out[(n, k, theorem)] = (rep, time.time() - t0)
    return out
