"""Dense linear solves on small systems of mpf entries."""

from mpmath import mpf

from .errors import IllConditioned


def full_pivot_solve(a, b, bits):
    """Solve a x = b by Gaussian elimination with full pivoting.

    a: list of row lists (mpf), square; b: list (mpf).  Columns are
    equilibrated to unit max first, so disparate natural scales (the level
    column varies like x^-nu) do not masquerade as rank collapse.  Raises
    IllConditioned when the pivot chain collapses below 2^-(bits-8) of the
    leading pivot.
    """
    n = len(a)
    m = [list(row) for row in a]
    rhs = list(b)
    col_scale = []
    for c in range(n):
        s = max(abs(m[r][c]) for r in range(n))
        if s == 0:
            s = mpf(1)
        col_scale.append(s)
        for r in range(n):
            m[r][c] = m[r][c] / s
    col_of = list(range(n))
    first_pivot = None
    floor = None
    for step in range(n):
        piv_r, piv_c, piv_v = step, step, abs(m[step][step])
        for r in range(step, n):
            for c in range(step, n):
                v = abs(m[r][c])
                if v > piv_v:
                    piv_r, piv_c, piv_v = r, c, v
        if first_pivot is None:
            first_pivot = piv_v
            floor = first_pivot * mpf(2) ** (-(bits - 8))
        if piv_v == 0 or piv_v < floor:
            raise IllConditioned(
                "pivot %d collapsed (%s vs leading %s)" % (step, piv_v, first_pivot)
            )
        if piv_r != step:
            m[step], m[piv_r] = m[piv_r], m[step]
            rhs[step], rhs[piv_r] = rhs[piv_r], rhs[step]
        if piv_c != step:
            for row in m:
                row[step], row[piv_c] = row[piv_c], row[step]
            col_of[step], col_of[piv_c] = col_of[piv_c], col_of[step]
        inv = 1 / m[step][step]
        for r in range(step + 1, n):
            f = m[r][step] * inv
            if f == 0:
                continue
            m[r][step] = mpf(0)
            for c in range(step + 1, n):
                m[r][c] -= f * m[step][c]
            rhs[r] -= f * rhs[step]
    x = [mpf(0)] * n
    for r in range(n - 1, -1, -1):
        acc = rhs[r]
        for c in range(r + 1, n):
            acc -= m[r][c] * x[c]
        x[r] = acc / m[r][r]
    out = [mpf(0)] * n
    for pos, orig in enumerate(col_of):
        out[orig] = x[pos]
    return [v / s for v, s in zip(out, col_scale)]
