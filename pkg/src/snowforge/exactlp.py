"""Tiny exact linear-program solver over Fractions.

Dense two-phase simplex with Bland's rule.  Only meant for the small
geometric programs this package generates (a dozen variables, a few dozen
constraints), where certified rational optima matter more than speed.
"""

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for r in range(len(T)):
        if r != row and T[r][col] != 0:
            f = T[r][col]
            Tr, Trow = T[r], T[row]
            T[r] = [a - f * b for a, b in zip(Tr, Trow)]
    basis[row] = col


def _simplex(T, basis, ncols):
    # minimization; objective row is T[-1], reduced costs in T[-1][:ncols]
    while True:
        col = next((j for j in range(ncols) if T[-1][j] < 0), None)
        if col is None:
            return True
        best = None
        for r in range(len(T) - 1):
            a = T[r][col]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return False  # unbounded
        _pivot(T, basis, best[1], col)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None):
    """Minimize c.x subject to A_ub.x <= b_ub, A_eq.x = b_eq, x >= 0.

    All entries are converted to Fraction.  Returns (status, x, obj) with
    status one of "optimal", "infeasible", "unbounded".
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    rows = []
    if A_ub:
        for a, b in zip(A_ub, b_ub):
            rows.append(([Fraction(v) for v in a], Fraction(b), "ub"))
    if A_eq:
        for a, b in zip(A_eq, b_eq):
            rows.append(([Fraction(v) for v in a], Fraction(b), "eq"))
    m = len(rows)
    nslack = sum(1 for r in rows if r[2] == "ub")
    ncols = n + nslack + m  # slacks then artificials
    T = []
    basis = []
    si = 0
    for i, (a, b, kind) in enumerate(rows):
        row = a + [ZERO] * (nslack + m) + [b]
        if kind == "ub":
            row[n + si] = ONE
            si += 1
        if b < 0:
            row = [-v for v in row]
        row[n + nslack + i] = ONE
        T.append(row)
        basis.append(n + nslack + i)
    # phase 1
    obj = [ZERO] * (ncols + 1)
    for i in range(n + nslack + m + 1):
        if i >= n + nslack and i < ncols:
            continue
        s = sum(T[r][i] for r in range(m))
        obj[i] = -s
    T.append(obj)
    _simplex(T, basis, n + nslack)
    if T[-1][-1] < 0:
        return "infeasible", None, None
    # drive artificials out of the basis when possible
    for r in range(m):
        if basis[r] >= n + nslack:
            col = next((j for j in range(n + nslack) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)
    T.pop()
    # phase 2
    obj = [ZERO] * (ncols + 1)
    for j in range(n):
        obj[j] = c[j]
    for r in range(m):
        if basis[r] < n and obj[basis[r]] != 0:
            f = obj[basis[r]]
            obj = [a - f * b for a, b in zip(obj, T[r])]
    T.append(obj)
    ok = _simplex(T, basis, n + nslack)
    if not ok:
        return "unbounded", None, None
    x = [ZERO] * n
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = T[r][-1]
    return "optimal", x, sum(ci * xi for ci, xi in zip(c, x))
