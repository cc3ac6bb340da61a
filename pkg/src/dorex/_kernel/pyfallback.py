"""Pure-Python arithmetic and elimination kernel.

Scalars are immutable triples ``(a, b, d)`` of ints encoding the Gaussian
rational ``(a + b*i)/d`` with ``d > 0`` and ``gcd(a, b, d) = 1``.  Sparse rows
are dicts mapping column index to a nonzero scalar.  The compiled backend in
``speedups.pyx`` implements the same functions with identical semantics; every
canonical form produced here is bit-identical across backends.
"""

from math import gcd

Q_ZERO = (0, 0, 1)
Q_ONE = (1, 0, 1)
Q_I = (0, 1, 1)


def qnorm(a, b, d):
    """Normalized scalar triple for (a + b*i)/d."""
    if d == 0:
        raise ZeroDivisionError("scalar with zero denominator")
    if a == 0 and b == 0:
        return Q_ZERO
    if d < 0:
        a, b, d = -a, -b, -d
    g = gcd(gcd(a, b), d)
    if g > 1:
        a //= g
        b //= g
        d //= g
    return (a, b, d)


def qis0(x):
    return x[0] == 0 and x[1] == 0


def qneg(x):
    return (-x[0], -x[1], x[2])


def qadd(x, y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    return qnorm(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)


def qsub(x, y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    return qnorm(a1 * d2 - a2 * d1, b1 * d2 - b2 * d1, d1 * d2)


def qmul(x, y):
    a1, b1, d1 = x
    a2, b2, d2 = y
    return qnorm(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, d1 * d2)


def qinv(x):
    a, b, d = x
    if a == 0 and b == 0:
        raise ZeroDivisionError("inverse of zero scalar")
    # 1/((a+bi)/d) = d(a-bi)/(a^2+b^2)
    n = a * a + b * b
    return qnorm(d * a, -d * b, n)


def qdiv(x, y):
    return qmul(x, qinv(y))


def row_addmul(dst, src, c):
    """New row equal to dst + c*src, zero entries dropped."""
    if qis0(c):
        return dict(dst)
    out = dict(dst)
    for col, v in src.items():
        w = out.get(col)
        if w is None:
            out[col] = qmul(c, v)
        else:
            s = qadd(w, qmul(c, v))
            if s[0] == 0 and s[1] == 0:
                del out[col]
            else:
                out[col] = s
    return out


def row_scale(row, c):
    return {col: qmul(v, c) for col, v in row.items()}


def reduce_row(row, pivots, basis):
    """Remainder of row after full reduction against an RREF basis.

    ``pivots`` must be strictly increasing and ``basis`` rows monic and fully
    reduced; a single pass in pivot order is then complete.
    """
    out = dict(row)
    for i, p in enumerate(pivots):
        c = out.get(p)
        if c is not None:
            out = row_addmul(out, basis[i], qneg(c))
    return out


def rref_rows(rows):
    """Full reduced row echelon form of the given sparse rows.

    Returns (pivots, basis): pivot columns strictly increasing, each basis row
    monic at its pivot, pivot columns zero in every other row.  Deterministic:
    first-nonzero (least-index) pivoting, rows processed in the given order.
    """
    pivots = []
    basis = []
    for row in rows:
        rem = reduce_row(row, pivots, basis)
        if not rem:
            continue
        p = min(rem)
        rem = row_scale(rem, qinv(rem[p]))
        for i in range(len(basis)):
            c = basis[i].get(p)
            if c is not None:
                basis[i] = row_addmul(basis[i], rem, qneg(c))
        lo, hi = 0, len(pivots)
        while lo < hi:
            mid = (lo + hi) // 2
            if pivots[mid] < p:
                lo = mid + 1
            else:
                hi = mid
        pivots.insert(lo, p)
        basis.insert(lo, rem)
    return pivots, basis


def rank_rows(rows):
    """Rank by forward elimination only (no canonical form)."""
    piv = {}
    for row in rows:
        r = dict(row)
        while r:
            p = min(r)
            b = piv.get(p)
            if b is None:
                piv[p] = row_scale(r, qinv(r[p]))
                break
            r = row_addmul(r, b, qneg(r[p]))
    return len(piv)


def solve_in_span(vectors, target, base):
    """Coefficients x with sum(x_i * vectors_i) = target, or None.

    ``base`` must exceed every column index in play; columns >= base carry
    bookkeeping.  The solution is supported on the greedy (first-come)
    independent subset of ``vectors``; remaining coefficients are zero.  This
    matches RREF of the column system [vectors | target] with free variables
    zeroed in input order.
    """
    pivots = []
    basis = []
    for idx, vec in enumerate(vectors):
        row = dict(vec)
        row[base + idx] = Q_ONE
        row = reduce_row(row, pivots, basis)
        p = None
        for col in row:
            if col < base and (p is None or col < p):
                p = col
        if p is None:
            continue
        row = row_scale(row, qinv(row[p]))
        for i in range(len(basis)):
            c = basis[i].get(p)
            if c is not None:
                basis[i] = row_addmul(basis[i], row, qneg(c))
        lo, hi = 0, len(pivots)
        while lo < hi:
            mid = (lo + hi) // 2
            if pivots[mid] < p:
                lo = mid + 1
            else:
                hi = mid
        pivots.insert(lo, p)
        basis.insert(lo, row)
    rem = reduce_row(target, pivots, basis)
    sol = [Q_ZERO] * len(vectors)
    for col, v in rem.items():
        if col < base:
            return None
    for col, v in rem.items():
        sol[col - base] = qneg(v)
    return sol
