# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled arithmetic and elimination kernel.

Same contracts as ``pyfallback``: scalar triples (a, b, d) for (a + b*i)/d,
sparse rows as dict[int, triple].  Outputs are bit-identical to the fallback;
only the constant factor differs.
"""

from math import gcd

Q_ZERO = (0, 0, 1)
Q_ONE = (1, 0, 1)
Q_I = (0, 1, 1)


cpdef tuple qnorm(object a, object b, object d):
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


cpdef bint qis0(object x):
    return x[0] == 0 and x[1] == 0


cpdef tuple qneg(object x):
    return (-x[0], -x[1], x[2])


cpdef tuple qadd(object x, object y):
    return qnorm(x[0] * y[2] + y[0] * x[2], x[1] * y[2] + y[1] * x[2], x[2] * y[2])


cpdef tuple qsub(object x, object y):
    return qnorm(x[0] * y[2] - y[0] * x[2], x[1] * y[2] - y[1] * x[2], x[2] * y[2])


cpdef tuple qmul(object x, object y):
    return qnorm(x[0] * y[0] - x[1] * y[1], x[0] * y[1] + y[0] * x[1], x[2] * y[2])


cpdef tuple qinv(object x):
    if x[0] == 0 and x[1] == 0:
        raise ZeroDivisionError("inverse of zero scalar")
    n = x[0] * x[0] + x[1] * x[1]
    return qnorm(x[2] * x[0], -x[2] * x[1], n)


cpdef tuple qdiv(object x, object y):
    return qmul(x, qinv(y))


cpdef dict row_addmul(dict dst, dict src, object c):
    cdef dict out
    if c[0] == 0 and c[1] == 0:
        return dict(dst)
    out = dict(dst)
    for col, v in src.items():
        w = out.get(col)
        if w is None:
            out[col] = qmul(c, v)
        else:
            s = qadd(<tuple> w, qmul(c, v))
            if s[0] == 0 and s[1] == 0:
                del out[col]
            else:
                out[col] = s
    return out


cpdef dict row_scale(dict row, object c):
    cdef dict out = {}
    for col, v in row.items():
        out[col] = qmul(<tuple> v, c)
    return out


cpdef dict reduce_row(dict row, list pivots, list basis):
    cdef dict out = dict(row)
    cdef Py_ssize_t i
    for i in range(len(pivots)):
        c = out.get(pivots[i])
        if c is not None:
            out = row_addmul(out, <dict> basis[i], qneg(<tuple> c))
    return out


cdef Py_ssize_t _insort(list pivots, object p):
    cdef Py_ssize_t lo = 0, hi = len(pivots), mid
    while lo < hi:
        mid = (lo + hi) // 2
        if pivots[mid] < p:
            lo = mid + 1
        else:
            hi = mid
    return lo


cpdef tuple rref_rows(list rows):
    cdef list pivots = []
    cdef list basis = []
    cdef dict rem
    cdef Py_ssize_t i, lo
    for row in rows:
        rem = reduce_row(row, pivots, basis)
        if not rem:
            continue
        p = min(rem)
        rem = row_scale(rem, qinv(<tuple> rem[p]))
        for i in range(len(basis)):
            c = (<dict> basis[i]).get(p)
            if c is not None:
                basis[i] = row_addmul(<dict> basis[i], rem, qneg(<tuple> c))
        lo = _insort(pivots, p)
        pivots.insert(lo, p)
        basis.insert(lo, rem)
    return pivots, basis


cpdef object rank_rows(list rows):
    cdef dict piv = {}
    cdef dict r
    for row in rows:
        if not isinstance(row, dict):
            raise TypeError("rows must be dicts mapping column to scalar triple")
        r = dict(<dict> row)
        while r:
            p = min(r)
            b = piv.get(p)
            if b is None:
                piv[p] = row_scale(r, qinv(<tuple> r[p]))
                break
            r = row_addmul(r, <dict> b, qneg(<tuple> r[p]))
    return len(piv)


cpdef object solve_in_span(list vectors, dict target, object base):
    cdef list pivots = []
    cdef list basis = []
    cdef dict row, rem
    cdef Py_ssize_t idx, i, lo
    for idx in range(len(vectors)):
        if not isinstance(vectors[idx], dict):
            raise TypeError("rows must be dicts mapping column to scalar triple")
        row = dict(<dict> vectors[idx])
        row[base + idx] = Q_ONE
        row = reduce_row(row, pivots, basis)
        p = None
        for col in row:
            if col < base and (p is None or col < p):
                p = col
        if p is None:
            continue
        row = row_scale(row, qinv(<tuple> row[p]))
        for i in range(len(basis)):
            c = (<dict> basis[i]).get(p)
            if c is not None:
                basis[i] = row_addmul(<dict> basis[i], row, qneg(<tuple> c))
        lo = _insort(pivots, p)
        pivots.insert(lo, p)
        basis.insert(lo, row)
    rem = reduce_row(target, pivots, basis)
    cdef list sol = [Q_ZERO] * len(vectors)
    for col in rem:
        if col < base:
            return None
    for col, v in rem.items():
        sol[col - base] = qneg(<tuple> v)
    return sol
