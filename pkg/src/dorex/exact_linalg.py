"""Exact scalars, sparse tensors over generator words, canonical subspaces,
affine solvers, and slot-rotation operators.

Scalars live in Q or Q(i).  Tensors are finite linear combinations of words
(tuples of letter indices) of a fixed length over a fixed alphabet size.
Subspaces are stored as reduced row echelon bases with respect to the
lexicographic word order, so subspace equality is matrix equality and every
construction downstream inherits a canonical form.
"""

from fractions import Fraction

from ._kernel import (
    Q_ONE,
    Q_ZERO,
    qadd,
    qdiv,
    qinv,
    qis0,
    qmul,
    qneg,
    qnorm,
    rank_rows,
    reduce_row,
    row_addmul,
    row_scale,
    rref_rows,
    solve_in_span,
)


class DorexError(Exception):
    """Base for all package errors."""


class ValidationError(DorexError):
    """Input data fails a required condition (CLI exit code 1)."""


class InternalCheckError(DorexError):
    """A property guaranteed by the theory failed (CLI exit code 3)."""


class NoSolution(InternalCheckError):
    """Affine solve infeasible: target not in constraint + congruence."""


class ShapeMismatch(DorexError):
    """Operands have incompatible shapes, degrees, or alphabets."""


class IndexOutOfRange(DorexError):
    """Slot index outside the legal range."""


# scalars ------------------------------------------------------------------


class Scalar(tuple):
    """Immutable exact element (a + b*i)/d of Q(i), always normalized."""

    __slots__ = ()

    def __new__(cls, a=0, b=0, d=1):
        return tuple.__new__(cls, qnorm(a, b, d))

    @classmethod
    def _wrap(cls, triple):
        return tuple.__new__(cls, triple)

    @classmethod
    def from_rationals(cls, re, im=0):
        re = Fraction(re)
        im = Fraction(im)
        den = re.denominator * im.denominator
        return cls(re.numerator * im.denominator, im.numerator * re.denominator, den)

    @property
    def re(self):
        return Fraction(self[0], self[2])

    @property
    def im(self):
        return Fraction(self[1], self[2])

    def is_zero(self):
        return qis0(self)

    def __add__(self, other):
        return Scalar._wrap(qadd(self, other))

    def __radd__(self, other):
        return Scalar._wrap(qadd(other, self))

    def __sub__(self, other):
        return Scalar._wrap(qsub_(self, other))

    def __rsub__(self, other):
        return Scalar._wrap(qsub_(other, self))

    def __mul__(self, other):
        return Scalar._wrap(qmul(self, other))

    def __rmul__(self, other):
        return Scalar._wrap(qmul(other, self))

    def __truediv__(self, other):
        return Scalar._wrap(qdiv(self, other))

    def __neg__(self):
        return Scalar._wrap(qneg(self))

    def inverse(self):
        return Scalar._wrap(qinv(self))

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return "Scalar(%s)" % format_scalar(self)


def qsub_(x, y):
    return qadd(x, qneg(y))


ZERO = Scalar(0)
ONE = Scalar(1)
IUNIT = Scalar(0, 1)


def format_scalar(sc):
    """Grammar-compatible text form: a, a/b, i, a+b*i, a-b*i."""
    a, b, d = sc
    re = Fraction(a, d)
    im = Fraction(b, d)
    if im == 0:
        return str(re)
    if re == 0:
        if im == 1:
            return "i"
        if im == -1:
            return "0-1*i"
        if im > 0:
            return "0+%s*i" % im
        return "0-%s*i" % -im
    if im > 0:
        return "%s+%s*i" % (re, im) if im != 1 else "%s+1*i" % re
    return "%s-%s*i" % (re, -im) if im != -1 else "%s-1*i" % re


# words --------------------------------------------------------------------


def word_rank(word, nletters):
    r = 0
    for letter in word:
        r = r * nletters + letter
    return r


def word_unrank(rank, degree, nletters):
    out = []
    for _ in range(degree):
        out.append(rank % nletters)
        rank //= nletters
    out.reverse()
    return tuple(out)


def words_of_degree(degree, nletters):
    """All words of the given length in lexicographic order."""
    if degree == 0:
        return [()]
    out = [()]
    for _ in range(degree):
        out = [w + (l,) for w in out for l in range(nletters)]
    return out


# tensors ------------------------------------------------------------------


class Tensor:
    """Sparse element of the degree-k word space over a fixed alphabet."""

    __slots__ = ("nletters", "degree", "terms")

    def __init__(self, nletters, degree, terms=None):
        self.nletters = nletters
        self.degree = degree
        clean = {}
        if terms:
            for word, coeff in terms.items():
                if len(word) != degree:
                    raise ShapeMismatch(
                        "word %r has length %d, expected %d" % (word, len(word), degree)
                    )
                triple = qnorm(*coeff)
                if triple[0] == 0 and triple[1] == 0:
                    continue
                for letter in word:
                    if not 0 <= letter < nletters:
                        raise ShapeMismatch("letter %r outside alphabet" % (letter,))
                clean[word] = triple
        self.terms = clean

    @classmethod
    def zero(cls, nletters, degree):
        return cls(nletters, degree, None)

    @classmethod
    def word(cls, nletters, word, coeff=ONE):
        return cls(nletters, len(word), {tuple(word): coeff})

    def is_zero(self):
        return not self.terms

    def coeff(self, word):
        return Scalar._wrap(self.terms.get(tuple(word), Q_ZERO))

    def items(self):
        """Terms sorted by word (deterministic emission order)."""
        return sorted(self.terms.items())

    def _check(self, other):
        if self.nletters != other.nletters or self.degree != other.degree:
            raise ShapeMismatch("tensor shape mismatch")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            cur = terms.get(w)
            s = qadd(cur, c) if cur is not None else c
            if s[0] == 0 and s[1] == 0:
                terms.pop(w, None)
            else:
                terms[w] = s
        out = Tensor.__new__(Tensor)
        out.nletters, out.degree, out.terms = self.nletters, self.degree, terms
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = Tensor.__new__(Tensor)
        out.nletters, out.degree = self.nletters, self.degree
        out.terms = {w: qneg(c) for w, c in self.terms.items()}
        return out

    def scale(self, coeff):
        triple = qnorm(*coeff)
        if triple[0] == 0 and triple[1] == 0:
            return Tensor.zero(self.nletters, self.degree)
        out = Tensor.__new__(Tensor)
        out.nletters, out.degree = self.nletters, self.degree
        out.terms = {w: qmul(c, triple) for w, c in self.terms.items()}
        return out

    def tensor(self, other):
        if self.nletters != other.nletters:
            raise ShapeMismatch("tensor product across different alphabets")
        terms = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                terms[w1 + w2] = qmul(c1, c2)
        out = Tensor.__new__(Tensor)
        out.nletters = self.nletters
        out.degree = self.degree + other.degree
        out.terms = terms
        return out

    def widen(self, nletters):
        """Same element viewed over a larger alphabet."""
        if nletters < self.nletters:
            for w in self.terms:
                for letter in w:
                    if letter >= nletters:
                        raise ShapeMismatch("cannot narrow alphabet")
        out = Tensor.__new__(Tensor)
        out.nletters, out.degree, out.terms = nletters, self.degree, dict(self.terms)
        return out

    def to_row(self):
        n = self.nletters
        return {word_rank(w, n): c for w, c in self.terms.items()}

    @classmethod
    def from_row(cls, nletters, degree, row):
        out = cls.__new__(cls)
        out.nletters, out.degree = nletters, degree
        out.terms = {word_unrank(r, degree, nletters): c for r, c in row.items()}
        return out

    def key(self):
        return (self.nletters, self.degree, tuple(sorted(self.terms.items())))

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.nletters == other.nletters
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if not self.terms:
            return "Tensor(0)"
        bits = []
        for w, c in self.items():
            bits.append("%s*%s" % (format_scalar(c), ".".join(str(l) for l in w)))
        return "Tensor(%s)" % " + ".join(bits)


def head_slice(t, head):
    """Tail tensor at a fixed head word: sum of coeff(head+tail)*tail."""
    head = tuple(head)
    k = len(head)
    terms = {}
    for w, c in t.terms.items():
        if w[:k] == head:
            terms[w[k:]] = c
    return Tensor(t.nletters, t.degree - k, terms)


def tail_slice(t, tail):
    """Head tensor at a fixed tail word."""
    tail = tuple(tail)
    k = len(tail)
    terms = {}
    for w, c in t.terms.items():
        if w[t.degree - k:] == tail:
            terms[w[: t.degree - k]] = c
    return Tensor(t.nletters, t.degree - k, terms)


# subspaces ----------------------------------------------------------------


class Subspace:
    """Canonical (RREF) subspace of the degree-k word space."""

    __slots__ = ("nletters", "degree", "pivots", "rows")

    def __init__(self, nletters, degree, pivots, rows):
        self.nletters = nletters
        self.degree = degree
        self.pivots = pivots
        self.rows = rows

    @classmethod
    def from_tensors(cls, nletters, degree, tensors):
        for t in tensors:
            if t.degree != degree or t.nletters != nletters:
                raise ShapeMismatch("spanning tensor shape mismatch")
        pivots, rows = rref_rows([t.to_row() for t in tensors])
        return cls(nletters, degree, pivots, rows)

    @classmethod
    def zero(cls, nletters, degree):
        return cls(nletters, degree, [], [])

    @classmethod
    def full(cls, nletters, degree):
        n = nletters**degree
        return cls(nletters, degree, list(range(n)), [{r: Q_ONE} for r in range(n)])

    @property
    def dim(self):
        return len(self.rows)

    def basis(self):
        return [
            Tensor.from_row(self.nletters, self.degree, row) for row in self.rows
        ]

    def pivot_words(self):
        return [word_unrank(p, self.degree, self.nletters) for p in self.pivots]

    def reduce(self, t):
        """Canonical remainder of t modulo this subspace."""
        row = reduce_row(t.to_row(), self.pivots, self.rows)
        return Tensor.from_row(self.nletters, self.degree, row)

    def contains(self, t):
        return not reduce_row(t.to_row(), self.pivots, self.rows)

    def coords(self, t):
        """Coordinates of t in the RREF basis, or None if t is outside."""
        row = t.to_row()
        coeffs = [row.get(p, Q_ZERO) for p in self.pivots]
        rem = reduce_row(row, self.pivots, self.rows)
        if rem:
            return None
        return [Scalar._wrap(c) for c in coeffs]

    def sum_with(self, other):
        self._check(other)
        pivots, rows = rref_rows(self.rows + other.rows)
        return Subspace(self.nletters, self.degree, pivots, rows)

    def _check(self, other):
        if self.nletters != other.nletters or self.degree != other.degree:
            raise ShapeMismatch("subspace ambient mismatch")

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.nletters == other.nletters
            and self.degree == other.degree
            and self.pivots == other.pivots
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash(
            (
                self.nletters,
                self.degree,
                tuple(self.pivots),
                tuple(tuple(sorted(r.items())) for r in self.rows),
            )
        )

    def __repr__(self):
        return "Subspace(deg=%d, dim=%d)" % (self.degree, self.dim)


def intersect(spaces):
    """Canonical intersection of subspaces of a common ambient degree.

    Empty list is rejected (the ambient is unknown); a single space is
    returned as-is.  Pairwise Zassenhaus elimination otherwise.
    """
    if not spaces:
        raise ShapeMismatch("intersect needs at least one subspace")
    acc = spaces[0]
    for sp in spaces[1:]:
        acc._check(sp)
        n = acc.nletters**acc.degree
        doubled = []
        for row in acc.rows:
            both = dict(row)
            for col, v in row.items():
                both[col + n] = v
            doubled.append(both)
        doubled.extend(dict(row) for row in sp.rows)
        _, echelon = rref_rows(doubled)
        meet = []
        for row in echelon:
            if all(col >= n for col in row):
                meet.append({col - n: v for col, v in row.items()})
        pivots, rows = rref_rows(meet)
        acc = Subspace(acc.nletters, acc.degree, pivots, rows)
    return acc


def tensor_sub(left, right):
    """U tensor W for canonical subspaces; result is already canonical."""
    if left.nletters != right.nletters:
        raise ShapeMismatch("tensor product across different alphabets")
    nright = left.nletters**right.degree
    pivots = []
    rows = []
    for pl, rl in zip(left.pivots, left.rows):
        for pr, rr in zip(right.pivots, right.rows):
            pivots.append(pl * nright + pr)
            row = {}
            for c1, v1 in rl.items():
                for c2, v2 in rr.items():
                    row[c1 * nright + c2] = qmul(v1, v2)
            rows.append(row)
    order = sorted(range(len(pivots)), key=lambda k: pivots[k])
    return Subspace(
        left.nletters,
        left.degree + right.degree,
        [pivots[k] for k in order],
        [rows[k] for k in order],
    )


def sandwich(space, left_deg, right_deg):
    """The subspace V^(left) tensor S tensor V^(right); canonical by layout."""
    n = space.nletters
    nmid = n**space.degree
    nright = n**right_deg
    pivots = []
    rows = []
    for h in range(n**left_deg):
        for pm, rm in zip(space.pivots, space.rows):
            for t in range(nright):
                pivots.append((h * nmid + pm) * nright + t)
                rows.append(
                    {(h * nmid + c) * nright + t: v for c, v in rm.items()}
                )
    return Subspace(n, left_deg + space.degree + right_deg, pivots, rows)


def in_sandwich(t, left_deg, space, right_deg):
    """Membership of t in V^(left) tensor S tensor V^(right) via mid slices."""
    mid_deg = space.degree
    if t.degree != left_deg + mid_deg + right_deg or t.nletters != space.nletters:
        raise ShapeMismatch("sandwich degree mismatch")
    slices = {}
    for w, c in t.terms.items():
        key = (w[:left_deg], w[left_deg + mid_deg:])
        slices.setdefault(key, {})[w[left_deg: left_deg + mid_deg]] = c
    for mid in slices.values():
        if not space.contains(Tensor(space.nletters, mid_deg, mid)):
            return False
    return True


def solve_affine(target, congruence_space, constraint_space):
    """The element x of constraint_space with x = target modulo congruence_space.

    Deterministic tie-break: unknowns are the constraint basis rows
    (least-pivot-first) followed by the congruence basis rows; the greedy RREF
    solution zeroes every free coordinate.  Raises NoSolution if target is
    outside constraint + congruence.
    """
    if (
        target.degree != congruence_space.degree
        or target.degree != constraint_space.degree
        or target.nletters != congruence_space.nletters
        or target.nletters != constraint_space.nletters
    ):
        raise ShapeMismatch("solve_affine ambient mismatch")
    vectors = list(constraint_space.rows) + list(congruence_space.rows)
    base = target.nletters**target.degree
    sol = solve_in_span(vectors, target.to_row(), base)
    if sol is None:
        raise NoSolution("target outside constraint + congruence")
    acc = {}
    for c, row in zip(sol[: len(constraint_space.rows)], constraint_space.rows):
        if c[0] == 0 and c[1] == 0:
            continue
        acc = row_addmul(acc, row, c)
    return Tensor.from_row(target.nletters, target.degree, acc)


def tau_apply(d, i, t):
    """Slot rotation: the first i+1 slots rotate left by one, slot 1 lands at
    position i+1; i = 0 is the identity and i = d-1 the full cycle."""
    if i < 0 or i > d - 1:
        raise IndexOutOfRange("tau index i=%d outside 0..%d" % (i, d - 1))
    if t.degree != d:
        raise ShapeMismatch("tau degree mismatch")
    if i == 0:
        return t
    terms = {}
    for w, c in t.terms.items():
        terms[w[1: i + 1] + (w[0],) + w[i + 1:]] = c
    out = Tensor.__new__(Tensor)
    out.nletters, out.degree, out.terms = t.nletters, t.degree, terms
    return out


def stack_rank(spaces_or_tensors_rows):
    """Rank of a list of raw sparse rows (oracle helper)."""
    return rank_rows(list(spaces_or_tensors_rows))


# small scalar matrices ----------------------------------------------------


def mat_mul(a, b):
    """Product of rectangular Scalar matrices (lists of rows)."""
    if not a or not b or len(a[0]) != len(b):
        raise ShapeMismatch("matrix product shape mismatch")
    rows = len(a)
    inner = len(b)
    cols = len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = Q_ZERO
            for l in range(inner):
                acc = qadd(acc, qmul(a[i][l], b[l][j]))
            row.append(Scalar._wrap(acc))
        out.append(row)
    return out


def mat_inv(a):
    """Inverse of a square Scalar matrix; None when singular."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise ShapeMismatch("matrix not square")
    rows = []
    for i in range(n):
        row = {}
        for j in range(n):
            c = qnorm(*a[i][j])
            if c[0] != 0 or c[1] != 0:
                row[j] = c
        row[n + i] = Q_ONE
        rows.append(row)
    pivots, basis = rref_rows(rows)
    if pivots[:n] != list(range(n)) or len(pivots) != n:
        return None
    inv = [[ZERO] * n for _ in range(n)]
    for p, row in zip(pivots, basis):
        for col, v in row.items():
            if col >= n:
                inv[p][col - n] = Scalar._wrap(v)
    return inv
