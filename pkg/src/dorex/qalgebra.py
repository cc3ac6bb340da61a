"""Quadratic algebra presentations, graded components, and Koszul data.

An algebra is presented by an alphabet of generators and a canonical subspace
of quadratic relations.  Graded components are modeled by lexicographic word
transversals: degree k is built on top of degree k-1 by reducing the columns
(letter, transversal word) against the projected relation rows, which yields
the same transversal as a direct echelon computation on the full degree-k
relation span (the brute-force route is kept in the tests as an oracle).
"""

from dataclasses import dataclass

from ._kernel import Q_ONE, qadd, qmul, reduce_row, rref_rows
from .exact_linalg import (
    Scalar,
    ShapeMismatch,
    Subspace,
    Tensor,
    ValidationError,
    intersect,
    sandwich,
)

__all__ = [
    "AlgebraCache",
    "CertReport",
    "NotRegularEvidence",
    "Presentation",
    "apply_graded",
    "as_certificate",
    "graded_basis",
    "koszul_space",
    "relation_span",
]


class NotRegularEvidence(ValidationError):
    """The regularity certificate failed one of its checks."""


@dataclass(frozen=True)
class Presentation:
    """Generators plus a canonical quadratic relation subspace."""

    gens: tuple
    field: str
    relations: Subspace

    def __post_init__(self):
        if len(set(self.gens)) != len(self.gens):
            raise ValidationError("generator names must be unique")
        if self.field not in ("Q", "Q(i)"):
            raise ValidationError("field must be Q or Q(i)")
        if self.relations.degree != 2:
            raise ShapeMismatch("relations must live in degree 2")
        if self.relations.nletters != len(self.gens):
            raise ShapeMismatch("relation alphabet does not match generators")

    @property
    def nletters(self):
        return len(self.gens)


class AlgebraCache:
    """Frozen-after-build graded data for one presentation.

    Degree k state: the transversal word list (sorted), its index table, the
    echelon rows of the relation span in (letter, transversal) coordinates,
    and a normal-form memo per word.
    """

    def __init__(self, presentation):
        self.presentation = presentation
        self.nletters = presentation.nletters
        n = self.nletters
        self._T = [[()], [(l,) for l in range(n)]]
        self._tidx = [{(): 0}, {(l,): l for l in range(n)}]
        self._D = [([], []), ([], [])]
        self._nf = [
            {(): {(): Q_ONE}},
            {(l,): {(l,): Q_ONE} for l in range(n)},
        ]
        self._fold = {}
        self._W = [Subspace.full(n, 0), Subspace.full(n, 1)]
        self._relspan = {}

    # graded quotient ------------------------------------------------------

    def build(self, k):
        while len(self._T) <= k:
            self._extend()

    def _extend(self):
        k = len(self._T)
        n = self.nletters
        prevT = self._T[k - 1]
        m = len(prevT)
        rows = []
        if k == 2:
            for row in self.presentation.relations.rows:
                rows.append(dict(row))
        else:
            for r in self.presentation.relations.basis():
                for t in self._T[k - 2]:
                    row = {}
                    for (l1, l2), c in r.terms.items():
                        for u, cu in self.nf_word((l2,) + t).items():
                            col = l1 * m + self._tidx[k - 1][u]
                            cur = row.get(col)
                            s = qadd(cur, qmul(c, cu)) if cur is not None else qmul(c, cu)
                            if s[0] == 0 and s[1] == 0:
                                row.pop(col, None)
                            else:
                                row[col] = s
                    if row:
                        rows.append(row)
        pivots, basis = rref_rows(rows)
        pivset = set(pivots)
        T = []
        for l in range(n):
            for j, u in enumerate(prevT):
                if l * m + j not in pivset:
                    T.append((l,) + u)
        self._T.append(T)
        self._tidx.append({w: j for j, w in enumerate(T)})
        self._D.append((pivots, basis))
        self._nf.append({})

    def dim(self, k):
        self.build(k)
        return len(self._T[k])

    def transversal(self, k):
        self.build(k)
        return list(self._T[k])

    def nf_word(self, w):
        """Normal form of a word: map transversal word -> scalar triple."""
        k = len(w)
        self.build(k)
        memo = self._nf[k]
        got = memo.get(w)
        if got is not None:
            return got
        n = self.nletters
        l = w[0]
        rest = self.nf_word(w[1:])
        m = len(self._T[k - 1])
        prevT = self._T[k - 1]
        pivots, basis = self._D[k]
        acc = {}
        for u, cu in rest.items():
            key = (k, l, u)
            fr = self._fold.get(key)
            if fr is None:
                col = l * m + self._tidx[k - 1][u]
                rem = reduce_row({col: Q_ONE}, pivots, basis)
                fr = {}
                for c2, v in rem.items():
                    fr[(c2 // m,) + prevT[c2 % m]] = v
                self._fold[key] = fr
            for w2, v in fr.items():
                cur = acc.get(w2)
                s = qadd(cur, qmul(cu, v)) if cur is not None else qmul(cu, v)
                if s[0] == 0 and s[1] == 0:
                    acc.pop(w2, None)
                else:
                    acc[w2] = s
        memo[w] = acc
        return acc

    def nf_tensor(self, t):
        """Normal-form coordinates of a tensor over the degree-k transversal."""
        acc = {}
        for w, c in t.terms.items():
            for u, cu in self.nf_word(w).items():
                cur = acc.get(u)
                s = qadd(cur, qmul(c, cu)) if cur is not None else qmul(c, cu)
                if s[0] == 0 and s[1] == 0:
                    acc.pop(u, None)
                else:
                    acc[u] = s
        return acc

    def lift_coords(self, k, coords):
        """Transversal coordinates back to a representative tensor."""
        terms = {}
        for w, c in coords.items():
            if len(w) != k:
                raise ShapeMismatch("coordinate word of wrong degree")
            terms[tuple(w)] = tuple(c) if not isinstance(c, tuple) else c
        return Tensor(self.nletters, k, terms)

    def mul_words(self, u, v):
        return self.nf_word(tuple(u) + tuple(v))

    # relation spans and Koszul spaces ------------------------------------

    def relation_span(self, k):
        """Canonical subspace sum of all degree-k sandwiches of the relations."""
        got = self._relspan.get(k)
        if got is not None:
            return got
        n = self.nletters
        if k < 2:
            sp = Subspace.zero(n, k)
        else:
            sp = sandwich(self.presentation.relations, 0, k - 2)
            for s in range(1, k - 1):
                sp = sp.sum_with(sandwich(self.presentation.relations, s, k - 2 - s))
        self._relspan[k] = sp
        return sp

    def koszul(self, i):
        if len(self._W) == 2:
            self._W.append(self.presentation.relations)
        while len(self._W) <= i:
            prev = self._W[-1]
            self._W.append(
                intersect([sandwich(prev, 1, 0), sandwich(prev, 0, 1)])
            )
        return self._W[i]


def graded_basis(A, k):
    """Dimension, transversal words, and the projection onto them."""
    A.build(k)

    def project(t):
        if t.degree != k or t.nletters != A.nletters:
            raise ShapeMismatch("projection degree mismatch")
        return {w: Scalar._wrap(c) for w, c in A.nf_tensor(t).items()}

    return A.dim(k), A.transversal(k), project


def koszul_space(A, i):
    return A.koszul(i)


def relation_span(A, k):
    return A.relation_span(k)


@dataclass(frozen=True)
class CertReport:
    """Degree-bounded regularity evidence for one presentation."""

    d: int
    omega: Tensor
    dims_w: tuple
    dims_a: tuple
    euler_ok: bool
    palindrome_ok: bool
    w_top_ok: bool
    bound: int

    @property
    def ok(self):
        return self.euler_ok and self.palindrome_ok and self.w_top_ok


def as_certificate(A, D):
    """Compute the top Koszul degree and check the finite-regularity shape.

    d is the largest i with a nonzero Koszul space; the checks are: the top
    space is one-dimensional and vanishes above d, the dimension profile is
    palindromic, and the alternating Euler sums vanish for 1 <= k <= D.
    The returned top-form has leading (lex-least) word coefficient 1 by
    canonical-basis construction.  Callers decide whether a failed check is
    fatal; the report only records it.
    """
    if D < 2:
        raise ValidationError("certificate bound must be at least 2")
    d = 1
    i = 2
    while i <= D + 1:
        if koszul_space(A, i).dim == 0:
            break
        d = i
        i += 1
    dims_w = tuple(koszul_space(A, j).dim for j in range(d + 2))
    dims_a = tuple(A.dim(k) for k in range(D + 1))
    w_top_ok = dims_w[d] == 1 and dims_w[d + 1] == 0
    palindrome_ok = all(dims_w[j] == dims_w[d - j] for j in range(d + 1))
    euler_ok = True
    for k in range(1, D + 1):
        total = 0
        for j in range(0, min(d, k) + 1):
            term = dims_w[j] * dims_a[k - j]
            total += term if j % 2 == 0 else -term
        if total != 0:
            euler_ok = False
            break
    top = koszul_space(A, d)
    omega = top.basis()[0] if top.dim else Tensor.zero(A.nletters, d)
    return CertReport(
        d=d,
        omega=omega,
        dims_w=dims_w,
        dims_a=dims_a,
        euler_ok=euler_ok,
        palindrome_ok=palindrome_ok,
        w_top_ok=w_top_ok,
        bound=D,
    )


def apply_graded(A, kind, blockmap, coords, k):
    """Apply a generator-defined map to a graded class.

    kind "hom": blockmap is the k-fold box power on degree k; the result is
    its entry grid projected to degree-k coordinates.  kind "derivation":
    blockmap is the degree-k derivation extension (a column); the result is
    the column projected to degree k+1.  Degree-0 classes map to themselves
    under a homomorphism and to zero under a derivation.
    """
    lift = A.lift_coords(k, coords)
    if kind == "hom":
        if k == 0:
            return [[dict(coords), {}], [{}, dict(coords)]]
        _, _, project = graded_basis(A, k)
        return [
            [project(blockmap.entry(i, j).apply(lift)) for j in range(2)]
            for i in range(2)
        ]
    if kind == "derivation":
        if k == 0:
            return [{}, {}]
        _, _, project = graded_basis(A, k + 1)
        return [project(blockmap.entry(i, 0).apply(lift)) for i in range(2)]
    raise ShapeMismatch("unknown graded application kind %r" % (kind,))
