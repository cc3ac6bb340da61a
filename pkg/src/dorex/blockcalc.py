"""Matrices of linear maps between word spaces.

A Lin is a single linear map between fixed tensor degrees, materialized as a
sparse table word -> image tensor; words absent from the table map to zero.
Maps defined only on a subspace are stored on the pivot words of its
canonical basis (image of the basis vector with that pivot), which extends
them by zero on a lexicographic complement.  Word-wise application then
agrees with the factored application on any input of sandwich shape.

A BlockMap is a rectangular grid of conformant Lins with the product (box),
composition (bullet), transpose, scalar-matrix, column and underline
operations of the calculus used throughout the construction.
"""

from ._kernel import qadd, qmul
from .exact_linalg import ShapeMismatch, Tensor, words_of_degree

__all__ = [
    "BlockMap",
    "Lin",
    "aux_calculus",
    "box",
    "bullet",
    "column_action",
    "diag_power",
    "lambda_y",
    "scalar_action",
    "sigma_power",
    "transpose",
    "underline_apply",
]


class Lin:
    """Sparse linear map from degree deg_in words to degree deg_out words."""

    __slots__ = ("nletters", "deg_in", "deg_out", "images")

    def __init__(self, nletters, deg_in, deg_out, images=None):
        self.nletters = nletters
        self.deg_in = deg_in
        self.deg_out = deg_out
        table = {}
        if images:
            for word, img in images.items():
                if len(word) != deg_in:
                    raise ShapeMismatch("image key of wrong length")
                if img.degree != deg_out or img.nletters != nletters:
                    raise ShapeMismatch("image tensor of wrong shape")
                if not img.is_zero():
                    table[tuple(word)] = img
        self.images = table

    @classmethod
    def zero(cls, nletters, deg_in, deg_out):
        return cls(nletters, deg_in, deg_out, None)

    @classmethod
    def identity(cls, nletters, deg):
        return cls(
            nletters,
            deg,
            deg,
            {w: Tensor.word(nletters, w) for w in words_of_degree(deg, nletters)},
        )

    @classmethod
    def on_basis(cls, space, values):
        """Map given on the canonical basis of a subspace, zero-extended.

        values[j] is the image of the j-th basis vector; it is stored at the
        j-th pivot word, so coordinate readout reproduces the map on the
        whole subspace.
        """
        words = space.pivot_words()
        if len(values) != len(words):
            raise ShapeMismatch("one image per basis vector required")
        if not values:
            raise ShapeMismatch("cannot infer codomain of empty map")
        v0 = values[0]
        return cls(space.nletters, space.degree, v0.degree, dict(zip(words, values)))

    def is_zero(self):
        return not self.images

    def apply(self, t):
        if t.degree != self.deg_in or t.nletters != self.nletters:
            raise ShapeMismatch("map applied to tensor of wrong shape")
        acc = {}
        for w, c in t.terms.items():
            img = self.images.get(w)
            if img is None:
                continue
            for w2, c2 in img.terms.items():
                cur = acc.get(w2)
                s = qadd(cur, qmul(c, c2)) if cur is not None else qmul(c, c2)
                if s[0] == 0 and s[1] == 0:
                    acc.pop(w2, None)
                else:
                    acc[w2] = s
        out = Tensor.__new__(Tensor)
        out.nletters, out.degree, out.terms = self.nletters, self.deg_out, acc
        return out

    def _check(self, other):
        if (
            self.nletters != other.nletters
            or self.deg_in != other.deg_in
            or self.deg_out != other.deg_out
        ):
            raise ShapeMismatch("map shape mismatch")

    def __add__(self, other):
        self._check(other)
        images = dict(self.images)
        for w, img in other.images.items():
            cur = images.get(w)
            s = img if cur is None else cur + img
            if s.is_zero():
                images.pop(w, None)
            else:
                images[w] = s
        out = Lin.__new__(Lin)
        out.nletters, out.deg_in, out.deg_out = self.nletters, self.deg_in, self.deg_out
        out.images = images
        return out

    def __sub__(self, other):
        return self + other.scale((-1, 0, 1))

    def __neg__(self):
        return self.scale((-1, 0, 1))

    def scale(self, coeff):
        images = {}
        for w, img in self.images.items():
            s = img.scale(coeff)
            if not s.is_zero():
                images[w] = s
        out = Lin.__new__(Lin)
        out.nletters, out.deg_in, out.deg_out = self.nletters, self.deg_in, self.deg_out
        out.images = images
        return out

    def compose(self, other):
        """self after other."""
        if other.deg_out != self.deg_in or other.nletters != self.nletters:
            raise ShapeMismatch("composition degree mismatch")
        images = {w: self.apply(img) for w, img in other.images.items()}
        return Lin(self.nletters, other.deg_in, self.deg_out, images)

    def tensor(self, other):
        if self.nletters != other.nletters:
            raise ShapeMismatch("tensor of maps over different alphabets")
        images = {}
        for w1, t1 in self.images.items():
            for w2, t2 in other.images.items():
                images[w1 + w2] = t1.tensor(t2)
        return Lin(
            self.nletters,
            self.deg_in + other.deg_in,
            self.deg_out + other.deg_out,
            images,
        )

    def widen(self, nletters):
        images = {w: img.widen(nletters) for w, img in self.images.items()}
        out = Lin.__new__(Lin)
        out.nletters, out.deg_in, out.deg_out = nletters, self.deg_in, self.deg_out
        out.images = images
        return out

    def __eq__(self, other):
        if not isinstance(other, Lin):
            return NotImplemented
        return (
            self.nletters == other.nletters
            and self.deg_in == other.deg_in
            and self.deg_out == other.deg_out
            and self.images == other.images
        )

    def __hash__(self):
        return hash(
            (
                self.nletters,
                self.deg_in,
                self.deg_out,
                tuple(sorted((w, t.key()) for w, t in self.images.items())),
            )
        )

    def equal_on(self, other, tensors):
        """Pointwise agreement on a family of tensors."""
        return all(self.apply(t) == other.apply(t) for t in tensors)

    def __repr__(self):
        return "Lin(%d->%d, %d words)" % (self.deg_in, self.deg_out, len(self.images))


class BlockMap:
    """Rectangular grid of Lins with common domain and codomain degrees."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries):
        if not entries or not entries[0]:
            raise ShapeMismatch("empty block matrix")
        rows = len(entries)
        cols = len(entries[0])
        e00 = entries[0][0]
        for row in entries:
            if len(row) != cols:
                raise ShapeMismatch("ragged block matrix")
            for e in row:
                e00._check(e)
        self.rows = rows
        self.cols = cols
        self.entries = tuple(tuple(row) for row in entries)

    @property
    def nletters(self):
        return self.entries[0][0].nletters

    @property
    def deg_in(self):
        return self.entries[0][0].deg_in

    @property
    def deg_out(self):
        return self.entries[0][0].deg_out

    def entry(self, i, j):
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, BlockMap):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def scale(self, coeff):
        return BlockMap(
            [[e.scale(coeff) for e in row] for row in self.entries]
        )

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeMismatch("block shape mismatch")
        return BlockMap(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
                for i in range(self.rows)
            ]
        )

    def __sub__(self, other):
        return self + other.scale((-1, 0, 1))

    def __neg__(self):
        return self.scale((-1, 0, 1))

    def widen(self, nletters):
        return BlockMap([[e.widen(nletters) for e in row] for row in self.entries])

    def __repr__(self):
        return "BlockMap(%dx%d, deg %d->%d)" % (
            self.rows,
            self.cols,
            self.deg_in,
            self.deg_out,
        )


def box(f, g):
    """Tensor-product of block matrices: entry (i,j) = sum_l f_il (x) g_lj."""
    if f.cols != g.rows:
        raise ShapeMismatch("box inner dimension mismatch")
    out = []
    for i in range(f.rows):
        row = []
        for j in range(g.cols):
            acc = None
            for l in range(f.cols):
                term = f.entries[i][l].tensor(g.entries[l][j])
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return BlockMap(out)


def bullet(h, f):
    """Composition of block matrices: entry (i,j) = sum_l h_il after f_lj."""
    if h.cols != f.rows:
        raise ShapeMismatch("bullet inner dimension mismatch")
    out = []
    for i in range(h.rows):
        row = []
        for j in range(f.cols):
            acc = None
            for l in range(h.cols):
                term = h.entries[i][l].compose(f.entries[l][j])
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return BlockMap(out)


def transpose(f):
    return BlockMap(
        [[f.entries[j][i] for j in range(f.rows)] for i in range(f.cols)]
    )


def scalar_action(matrix, nletters, deg):
    """Lift a scalar matrix to a BlockMap acting by multiplication on degree
    deg: entry (i,j) sends v to matrix[i][j]*v."""
    ident = Lin.identity(nletters, deg)
    return BlockMap([[ident.scale(c) for c in row] for row in matrix])


def column_action(f, column):
    """Apply a block matrix to a column of tensors: out_s = sum_l f_sl(v_l)."""
    if f.cols != len(column):
        raise ShapeMismatch("column length mismatch")
    out = []
    for s in range(f.rows):
        acc = None
        for l in range(f.cols):
            term = f.entries[s][l].apply(column[l])
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def underline_apply(f, matrix):
    """Collapse a matrix of tensors through a same-shaped matrix of maps:
    the sum over all positions of f_ij applied to matrix[i][j]."""
    if len(matrix) != f.rows or any(len(r) != f.cols for r in matrix):
        raise ShapeMismatch("underline shape mismatch")
    acc = None
    for i in range(f.rows):
        for j in range(f.cols):
            term = f.entries[i][j].apply(matrix[i][j])
            acc = term if acc is None else acc + term
    return acc


def diag_power(phi, r):
    """r x r diagonal block matrix with phi on the diagonal."""
    zero = Lin.zero(phi.nletters, phi.deg_in, phi.deg_out)
    return BlockMap(
        [[phi if i == j else zero for j in range(r)] for i in range(r)]
    )


def lambda_y(nletters_hat, nletters):
    """Column map sending the empty word to the two adjoined letters:
    entry (s,0) is 1 -> y_{s+1}."""
    return BlockMap(
        [
            [
                Lin(
                    nletters_hat,
                    0,
                    1,
                    {(): Tensor.word(nletters_hat, (nletters + s,))},
                )
            ]
            for s in range(2)
        ]
    )


def sigma_power(sigma, i, cache=None):
    """i-fold box power of a 2x2 degree-1 block matrix; i = 0 is the 1x1
    empty-word identity viewed as diag(id, id) on degree 0."""
    if cache is not None and i in cache:
        return cache[i]
    if i == 0:
        out = diag_power(Lin.identity(sigma.nletters, 0), 2)
    elif i == 1:
        out = sigma
    else:
        out = box(sigma, sigma_power(sigma, i - 1, cache))
    if cache is not None:
        cache[i] = out
    return out


def aux_calculus(kind, *args):
    """Dispatcher for the auxiliary matrix operations."""
    table = {
        "transpose": transpose,
        "scalar_action": scalar_action,
        "column_action": column_action,
        "diag_power": diag_power,
    }
    if kind not in table:
        raise ShapeMismatch("unknown aux_calculus kind %r" % (kind,))
    return table[kind](*args)
