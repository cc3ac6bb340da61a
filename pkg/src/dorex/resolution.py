"""Degree-truncated minimal free resolution of the trivial module over the
extended algebra.

Each homological position is a direct sum of Koszul spaces of the base
algebra tensored with shifted copies of the extended algebra, in a uniform
three-row pattern.  Differentials and the connecting chain maps are stored
by their values on module generators, with degree-one coefficients in the
extended algebra; matrices in a fixed internal degree come from the graded
word bases and exact left-multiplication normal forms.
"""

from ._kernel import qadd, qmul
from .blockcalc import box
from .exact_linalg import (
    InternalCheckError,
    Scalar,
    Tensor,
    head_slice,
)

__all__ = [
    "ComplexBroken",
    "ComplexTruncation",
    "GenMap",
    "NotExact",
    "NotMinimal",
    "Tower",
    "assemble_F",
    "chain_identity_report",
    "lambda_square_check",
    "verify_resolution",
]


class ComplexBroken(InternalCheckError):
    """Two consecutive differentials do not compose to zero."""

    def __init__(self, message, position=None, degree=None):
        super().__init__(message)
        self.position = position
        self.degree = degree


class NotExact(InternalCheckError):
    """A homology group in the checked window is nonzero."""

    def __init__(self, message, position=None, degree=None):
        super().__init__(message)
        self.position = position
        self.degree = degree


class NotMinimal(InternalCheckError):
    """A differential entry has a scalar (degree-zero) component."""

    def __init__(self, message, position=None, degree=None):
        super().__init__(message)
        self.position = position
        self.degree = degree


class Tower:
    """Free summands at one homological position.

    Each summand is (role, copy, koszul_index, twist); generators enumerate
    the canonical basis of each Koszul space in summand order.  Generator
    degree is koszul_index + twist.
    """

    def __init__(self, A, summands):
        self.summands = list(summands)
        self.gens = []
        self.bases = []
        for pos, (role, copy, i, twist) in enumerate(self.summands):
            basis = A.koszul(i).basis()
            self.bases.append(basis)
            for j in range(len(basis)):
                self.gens.append((pos, j, i + twist))

    @property
    def rank(self):
        return len(self.gens)

    def rank_pattern(self):
        return [len(b) for b in self.bases]

    def gen_offset(self, pos):
        off = 0
        for p, basis in enumerate(self.bases):
            if p == pos:
                return off
            off += len(basis)
        raise IndexError(pos)

    def dim_at(self, B, k):
        total = 0
        for _, _, deg in self.gens:
            if k - deg >= 0:
                total += B.dim(k - deg)
        return total


class GenMap:
    """Right-module map stored on generators.

    images[a] is a list of (target generator index, coefficient tensor over
    the enlarged alphabet); coefficients left-multiply the module part when
    the map is extended.
    """

    def __init__(self, B, source, target, images):
        self.B = B
        self.source = source
        self.target = target
        self.images = images

    def compose(self, other):
        """self applied after other (coefficients concatenate on the left)."""
        images = []
        for terms in other.images:
            acc = {}
            for mid, beta in terms:
                for tgt, gamma in self.images[mid]:
                    piece = gamma.tensor(beta)
                    cur = acc.get(tgt)
                    acc[tgt] = piece if cur is None else cur + piece
            images.append([(t, c) for t, c in sorted(acc.items()) if not c.is_zero()])
        return GenMap(self.B, other.source, self.target, images)

    def __sub__(self, other):
        images = []
        for terms_a, terms_b in zip(self.images, other.images):
            acc = {}
            for tgt, c in terms_a:
                cur = acc.get(tgt)
                acc[tgt] = c if cur is None else cur + c
            for tgt, c in terms_b:
                cur = acc.get(tgt)
                acc[tgt] = -c if cur is None else cur - c
            images.append([(t, c) for t, c in sorted(acc.items()) if not c.is_zero()])
        return GenMap(self.B, self.source, self.target, images)

    def __add__(self, other):
        images = []
        for terms_a, terms_b in zip(self.images, other.images):
            acc = {}
            for tgt, c in list(terms_a) + list(terms_b):
                cur = acc.get(tgt)
                acc[tgt] = c if cur is None else cur + c
            images.append([(t, c) for t, c in sorted(acc.items()) if not c.is_zero()])
        return GenMap(self.B, self.source, self.target, images)

    def is_zero_in_B(self):
        """True when every coefficient vanishes in the graded quotient."""
        for terms in self.images:
            for _, c in terms:
                if self.B.nf_tensor(c):
                    return False
        return True

    def matrix(self, k):
        """Row-dict matrix of the degree-k component.

        Rows run over (source generator, transversal word) pairs; columns
        over the same pairs on the target side.
        """
        B = self.B
        offsets = []
        off = 0
        for _, _, deg in self.target.gens:
            offsets.append(off)
            if k - deg >= 0:
                off += B.dim(k - deg)
        ncols = off
        tidx = {}
        rows = []
        nrows = 0
        for a, (_, _, da) in enumerate(self.source.gens):
            q = k - da
            if q < 0:
                continue
            for u in B.transversal(q):
                row = {}
                for b, beta in self.images[a]:
                    db = self.target.gens[b][2]
                    qb = k - db
                    if qb < 0:
                        continue
                    if qb not in tidx:
                        tidx[qb] = {w: p for p, w in enumerate(B.transversal(qb))}
                    idx = tidx[qb]
                    prod = beta.tensor(Tensor.word(beta.nletters, u))
                    for w, c in B.nf_tensor(prod).items():
                        col = offsets[b] + idx[w]
                        cur = row.get(col)
                        s = qadd(cur, c) if cur is not None else c
                        if s[0] == 0 and s[1] == 0:
                            row.pop(col, None)
                        else:
                            row[col] = s
                rows.append(row)
                nrows += 1
        return rows, nrows, ncols


def _mat_product(rows_a, rows_b):
    """Row-dict product: source rows through mid rows."""
    out = []
    for row in rows_a:
        acc = {}
        for mid, c in row.items():
            for col, c2 in rows_b[mid].items():
                cur = acc.get(col)
                s = qadd(cur, qmul(c, c2)) if cur is not None else qmul(c, c2)
                if s[0] == 0 and s[1] == 0:
                    acc.pop(col, None)
                else:
                    acc[col] = s
        out.append(acc)
    return out


class ComplexTruncation:
    """Towers, differentials, and the connecting chain maps."""

    def __init__(self, A, ext, quad, D):
        self.A = A
        self.ext = ext
        self.quad = quad
        self.D = D
        self.B = ext.B
        self.d = ext.cert.d
        self.towers = {}
        self.diffs = {}
        top = self.d + 2
        for m in range(top + 1):
            tower = self._tower(m)
            if tower.rank:
                self.towers[m] = tower
        for m in sorted(self.towers):
            if m - 1 in self.towers:
                self.diffs[m] = self._differential(m)

    # towers ------------------------------------------------------------

    def _tower(self, m):
        summands = []
        if m - 2 >= 0 and self.A.koszul(m - 2).dim:
            summands.append(("a", 0, m - 2, 2))
        if m - 1 >= 0 and self.A.koszul(m - 1).dim:
            summands.append(("b", 0, m - 1, 1))
            summands.append(("b", 1, m - 1, 1))
        if self.A.koszul(m).dim:
            summands.append(("c", 0, m, 0))
        return Tower(self.A, summands)

    def _single(self, i, twist, copies):
        roles = [("s", c, i, twist) for c in range(copies)]
        return Tower(self.A, roles)

    # generator-level chain maps ----------------------------------------

    def _sigma_y_column(self, i, w, s):
        """sum_l (box power row s of sigma at w) tensor y_l plus the level-i
        right lift, factored over the Koszul basis with degree-1
        coefficients: returns {basis index: coefficient tensor}."""
        A, ext, quad = self.A, self.ext, self.quad
        n = ext.nletters
        nhat = ext.nhat
        space = A.koszul(i)
        basis = space.basis()
        acc = {}
        sig = ext.sigma_pow(i)
        for l in range(2):
            img = sig.entry(s, l).apply(w)
            if img.is_zero():
                continue
            coords = space.coords(img)
            if coords is None:
                raise InternalCheckError("box power leaves the Koszul space")
            for j, c in enumerate(coords):
                if c.is_zero():
                    continue
                y = Tensor.word(nhat, (n + l,)).scale(c)
                cur = acc.get(j)
                acc[j] = y if cur is None else cur + y
        if i in quad.delta_r:
            img = quad.delta_r[i].entry(s, 0).apply(w)
            for j, bvec in enumerate(basis):
                piece = head_slice(img, min(bvec.terms)).widen(nhat)
                if piece.is_zero():
                    continue
                cur = acc.get(j)
                acc[j] = piece if cur is None else cur + piece
        return acc

    def partial_map(self, i, twist, copies=1):
        """Koszul differential: split the last base letter into the module."""
        A = self.A
        nhat = self.ext.nhat
        src = self._single(i, twist, copies)
        tgt = self._single(i - 1, twist, copies)
        lower = A.koszul(i - 1).basis()
        images = []
        for copy in range(copies):
            off = tgt.gen_offset(copy) if tgt.summands else 0
            for w in A.koszul(i).basis():
                terms = []
                for j, bvec in enumerate(lower):
                    v = head_slice(w, min(bvec.terms))
                    if not v.is_zero():
                        terms.append((off + j, v.widen(nhat)))
                images.append(terms)
        return GenMap(self.B, src, tgt, images)

    def f_map(self, i, include_delta=True):
        """W_i (twist 2) into two twist-1 copies through the mixing matrix."""
        ext = self.ext
        src = self._single(i, 2, 1)
        tgt = self._single(i, 1, 2)
        images = []
        for w in self.A.koszul(i).basis():
            cols = [
                self._sigma_y_column(i, w, s)
                if include_delta
                else self._sigma_only_column(i, w, s)
                for s in range(2)
            ]
            terms = {}
            for s in range(2):
                off = tgt.gen_offset(s)
                for t in range(2):
                    c = ext.J[s][t]
                    if c.is_zero():
                        continue
                    for j, coeff in cols[t].items():
                        key = off + j
                        piece = coeff.scale(c)
                        cur = terms.get(key)
                        terms[key] = piece if cur is None else cur + piece
            images.append(
                [(t, c) for t, c in sorted(terms.items()) if not c.is_zero()]
            )
        return GenMap(self.B, src, tgt, images)

    def _sigma_only_column(self, i, w, s):
        acc = {}
        A, ext = self.A, self.ext
        n = ext.nletters
        nhat = ext.nhat
        space = A.koszul(i)
        sig = ext.sigma_pow(i)
        for l in range(2):
            img = sig.entry(s, l).apply(w)
            if img.is_zero():
                continue
            coords = space.coords(img)
            for j, c in enumerate(coords):
                if c.is_zero():
                    continue
                y = Tensor.word(nhat, (n + l,)).scale(c)
                cur = acc.get(j)
                acc[j] = y if cur is None else cur + y
        return acc

    def g_map(self, i, include_delta=True):
        """Two twist-1 copies of W_i onto the untwisted copy."""
        src = self._single(i, 1, 2)
        tgt = self._single(i, 0, 1)
        images = []
        for s in range(2):
            for w in self.A.koszul(i).basis():
                col = (
                    self._sigma_y_column(i, w, s)
                    if include_delta
                    else self._sigma_only_column(i, w, s)
                )
                images.append(
                    [(j, c) for j, c in sorted(col.items()) if not c.is_zero()]
                )
        return GenMap(self.B, src, tgt, images)

    def h_map(self, i):
        """Homotopy block: signed mixed rows into the next Koszul space plus
        the level-i correction; the row part must land in that space."""
        A, ext, quad = self.A, self.ext, self.quad
        n = ext.nletters
        nhat = ext.nhat
        src = self._single(i, 2, 1)
        tgt = self._single(i + 1, 0, 1)
        space = A.koszul(i + 1)
        basis = space.basis()
        images = []
        for w in A.koszul(i).basis():
            terms = {}
            for t in range(2):
                part = Tensor.zero(n, i + 1)
                for u in range(1, i + 1):
                    row = box(quad.gamma_r[u], ext.sigma_pow(i - u))
                    img = row.entry(0, t).apply(w)
                    if (i + u) % 2 == 0:
                        part = part + img
                    else:
                        part = part - img
                if part.is_zero():
                    continue
                coords = space.coords(part)
                if coords is None:
                    raise InternalCheckError(
                        "homotopy row part leaves the Koszul space"
                    )
                for j, c in enumerate(coords):
                    if c.is_zero():
                        continue
                    y = Tensor.word(nhat, (n + t,)).scale(c)
                    cur = terms.get(j)
                    terms[j] = y if cur is None else cur + y
            if i in quad.upsilon_r:
                img = quad.upsilon_r[i].apply(w)
                for j, bvec in enumerate(basis):
                    piece = head_slice(img, min(bvec.terms)).widen(nhat)
                    if piece.is_zero():
                        continue
                    cur = terms.get(j)
                    terms[j] = piece if cur is None else cur + piece
            images.append(
                [(t, c) for t, c in sorted(terms.items()) if not c.is_zero()]
            )
        return GenMap(self.B, src, tgt, images)

    # differentials -----------------------------------------------------

    def _differential(self, m):
        src = self.towers[m]
        tgt = self.towers[m - 1]
        images = [[] for _ in range(src.rank)]

        def tgt_role(role, copy):
            for pos, (r, c, _, _) in enumerate(tgt.summands):
                if r == role and c == copy:
                    return pos
            return None

        def splice(block, src_pos_list, tgt_pos_list, negate=False):
            """Copy a standalone-block GenMap into the assembled images."""
            src_offsets = []
            for pos in src_pos_list:
                src_offsets.append(src.gen_offset(pos))
            blk_src_off = []
            off = 0
            for basis in block.source.bases:
                blk_src_off.append(off)
                off += len(basis)
            blk_tgt_bounds = []
            off = 0
            for basis in block.target.bases:
                blk_tgt_bounds.append((off, off + len(basis)))
                off += len(basis)
            tgt_offsets = [tgt.gen_offset(pos) for pos in tgt_pos_list]
            for bpos, spos in enumerate(src_pos_list):
                nb = len(block.source.bases[bpos])
                for j in range(nb):
                    terms = block.images[blk_src_off[bpos] + j]
                    out = images[src_offsets[bpos] + j]
                    for t, c in terms:
                        for tpos in range(len(blk_tgt_bounds)):
                            lo, hi = blk_tgt_bounds[tpos]
                            if lo <= t < hi:
                                out.append(
                                    (
                                        tgt_offsets[tpos] + (t - lo),
                                        -c if negate else c,
                                    )
                                )
                                break

        role_pos = {}
        for pos, (r, c, _, _) in enumerate(src.summands):
            role_pos[(r, c)] = pos

        if ("a", 0) in role_pos:
            i = m - 2
            if tgt_role("a", 0) is not None:
                splice(
                    self.partial_map(i, 2),
                    [role_pos[("a", 0)]],
                    [tgt_role("a", 0)],
                )
            if tgt_role("b", 0) is not None:
                splice(
                    self.f_map(i),
                    [role_pos[("a", 0)]],
                    [tgt_role("b", 0), tgt_role("b", 1)],
                    negate=True,
                )
            if tgt_role("c", 0) is not None and self.A.koszul(i + 1).dim:
                splice(
                    self.h_map(i),
                    [role_pos[("a", 0)]],
                    [tgt_role("c", 0)],
                )
        if ("b", 0) in role_pos:
            i = m - 1
            if tgt_role("b", 0) is not None:
                splice(
                    self.partial_map(i, 1, copies=2),
                    [role_pos[("b", 0)], role_pos[("b", 1)]],
                    [tgt_role("b", 0), tgt_role("b", 1)],
                    negate=True,
                )
            if tgt_role("c", 0) is not None:
                splice(
                    self.g_map(i),
                    [role_pos[("b", 0)], role_pos[("b", 1)]],
                    [tgt_role("c", 0)],
                )
        if ("c", 0) in role_pos:
            i = m
            if tgt_role("c", 0) is not None:
                splice(
                    self.partial_map(i, 0),
                    [role_pos[("c", 0)]],
                    [tgt_role("c", 0)],
                )

        merged = []
        for terms in images:
            acc = {}
            for t, c in terms:
                cur = acc.get(t)
                acc[t] = c if cur is None else cur + c
            merged.append(
                [(t, c) for t, c in sorted(acc.items()) if not c.is_zero()]
            )
        return GenMap(self.B, src, tgt, merged)

    def matrix(self, m, k):
        return self.diffs[m].matrix(k)

    def rank_patterns(self):
        return {m: tower.rank_pattern() for m, tower in self.towers.items()}


def assemble_F(A, ext, quad, D):
    """Build towers and differentials with the extended algebra computed
    through internal degree D."""
    if ext.B is None:
        from .extension import build_B

        build_B(ext, max(D, 6))
    ext.B.build(D)
    return ComplexTruncation(A, ext, quad, D)


def verify_resolution(F, D=None):
    """Exact checks per internal degree: composites vanish, interior
    positions are exact by rank counting, the first map hits every positive
    degree of the algebra, and no differential entry has a scalar part."""
    from ._kernel import rank_rows

    if D is None:
        D = F.D
    B = F.B
    positions = sorted(F.towers)
    top = positions[-1]

    for m, diff in F.diffs.items():
        src = diff.source
        for a, terms in enumerate(diff.images):
            da = src.gens[a][2]
            for t, c in terms:
                db = diff.target.gens[t][2]
                if da - db < 1 or c.degree != da - db:
                    raise NotMinimal(
                        "differential entry with a scalar component",
                        position=m,
                        degree=da - db,
                    )

    ranks = {}
    for k in range(D + 1):
        for m in positions:
            if m == 0:
                continue
            if m in F.diffs:
                rows, nrows, ncols = F.matrix(m, k)
                ranks[(m, k)] = rank_rows(rows)
                if m - 1 in F.diffs:
                    rows_prev, _, _ = F.matrix(m - 1, k)
                    prod = _mat_product(rows, rows_prev)
                    if any(prod_row for prod_row in prod):
                        raise ComplexBroken(
                            "consecutive differentials do not vanish",
                            position=m,
                            degree=k,
                        )

    for k in range(1, D + 1):
        want = B.dim(k)
        got = ranks.get((1, k), 0)
        if got != want:
            raise NotExact(
                "augmentation cokernel is larger than the base field",
                position=0,
                degree=k,
            )

    for k in range(D + 1):
        for m in positions:
            if m == 0:
                continue
            dim_here = F.towers[m].dim_at(B, k)
            r_in = ranks.get((m + 1, k), 0)
            r_out = ranks.get((m, k), 0)
            if r_in + r_out != dim_here:
                raise NotExact(
                    "rank count misses the middle dimension",
                    position=m,
                    degree=k,
                )

    return {
        "ok": True,
        "degree_bound": D,
        "rank_pattern": F.rank_patterns(),
        "ranks": {"%d,%d" % key: val for key, val in sorted(ranks.items())},
    }


def chain_identity_report(F):
    """The two chain-map squares and the homotopy identity, checked on
    generators in the graded quotient (hence in every internal degree)."""
    d = F.d
    report = {}
    for i in range(1, d + 1):
        lhs = F.f_map(i - 1).compose(F.partial_map(i, 2))
        rhs = F.partial_map(i, 1, copies=2).compose(F.f_map(i))
        report["f_square_%d" % i] = (lhs - rhs).is_zero_in_B()
        lhs = F.partial_map(i, 0).compose(F.g_map(i))
        rhs = F.g_map(i - 1).compose(F.partial_map(i, 1, copies=2))
        report["g_square_%d" % i] = (lhs - rhs).is_zero_in_B()
    for i in range(1, d + 1):
        terms = F.g_map(i).compose(F.f_map(i))
        terms = terms - F.h_map(i - 1).compose(F.partial_map(i, 2))
        if F.A.koszul(i + 1).dim:
            partialh = F.partial_map(i + 1, 0).compose(F.h_map(i))
            terms = terms - partialh
        report["homotopy_%d" % i] = terms.is_zero_in_B()
    return report


def lambda_square_check(F, i):
    """The box-power/adjoined-letter square with the lifts removed collapses
    to zero in the graded quotient."""
    gf = F.g_map(i, include_delta=False).compose(F.f_map(i, include_delta=False))
    return gf.is_zero_in_B()
