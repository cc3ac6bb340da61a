"""Independent recomputations used to cross-check produced values.

Everything here deliberately avoids the package's incremental caches and
recursions: graded dimensions come from one big elimination over full word
bases, intersection towers are built all at once from their defining
sandwiches, and slot rotations are unrolled into adjacent swaps.
"""

from dorex.exact_linalg import (
    Subspace,
    Tensor,
    intersect,
    sandwich,
    words_of_degree,
)


def embedded_relation_rows(nletters, relations, k):
    """Every word-embedded copy of every relation inside degree k."""
    rows = []
    for r in relations:
        deg = r.degree
        if deg > k:
            continue
        for a in range(k - deg + 1):
            b = k - deg - a
            for left in words_of_degree(a, nletters):
                for right in words_of_degree(b, nletters):
                    t = (
                        Tensor.word(nletters, left)
                        .tensor(r)
                        .tensor(Tensor.word(nletters, right))
                    )
                    rows.append(t)
    return rows


def word_quotient_dim(nletters, relations, k):
    """Graded dimension of the quotient by the two-sided ideal, computed as
    (number of words) minus the rank of all embedded relation rows."""
    if k == 0:
        return 1
    span = Subspace.from_tensors(
        nletters, k, embedded_relation_rows(nletters, relations, k)
    )
    return nletters**k - span.dim


def koszul_all_at_once(relation_space, i):
    """The degree-i intersection of every relation sandwich, directly."""
    n = relation_space.nletters
    if i == 0:
        return Subspace.full(n, 0)
    if i == 1:
        return Subspace.full(n, 1)
    spaces = [sandwich(relation_space, s, i - 2 - s) for s in range(i - 1)]
    return intersect(spaces)


def swap_adjacent(t, j):
    """Exchange slots j and j+1 of every word."""
    out = Tensor.zero(t.nletters, t.degree)
    for word, coef in t.items():
        w = list(word)
        w[j], w[j + 1] = w[j + 1], w[j]
        out = out + Tensor.word(t.nletters, tuple(w)).scale(coef)
    return out


def rotate_by_swaps(t, i):
    """Slot rotation tau^i unrolled as i adjacent swaps from the left."""
    cur = t
    for j in range(i):
        cur = swap_adjacent(cur, j)
    return cur


def extended_relation_tensors(ve):
    """Degree-2 defining tensors of the extension over n+2 letters, built
    from the raw input data: the base relations, the mixing relation
    between the adjoined letters, and one straightening relation per
    (adjoined letter, generator)."""
    A = ve.A
    n = A.nletters
    nhat = n + 2
    rels = [r.widen(nhat) for r in A.presentation.relations.basis()]
    y1, y2 = n, n + 1
    mix = (
        Tensor.word(nhat, (y2, y1))
        - Tensor.word(nhat, (y1, y2)).scale(ve.p12)
        - Tensor.word(nhat, (y1, y1)).scale(ve.p11)
    )
    rels.append(mix)
    for g in range(n):
        xg = Tensor.word(n, (g,))
        for s in range(2):
            t = Tensor.word(nhat, (n + s, g))
            for l in range(2):
                img = ve.sigma.entry(s, l).apply(xg).widen(nhat)
                t = t - img.tensor(Tensor.word(nhat, (n + l,)))
            t = t - ve.delta.entry(s, 0).apply(xg).widen(nhat)
            rels.append(t)
    return rels


def extended_dim(ve, k):
    """Graded dimension of the extension by the word-quotient oracle."""
    return word_quotient_dim(ve.nhat, extended_relation_tensors(ve), k)


def derivative_span(omega_hat, d):
    """Span of all d-fold right partial derivatives: bucket the potential
    by its trailing d letters and collect the leading degree-2 slices."""
    nhat = omega_hat.nletters
    buckets = {}
    for word, coef in omega_hat.items():
        tail = word[2:]
        head = word[:2]
        cur = buckets.setdefault(tail, Tensor.zero(nhat, 2))
        buckets[tail] = cur + Tensor.word(nhat, head).scale(coef)
    return Subspace.from_tensors(nhat, 2, list(buckets.values()))
