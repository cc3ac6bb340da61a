"""Construction of the auxiliary map quadruple over a validated extension.

Levels are indexed by the Koszul degree i.  Level 1 is the lift column
itself; level 2 comes from splitting the derivation extension of the
relations into a right part (in W_2 x V) and a left part (in V x W_2);
higher right parts are solved degree by degree against the congruence
V^(i-1) x R with the free coordinates zeroed, and every left part follows
from an exact recursion and is asserted, never re-solved.  The
second family (upsilon) splits the quadratic self-pairing the same way.

All maps are stored on the pivot words of the canonical W_i bases, so they
extend by zero and factor correctly through sandwich-shaped inputs.
"""

from .blockcalc import (
    BlockMap,
    Lin,
    box,
    bullet,
    column_action,
    scalar_action,
    underline_apply,
)
from .exact_linalg import (
    InternalCheckError,
    NoSolution,
    Subspace,
    Tensor,
    in_sandwich,
    intersect,
    sandwich,
    solve_affine,
    tensor_sub,
)
from .extension import ExtensionInput

__all__ = [
    "ContainmentFailure",
    "Quadruple",
    "SplitFailure",
    "build_quadruple",
    "extend_delta",
    "extend_upsilon",
    "gamma_delta",
    "perturb_extension",
    "random_element",
    "row_relation_report",
    "split_degree2",
    "sum_identity_report",
]


class SplitFailure(InternalCheckError):
    """A guaranteed right/left split could not be found."""


class ContainmentFailure(InternalCheckError):
    """A map image left the subspace the theory guarantees."""


class Quadruple:
    """The four families plus their derived rows, level by level."""

    def __init__(self, d):
        self.d = d
        self.delta_r = {}
        self.delta_l = {}
        self.upsilon_r = {}
        self.upsilon_l = {}
        self.gamma_r = {}
        self.gamma_l = {}
        self.delta_cap = {}
        self.top_upsilon = False


def random_element(space, rng):
    """Random integer combination of a canonical basis (freedom sampling)."""
    t = Tensor.zero(space.nletters, space.degree)
    for b in space.basis():
        c = rng.randint(-3, 3)
        if c:
            t = t + b.scale((c, 0, 1))
    return t


def perturb_extension(ve, rng):
    """Shift each lift component by a random relation element.

    Any two lifts of the same degree-one data differ exactly by such a
    shift, so the perturbed input validates whenever the original does.
    """
    A = ve.A
    n = A.nletters
    R = A.presentation.relations
    delta = {}
    for g in range(n):
        delta[g] = [
            ve.input.delta[g][s] + random_element(R, rng) for s in range(2)
        ]
    return ExtensionInput(ve.p12, ve.p11, ve.input.sigma, delta)


def _col(blockmap, t):
    """Apply a 2x1 block matrix to one tensor, returning the two entries."""
    return [blockmap.entry(s, 0).apply(t) for s in range(2)]


def _freedom(A, i):
    """Solution ambiguity of a level-i right solve: (W_i x V) meet
    (V^(i-1) x R), which coincides with W_(i+1)."""
    return intersect(
        [
            tensor_sub(A.koszul(i), Subspace.full(A.nletters, 1)),
            sandwich(A.presentation.relations, i - 1, 0),
        ]
    )


def split_degree2(ext, rng=None):
    """Split the derivation extension on W_2 and the self-pairing on W_1.

    Per basis vector and component: the right part is the canonical element
    of W_2 x V congruent to the image modulo V x R; the remainder is the
    left part and must land in V x W_2 exactly.
    """
    A = ext.A
    n = ext.nletters
    R = A.presentation.relations
    W2 = A.koszul(2)
    fullV = Subspace.full(n, 1)
    der2 = ext.derivation_ext(2)
    congr = sandwich(R, 1, 0)
    constr = tensor_sub(W2, fullV)
    free = intersect([constr, congr]) if rng is not None else None

    basis2 = W2.basis()
    vals_r = [[], []]
    vals_l = [[], []]
    for w in basis2:
        for s in range(2):
            target = der2.entry(s, 0).apply(w)
            try:
                sol = solve_affine(target, congr, constr)
            except NoSolution as exc:
                raise SplitFailure(
                    "degree-2 containment violated: %s" % (exc,)
                ) from exc
            if rng is not None:
                sol = sol + random_element(free, rng)
            rest = target - sol
            if not in_sandwich(rest, 1, W2, 0):
                raise SplitFailure("degree-2 left part escapes V x W_2")
            vals_r[s].append(sol)
            vals_l[s].append(rest)
    if basis2:
        delta_r2 = BlockMap([[Lin.on_basis(W2, vals_r[s])] for s in range(2)])
        delta_l2 = BlockMap([[Lin.on_basis(W2, vals_l[s])] for s in range(2)])
    else:
        z = Lin.zero(n, 2, 3)
        delta_r2 = BlockMap([[z], [z]])
        delta_l2 = BlockMap([[z], [z]])

    # self-pairing on W_1 = V
    jdelta = bullet(scalar_action(ext.J, n, 2), ext.delta)
    pair = box(ext.sigma, ext.delta) + box(
        ext.delta, BlockMap([[Lin.identity(n, 1)]])
    )
    vals_ur = []
    vals_ul = []
    for g in range(n):
        v = Tensor.word(n, (g,))
        col = _col(jdelta, v)
        target = underline_apply(pair, [[col[0]], [col[1]]])
        try:
            sol = solve_affine(target, congr, constr)
        except NoSolution as exc:
            raise SplitFailure(
                "self-pairing containment violated: %s" % (exc,)
            ) from exc
        if rng is not None:
            sol = sol + random_element(free, rng)
        rest = target - sol
        if not in_sandwich(rest, 1, W2, 0):
            raise SplitFailure("self-pairing left part escapes V x W_2")
        vals_ur.append(sol)
        vals_ul.append(rest)
    ups_r1 = Lin.on_basis(fullV, vals_ur)
    ups_l1 = Lin.on_basis(fullV, vals_ul)
    return delta_r2, delta_l2, ups_r1, ups_l1


def extend_delta(ext, quad, i, rng=None):
    """Right part solved on the W_i basis; left part by the exact recursion
    delta_l[i] = delta_l[i-1] box id + (-1)^i (sigma box delta_r[i-1] -
    delta_r[i]), asserted to land in (V x W_i)^2."""
    A = ext.A
    n = ext.nletters
    Wi = A.koszul(i)
    R = A.presentation.relations
    one = BlockMap([[Lin.identity(n, 1)]])
    tgt_map = box(ext.sigma_pow(i - 1), ext.delta) + box(quad.delta_r[i - 1], one)
    congr = sandwich(R, i - 1, 0)
    constr = tensor_sub(Wi, Subspace.full(n, 1))
    free = _freedom(A, i) if rng is not None else None
    basis = Wi.basis()
    vals_r = [[], []]
    for w in basis:
        for s in range(2):
            target = tgt_map.entry(s, 0).apply(w)
            sol = solve_affine(target, congr, constr)
            if rng is not None:
                sol = sol + random_element(free, rng)
            vals_r[s].append(sol)
    if basis:
        delta_ri = BlockMap([[Lin.on_basis(Wi, vals_r[s])] for s in range(2)])
    else:
        z = Lin.zero(n, i, i + 1)
        delta_ri = BlockMap([[z], [z]])

    sign = (1, 0, 1) if i % 2 == 0 else (-1, 0, 1)
    delta_li = box(quad.delta_l[i - 1], one) + (
        box(ext.sigma, quad.delta_r[i - 1]) - delta_ri
    ).scale(sign)
    for w in basis:
        for s in range(2):
            if not in_sandwich(delta_li.entry(s, 0).apply(w), 1, Wi, 0):
                raise ContainmentFailure(
                    "left delta at level %d escapes V x W_%d" % (i, i)
                )
    return delta_ri, delta_li


def gamma_delta(ext, quad, i):
    """Derived rows and the self-pairing at level i.

    gamma_star[i] entry s: delta_2 after sigma^i_(1s) + sigma^(i+1)_(2s)
    after delta_1, minus p12 and p11 cross terms; delta_cap[i] is the
    underline collapse of (sigma^i box delta + delta_r[i] box id) against
    J * delta_r[i].  Containments are asserted on the W_i basis.
    """
    A = ext.A
    n = ext.nletters
    Wi = A.koszul(i)
    sig_i = ext.sigma_pow(i)
    sig_i1 = ext.sigma_pow(i + 1)
    rows = {}
    for kind in ("r", "l"):
        dmap = (quad.delta_r if kind == "r" else quad.delta_l)[i]
        d1 = dmap.entry(0, 0)
        d2 = dmap.entry(1, 0)
        entries = []
        for s in range(2):
            term = (
                d2.compose(sig_i.entry(0, s))
                + sig_i1.entry(1, s).compose(d1)
                - (
                    d1.compose(sig_i.entry(1, s))
                    + sig_i1.entry(0, s).compose(d2)
                ).scale(ext.p12)
                - (
                    d1.compose(sig_i.entry(0, s))
                    + sig_i1.entry(0, s).compose(d1)
                ).scale(ext.p11)
            )
            entries.append(term)
        rows[kind] = BlockMap([entries])
    basis = Wi.basis()
    R = A.presentation.relations
    for w in basis:
        for s in range(2):
            img_r = rows["r"].entry(0, s).apply(w)
            img_l = rows["l"].entry(0, s).apply(w)
            if i == 1:
                ok_r = R.contains(img_r)
                ok_l = R.contains(img_l)
            else:
                ok_r = in_sandwich(img_r, 0, Wi, 1)
                ok_l = in_sandwich(img_l, 1, Wi, 0)
            if not (ok_r and ok_l):
                raise ContainmentFailure(
                    "derived row at level %d escapes its window" % (i,)
                )

    one = BlockMap([[Lin.identity(n, 1)]])
    collapse = box(sig_i, ext.delta) + box(quad.delta_r[i], one)
    jdr = bullet(scalar_action(ext.J, n, i + 1), quad.delta_r[i])
    vals = []
    for w in basis:
        col = _col(jdr, w)
        vals.append(underline_apply(collapse, [[col[0]], [col[1]]]))
    if basis:
        cap = Lin.on_basis(Wi, vals)
    else:
        cap = Lin.zero(n, i, i + 2)
    return rows["r"], rows["l"], cap


def extend_upsilon(ext, quad, i, rng=None):
    """Right split of the level-i pairing target; left part by recursion.

    Target: delta_cap[i] plus the signed tower of det-power box gamma_l box
    delta terms minus upsilon_r[i-1] x id.  Solved against congruence
    V^i x R with constraint W_(i+1) x V; ambiguity space is W_(i+2).
    """
    A = ext.A
    n = ext.nletters
    Wi = A.koszul(i)
    Wi1 = A.koszul(i + 1)
    R = A.presentation.relations
    one = BlockMap([[Lin.identity(n, 1)]])

    tower = None
    for u in range(1, i):
        det_pow = BlockMap([[ext.det_sigma_pow(i - 1 - u)]])
        piece = box(box(det_pow, quad.gamma_l[u]), ext.delta).entry(0, 0)
        if u % 2 == 1:
            piece = piece.scale((-1, 0, 1))
        tower = piece if tower is None else tower + piece
    upr_prev = quad.upsilon_r[i - 1].tensor(Lin.identity(n, 1))

    congr = sandwich(R, i, 0)
    constr = tensor_sub(Wi1, Subspace.full(n, 1))
    free = (
        intersect([constr, congr]) if rng is not None else None
    )
    basis = Wi.basis()
    vals_r = []
    vals_l = []
    sign = (1, 0, 1) if i % 2 == 0 else (-1, 0, 1)
    sig = ext.sigma
    jdl = bullet(scalar_action(ext.J, n, i + 1), quad.delta_l[i])
    jdr = bullet(scalar_action(ext.J, n, i + 1), quad.delta_r[i])
    mixA = box(sig, quad.delta_r[i])
    mixB = box(quad.delta_l[i], one)
    upl_prev = quad.upsilon_l[i - 1].tensor(Lin.identity(n, 1))
    for w in basis:
        target = quad.delta_cap[i].apply(w) - upr_prev.apply(w)
        if tower is not None:
            target = target + tower.apply(w)
        sol = solve_affine(target, congr, constr)
        if rng is not None:
            sol = sol + random_element(free, rng)
        vals_r.append(sol)

        colL = _col(jdl, w)
        colR = _col(jdr, w)
        mixed = underline_apply(mixA, [[colL[0]], [colL[1]]]) + underline_apply(
            mixB, [[colR[0]], [colR[1]]]
        )
        det_upr = ext.det_sigma.tensor(quad.upsilon_r[i - 1]).apply(w)
        left = (
            -upl_prev.apply(w)
            + (sol - det_upr).scale(sign)
            + mixed
        )
        if not in_sandwich(left, 1, Wi1, 0):
            raise ContainmentFailure(
                "left upsilon at level %d escapes V x W_%d" % (i, i + 1)
            )
        vals_l.append(left)
    if basis:
        ups_r = Lin.on_basis(Wi, vals_r)
        ups_l = Lin.on_basis(Wi, vals_l)
    else:
        ups_r = Lin.zero(n, i, i + 2)
        ups_l = Lin.zero(n, i, i + 2)
    return ups_r, ups_l


def _pad(col, k):
    """Block column with every entry tensored by the degree-k identity."""
    if k == 0:
        return col
    return box(col, BlockMap([[Lin.identity(col.nletters, k)]]))


def _ups_or_zero(family, n, i):
    """A second-family level, or the zero map its codomain forces when the
    level was not built (only the top level can be missing)."""
    got = family.get(i)
    return got if got is not None else Lin.zero(n, i, i + 2)


def _lift_contraction(ext, quad, u, i, extra):
    """Collapse of the two lift families at levels (u, i) padded by `extra`
    identity slots on the right: the sum over components of
    (sigma box right-lift, padded) after (J * padded left-lift) plus
    (padded left-lift) after (J * padded right-lift), a single map raising
    the degree i + extra by two."""
    pad_in = i - u + extra
    jact = ext.j_action(i + 1 + extra)
    g1 = bullet(jact, _pad(quad.delta_l[u], pad_in))
    f1 = _pad(box(ext.sigma, quad.delta_r[u]), pad_in)
    g2 = bullet(jact, _pad(quad.delta_r[u], pad_in))
    f2 = _pad(quad.delta_l[u], pad_in + 1)
    acc = None
    for s in range(2):
        piece = f1.entry(s, 0).compose(g1.entry(s, 0)) + f2.entry(s, 0).compose(
            g2.entry(s, 0)
        )
        acc = piece if acc is None else acc + piece
    return acc


def sum_identity_report(ext, quad):
    """The four alternating-sum identities tying the right families to the
    left ones, each evaluated on the Koszul basis at every dummy degree.

    The first pair compares signed right lifts padded on the right with
    box powers of the matrix map composed onto left lifts (plain and
    shifted-by-one variants).  The second pair does the same for the
    second family, with correction terms built from the lift contraction.
    """
    A = ext.A
    n = ext.nletters
    d = quad.d
    minus = (-1, 0, 1)

    ok_a = True
    for D in range(1, d + 1):
        basis = A.koszul(D).basis()
        lhs = None
        rhs = None
        for i in range(1, D + 1):
            tr = _pad(quad.delta_r[i], D - i)
            tl = box(ext.sigma_pow(D - i), quad.delta_l[i])
            if i % 2 == 1:
                tr = tr.scale(minus)
                tl = tl.scale(minus)
            lhs = tr if lhs is None else lhs + tr
            rhs = tl if rhs is None else rhs + tl
        if D % 2 == 0:
            rhs = rhs.scale(minus)
        diff = lhs - rhs
        for w in basis:
            for s in range(2):
                if not diff.entry(s, 0).apply(w).is_zero():
                    ok_a = False

    ok_b = True
    for D in range(2, d + 1):
        basis = A.koszul(D).basis()
        lhs = None
        rhs = None
        for i in range(1, D):
            tl = _pad(box(ext.sigma_pow(D - i - 1), quad.delta_l[i]), 1)
            tr = _pad(quad.delta_r[i], D - i)
            if i % 2 == 0:
                tl = tl.scale(minus)
            if i % 2 == 1:
                tr = tr.scale(minus)
            lhs = tl if lhs is None else lhs + tl
            rhs = tr if rhs is None else rhs + tr
        if D % 2 == 0:
            rhs = rhs.scale(minus)
        diff = lhs - rhs
        for w in basis:
            for s in range(2):
                if not diff.entry(s, 0).apply(w).is_zero():
                    ok_b = False

    ok_c = True
    for D in range(1, d + 1):
        for w in A.koszul(D).basis():
            lhs = Tensor.zero(n, D + 2)
            rhs = Tensor.zero(n, D + 2)
            for i in range(1, D + 1):
                pad = Lin.identity(n, D - i)
                lhs = lhs + _ups_or_zero(quad.upsilon_r, n, i).tensor(pad).apply(w)
                det_i = ext.det_sigma_pow(D - i)
                term = det_i.tensor(_ups_or_zero(quad.upsilon_l, n, i)).apply(w)
                rhs = rhs + (-term if i % 2 == 1 else term)
                for u in range(1, i + 1):
                    piece = det_i.tensor(_lift_contraction(ext, quad, u, i, 0)).apply(w)
                    rhs = rhs - (-piece if u % 2 == 1 else piece)
            if not (lhs - rhs).is_zero():
                ok_c = False

    ok_d = True
    for D in range(2, d + 1):
        for w in A.koszul(D).basis():
            lhs = Tensor.zero(n, D + 2)
            rhs = Tensor.zero(n, D + 2)
            one = Lin.identity(n, 1)
            for i in range(1, D):
                pad = Lin.identity(n, D - i)
                lhs = lhs + _ups_or_zero(quad.upsilon_r, n, i).tensor(pad).apply(w)
                det_i = ext.det_sigma_pow(D - i - 1)
                term = det_i.tensor(_ups_or_zero(quad.upsilon_l, n, i)).tensor(one).apply(w)
                rhs = rhs + (-term if i % 2 == 1 else term)
                for u in range(1, i + 1):
                    piece = det_i.tensor(_lift_contraction(ext, quad, u, i, 1)).apply(w)
                    rhs = rhs - (-piece if u % 2 == 1 else piece)
            if not (lhs - rhs).is_zero():
                ok_d = False

    return {
        "lift_alternating": ok_a,
        "lift_alternating_shifted": ok_b,
        "pairing_alternating": ok_c,
        "pairing_alternating_shifted": ok_d,
    }


def row_relation_report(ext, quad):
    """Alternating identity between the two derived-row families on the
    Koszul basis at every level: signed rows box-multiplied by matrix-map
    powers against determinant powers box-multiplied by the left rows."""
    A = ext.A
    d = quad.d
    minus = (-1, 0, 1)
    ok = True
    for i in range(1, d + 1):
        basis = A.koszul(i).basis()
        lhs = None
        rhs = None
        for u in range(1, i + 1):
            tr = box(quad.gamma_r[u], ext.sigma_pow(i - u))
            tl = box(BlockMap([[ext.det_sigma_pow(i - u)]]), quad.gamma_l[u])
            if u % 2 == 1:
                tr = tr.scale(minus)
            if (i + u + 1) % 2 == 1:
                tl = tl.scale(minus)
            lhs = tr if lhs is None else lhs + tr
            rhs = tl if rhs is None else rhs + tl
        diff = lhs - rhs
        for w in basis:
            for t in range(2):
                if not diff.entry(0, t).apply(w).is_zero():
                    ok = False
    return {"ok": ok}


def build_quadruple(ext, through_d=False, rng=None):
    """Construct every level: the lift at 1, the splits at 2, the solved
    right parts and recursed left parts up to d, derived rows, and the
    second family through d-1 (through d when requested, where the top
    right part is forced to zero and the top left part must vanish)."""
    d = ext.cert.d
    quad = Quadruple(d)
    quad.delta_r[1] = ext.delta
    quad.delta_l[1] = ext.delta
    if d >= 2:
        dr2, dl2, ur1, ul1 = split_degree2(ext, rng)
        quad.delta_r[2] = dr2
        quad.delta_l[2] = dl2
        quad.upsilon_r[1] = ur1
        quad.upsilon_l[1] = ul1
        for i in range(3, d + 1):
            quad.delta_r[i], quad.delta_l[i] = extend_delta(ext, quad, i, rng)
    else:
        _, _, ur1, ul1 = split_degree2(ext, rng)
        quad.upsilon_r[1] = ur1
        quad.upsilon_l[1] = ul1
    for i in range(1, d + 1):
        quad.gamma_r[i], quad.gamma_l[i], quad.delta_cap[i] = gamma_delta(
            ext, quad, i
        )
    top = d if through_d else d - 1
    for i in range(2, top + 1):
        quad.upsilon_r[i], quad.upsilon_l[i] = extend_upsilon(ext, quad, i, rng)
    quad.top_upsilon = through_d and d >= 2
    return quad
