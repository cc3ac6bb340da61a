"""The twisted potential of the extension: a degree d+2 tensor over the
enlarged alphabet assembled from three sums, kept unnormalized and split
into its three parts so each can be compared term for term.

Part 1 inserts the adjoined-letter pair around box-power images of the top
form; part 2 inserts a single adjoined letter against right-lift images;
part 3 is the pure base-letter correction from the lift self-pairings.  The
total must lie in (extended relations) x (enlarged letters)^d and in the
degree d+2 Koszul space of the extended algebra.
"""

from dataclasses import dataclass

from .blockcalc import Lin, bullet, scalar_action
from .exact_linalg import (
    InternalCheckError,
    Subspace,
    Tensor,
    tau_apply,
)
from .nakayama import matrix_lin

__all__ = [
    "SpanMismatch",
    "Superpotential",
    "build_omega_hat",
    "derivation_quotient_check",
    "verify_twisted",
]


class SpanMismatch(InternalCheckError):
    """The slice span of the potential differs from the extended relations."""

    def __init__(self, message, span=None, expected=None):
        super().__init__(message)
        self.span = span
        self.expected = expected


@dataclass(frozen=True)
class Superpotential:
    d: int
    nhat: int
    part1: Tensor
    part2: Tensor
    part3: Tensor

    @property
    def omega_hat(self):
        return self.part1 + self.part2 + self.part3


def _part1(A, ext, omega):
    """Pair-insertion sum: for each leading segment of each top-form word,
    determinant images, then an adjoined pair around a mixed box-power
    image, then the untouched tail."""
    n = A.nletters
    nhat = ext.nhat
    d = omega.degree
    total = Tensor.zero(nhat, d + 2)
    for i in range(d + 1):
        det_i = ext.det_sigma_pow(i)
        for j in range(d - i + 1):
            mixed = bullet(scalar_action(ext.J, n, j), ext.sigma_pow(j))
            sign = 1 if j % 2 == 0 else -1
            for w, c in omega.items():
                head = det_i.apply(Tensor.word(n, w[:i])).widen(nhat)
                if head.is_zero():
                    continue
                mid_word = Tensor.word(n, w[i : i + j])
                tail = Tensor.word(nhat, w[i + j :])
                pair = Tensor.zero(nhat, j + 2)
                for s in range(2):
                    for t in range(2):
                        img = mixed.entry(s, t).apply(mid_word)
                        if img.is_zero():
                            continue
                        pair = pair + (
                            Tensor.word(nhat, (n + s,))
                            .tensor(img.widen(nhat))
                            .tensor(Tensor.word(nhat, (n + t,)))
                        )
                piece = head.tensor(pair).tensor(tail).scale(c)
                total = total + piece if sign > 0 else total - piece
    return total


def _right_lift_columns(ext, quad, omega, i):
    """The column (mixing matrix) * (right lift at level i extended by the
    identity) applied to the top form."""
    n = ext.nletters
    d = omega.degree
    pad = Lin.identity(n, d - i)
    return [
        sum(
            (
                quad.delta_r[i]
                .entry(t, 0)
                .tensor(pad)
                .apply(omega)
                .scale(ext.J[s][t])
                for t in range(2)
            ),
            Tensor.zero(n, d + 1),
        )
        for s in range(2)
    ]


def _part2(A, ext, quad, omega):
    """Single-insertion sum: right-lift columns twisted by box powers, with
    one adjoined letter moved past the first j base letters."""
    n = A.nletters
    nhat = ext.nhat
    d = omega.degree
    total = Tensor.zero(nhat, d + 2)
    for i in range(1, d + 1):
        v = _right_lift_columns(ext, quad, omega, i)
        for j in range(d + 2):
            sig_j = ext.sigma_pow(j)
            pad = Lin.identity(n, d + 1 - j)
            sign = 1 if (i + j) % 2 == 0 else -1
            for s in range(2):
                g = Tensor.zero(n, d + 1)
                for t in range(2):
                    g = g + sig_j.entry(t, s).tensor(pad).apply(v[t])
                if g.is_zero():
                    continue
                term = tau_apply(
                    d + 2,
                    j,
                    Tensor.word(nhat, (n + s,)).tensor(g.widen(nhat)),
                )
                total = total + term if sign > 0 else total - term
    return total


def _part3(A, ext, quad, omega):
    """Pure base-letter sum: lift self-pairings through the mixing matrix
    minus the degree-two corrections."""
    n = A.nletters
    nhat = ext.nhat
    d = omega.degree
    total = Tensor.zero(n, d + 2)
    for i in range(1, d + 1):
        v = _right_lift_columns(ext, quad, omega, i)
        for u in range(1, i + 1):
            sign = 1 if (i + u) % 2 == 0 else -1
            pad = Lin.identity(n, d + 1 - u)
            term = Tensor.zero(n, d + 2)
            for s in range(2):
                term = term + quad.delta_r[u].entry(s, 0).tensor(pad).apply(
                    v[s]
                )
            total = total + term if sign > 0 else total - term
    for i in range(1, d):
        pad = Lin.identity(n, d - i)
        total = total - quad.upsilon_r[i].tensor(pad).apply(omega)
    return total.widen(nhat)


def build_omega_hat(A, ext, quad, omega):
    """Assemble the potential from the three sums and check its membership
    in (extended relations) x letters^d and in the extended Koszul space."""
    if ext.B is None:
        from .extension import build_B

        build_B(ext)
    d = omega.degree
    sp = Superpotential(
        d=d,
        nhat=ext.nhat,
        part1=_part1(A, ext, omega),
        part2=_part2(A, ext, quad, omega),
        part3=_part3(A, ext, quad, omega),
    )
    omega_hat = sp.omega_hat
    rhat = ext.B.presentation.relations
    for tail, head in _slices(omega_hat, d).items():
        if not rhat.contains(head):
            raise InternalCheckError(
                "potential is not a combination of extended relations"
            )
    if not ext.B.koszul(d + 2).contains(omega_hat):
        raise InternalCheckError(
            "potential is outside the extended Koszul space"
        )
    return sp


def verify_twisted(sp, muB):
    """Check the cyclic symmetry: the potential equals the signed full
    rotation with the automorphism matrix applied to the rotated letter."""
    d = sp.d
    nhat = sp.nhat
    omega_hat = sp.omega_hat
    mu = matrix_lin(nhat, muB)
    moved = Tensor.zero(nhat, d + 2)
    for w, c in omega_hat.items():
        img = mu.apply(Tensor.word(nhat, (w[0],))).scale(c)
        for u, cu in img.items():
            moved = moved + Tensor.word(nhat, w[1:] + (u[0],)).scale(cu)
    if (d + 1) % 2 == 1:
        moved = -moved
    residual = omega_hat - moved
    return {"ok": residual.is_zero(), "residual": residual}


def _slices(omega_hat, d):
    """Bucket the potential by its last d letters; values are the leading
    degree-2 coefficients."""
    nhat = omega_hat.nletters
    buckets = {}
    for w, c in omega_hat.items():
        tail = w[2:]
        cur = buckets.get(tail)
        piece = Tensor.word(nhat, w[:2]).scale(c)
        buckets[tail] = piece if cur is None else cur + piece
    return buckets


def derivation_quotient_check(sp, A, ext):
    """The span of the degree-2 slices of the potential must equal the
    extended relation space exactly."""
    if ext.B is None:
        from .extension import build_B

        build_B(ext)
    rhat = ext.B.presentation.relations
    nhat = ext.nhat
    span = Subspace.from_tensors(
        nhat, 2, list(_slices(sp.omega_hat, sp.d).values())
    )
    if span != rhat:
        raise SpanMismatch(
            "slice span differs from the extended relation space",
            span=span,
            expected=rhat,
        )
    return {"dim": span.dim, "ok": True}
