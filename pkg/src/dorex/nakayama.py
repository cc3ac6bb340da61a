"""Twist data of the extension: the base twist matrix solved from the top
form, the homological determinant, the boundary vectors and divergence, and
the full automorphism matrix on the enlarged generator column.

Convention: every scalar matrix here acts on the generator column, with row
m listing the coefficients of the image of generator m.  Under this
convention the matrix of a composite map g after f is (matrix of f) times
(matrix of g).
"""

from dataclasses import dataclass

from ._kernel import qadd, rank_rows
from .blockcalc import Lin, column_action
from .exact_linalg import (
    InternalCheckError,
    Scalar,
    Subspace,
    Tensor,
    head_slice,
    mat_inv,
    mat_mul,
    solve_in_span,
    tail_slice,
)
from .extension import letter_matrix, nakayama_y_factor

__all__ = [
    "AutomorphismCheckFailure",
    "FactorizationFailure",
    "NakayamaReport",
    "NonUniqueOrNone",
    "NotProportional",
    "divergence",
    "hdet_compute",
    "mu_A_solve",
    "mu_B_matrix",
    "nakayama_report",
]


class NonUniqueOrNone(InternalCheckError):
    """The twist identity has no solution or more than one."""


class NotProportional(InternalCheckError):
    """A top-form image failed to be a multiple of the top form."""


class FactorizationFailure(InternalCheckError):
    """A boundary image is not of the required product shape."""


class AutomorphismCheckFailure(InternalCheckError):
    """The assembled matrix does not preserve the extended relations."""


def matrix_lin(nletters, matrix):
    """Degree-1 map from a row-expansion matrix."""
    return Lin(
        nletters,
        1,
        1,
        {
            (m,): Tensor(
                nletters, 1, {(j,): matrix[m][j] for j in range(len(matrix[m]))}
            )
            for m in range(len(matrix))
        },
    )


def mu_A_solve(A, omega):
    """The unique degree-1 matrix L making the top form twisted:
    omega = (-1)^(d-1) tau^(d-1) (L-action tensor id^(d-1)) (omega)."""
    n = A.nletters
    d = omega.degree
    sign = 1 if (d - 1) % 2 == 0 else -1
    vectors = []
    for m in range(n):
        for j in range(n):
            row = {}
            for w, c in omega.terms.items():
                if w[0] != m:
                    continue
                word = w[1:] + (j,)
                rank = 0
                for letter in word:
                    rank = rank * n + letter
                cur = row.get(rank)
                val = (c[0] * sign, c[1] * sign, c[2])
                if cur is None:
                    row[rank] = val
                else:
                    s = qadd(cur, val)
                    if s[0] == 0 and s[1] == 0:
                        row.pop(rank, None)
                    else:
                        row[rank] = s
            vectors.append(row)
    sol = solve_in_span([dict(r) for r in vectors], omega.to_row(), n**d)
    if sol is None:
        raise NonUniqueOrNone("twist identity has no solution")
    if rank_rows([dict(r) for r in vectors]) < n * n:
        raise NonUniqueOrNone("twist identity underdetermined")
    L = [
        [Scalar._wrap(sol[m * n + j]) for j in range(n)] for m in range(n)
    ]
    if mat_inv(L) is None:
        raise NonUniqueOrNone("twist matrix is singular")
    mu = matrix_lin(n, L)
    R = A.presentation.relations
    two = mu.tensor(mu)
    for r in R.basis():
        if not R.contains(two.apply(r)):
            raise NonUniqueOrNone("twist matrix is not an algebra map")
    return L


def hdet_compute(ext, omega):
    """Entrywise coefficient of the d-fold box power on the top form."""
    d = omega.degree
    A = ext.A
    span = A.koszul(d)
    base = span.coords(omega)
    if base is None or all(c.is_zero() for c in base):
        raise NotProportional("reference form is not in the top space")
    c0 = base[0]
    sig = ext.sigma_pow(d)
    H = []
    for s in range(2):
        row = []
        for t in range(2):
            img = sig.entry(s, t).apply(omega)
            coords = span.coords(img)
            if coords is None:
                raise NotProportional(
                    "box power does not preserve the top space"
                )
            row.append(coords[0] / c0)
        H.append(row)
    return H


def divergence(ext, quad, omega, L):
    """Boundary vectors and the divergence column.

    The top right map sends the top form to (top form) x (vector) per
    component and the top left map to (vector) x (top form); the vectors
    are sliced off against the top form's leading word and the product
    shape is re-asserted.  div = delta_r + L-action applied entrywise to
    the twisted-inverse column action on delta_l.
    """
    n = ext.nletters
    d = ext.cert.d
    pivot = min(omega.terms)
    c0 = omega.coeff(pivot)
    dr = []
    dl = []
    for s in range(2):
        img_r = quad.delta_r[d].entry(s, 0).apply(omega)
        vec_r = head_slice(img_r, pivot).scale(c0.inverse())
        if omega.tensor(vec_r) != img_r:
            raise FactorizationFailure(
                "top right image is not (top form) x (vector)"
            )
        img_l = quad.delta_l[d].entry(s, 0).apply(omega)
        vec_l = tail_slice(img_l, pivot).scale(c0.inverse())
        if vec_l.tensor(omega) != img_l:
            raise FactorizationFailure(
                "top left image is not (vector) x (top form)"
            )
        dr.append(vec_r)
        dl.append(vec_l)
    mu = matrix_lin(n, L)
    twisted = column_action(ext.sigma_inv_T, dl)
    div = [dr[s] + mu.apply(twisted[s]) for s in range(2)]
    return dr, dl, div


def mu_B_matrix(ext, L, H, div):
    """Assemble the (n+2) x (n+2) matrix on the generator column.

    Top-left block: the composite of the twist then the inverse determinant
    (row-expansion matrix L * U^(-1)); bottom-right: the closed-form mixing
    factor times H; bottom-left: the mixing factor applied to the divergence
    column, expanded over the letters.  The result must carry the extended
    relation space onto itself.
    """
    n = ext.nletters
    K = nakayama_y_factor(ext.p12, ext.p11)
    vblock = mat_mul(L, ext.det_matrix_inv)
    yblock = mat_mul(K, H)
    kdiv = [
        sum(
            (div[t].scale(K[s][t]) for t in range(2)),
            Tensor.zero(n, 1),
        )
        for s in range(2)
    ]
    size = n + 2
    muB = [[Scalar(0)] * size for _ in range(size)]
    for m in range(n):
        for j in range(n):
            muB[m][j] = vblock[m][j]
    for s in range(2):
        for j in range(n):
            muB[n + s][j] = kdiv[s].coeff((j,))
        for t in range(2):
            muB[n + s][n + t] = yblock[s][t]

    if mat_inv(muB) is None:
        raise AutomorphismCheckFailure("assembled matrix is singular")
    if ext.B is None:
        from .extension import build_B

        build_B(ext)
    Rhat = ext.B.presentation.relations
    lin = matrix_lin(ext.nhat, muB)
    two = lin.tensor(lin)
    for r in Rhat.basis():
        if not Rhat.contains(two.apply(r)):
            raise AutomorphismCheckFailure(
                "assembled matrix does not preserve the extended relations"
            )
    return muB


@dataclass(frozen=True)
class NakayamaReport:
    d: int
    L: list
    U: list
    H: list
    delta_r: list
    delta_l: list
    div: list
    muB: list


def nakayama_report(ext, quad):
    """Full pipeline over a built quadruple: twist, determinant, boundary
    vectors, divergence, and the assembled automorphism matrix."""
    omega = ext.cert.omega
    L = mu_A_solve(ext.A, omega)
    H = hdet_compute(ext, omega)
    dr, dl, div = divergence(ext, quad, omega, L)
    muB = mu_B_matrix(ext, L, H, div)
    return NakayamaReport(
        d=ext.cert.d,
        L=L,
        U=ext.det_matrix,
        H=H,
        delta_r=dr,
        delta_l=dl,
        div=div,
        muB=muB,
    )
