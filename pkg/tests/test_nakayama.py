"""Twist data: the base twist matrix, homological determinant, boundary
vectors, divergence, and the assembled automorphism matrix."""

import random

import pytest

from dorex.blockcalc import BlockMap, Lin
from dorex.exact_linalg import (
    IUNIT,
    ONE,
    ZERO,
    Scalar,
    Tensor,
    mat_inv,
    mat_mul,
    tau_apply,
)
from dorex.extension import ExtensionInput, validate
from dorex.nakayama import (
    AutomorphismCheckFailure,
    FactorizationFailure,
    NonUniqueOrNone,
    NotProportional,
    divergence,
    hdet_compute,
    matrix_lin,
    mu_A_solve,
    mu_B_matrix,
    nakayama_report,
)
from dorex.quadruple import build_quadruple, perturb_extension


def identity_matrix(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def twist_residual(A, omega, L):
    """Difference of the two sides of the defining twisted-form identity."""
    n = A.nletters
    d = omega.degree
    lifted = matrix_lin(n, L)
    for _ in range(d - 1):
        lifted = lifted.tensor(Lin.identity(n, 1))
    moved = tau_apply(d, d - 1, lifted.apply(omega))
    if (d - 1) % 2 == 1:
        moved = -moved
    return omega - moved


# the base twist -----------------------------------------------------------


def test_twist_matrix_quantum_plane(example1):
    L = mu_A_solve(example1.A, example1.cert.omega)
    assert L == [[-IUNIT, ZERO], [ZERO, IUNIT]]
    assert twist_residual(example1.A, example1.cert.omega, L).is_zero()


def test_twist_matrix_poly3_is_identity(poly3_skew):
    L = mu_A_solve(poly3_skew.A, poly3_skew.cert.omega)
    assert L == identity_matrix(3)
    assert twist_residual(poly3_skew.A, poly3_skew.cert.omega, L).is_zero()


def test_twist_matrix_degree_one(trimmed_kx):
    L = mu_A_solve(trimmed_kx.A, trimmed_kx.cert.omega)
    assert L == [[ONE]]


def test_twist_scale_invariant(example1):
    c = Scalar(3, -2)
    scaled = example1.cert.omega.scale(c)
    assert mu_A_solve(example1.A, scaled) == mu_A_solve(
        example1.A, example1.cert.omega
    )


def test_twist_solver_error_paths(example1):
    with pytest.raises(NonUniqueOrNone):
        mu_A_solve(example1.A, Tensor.zero(2, 2))
    with pytest.raises(NonUniqueOrNone):
        mu_A_solve(example1.A, Tensor.word(2, (0, 1)))


# homological determinant --------------------------------------------------


def test_hdet_quantum_plane(example1):
    H = hdet_compute(example1.ve, example1.cert.omega)
    assert H == [[IUNIT, ZERO], [ZERO, -IUNIT]]
    c = Scalar(0, 5)
    assert hdet_compute(example1.ve, example1.cert.omega.scale(c)) == H


def test_hdet_trimmed_identity(trimmed_kx):
    assert hdet_compute(trimmed_kx.ve, trimmed_kx.cert.omega) == identity_matrix(2)


def test_hdet_diagonal_product_with_expansion_oracle(example1):
    a = (Scalar(2), Scalar(5))
    b = (Scalar(3), Scalar(7))
    zero1 = Tensor.zero(2, 1)
    zero2 = Tensor.zero(2, 2)
    sigma = {
        g: [
            [Tensor.word(2, (g,), a[g]), zero1],
            [zero1, Tensor.word(2, (g,), b[g])],
        ]
        for g in range(2)
    }
    ve = validate(
        example1.A,
        ExtensionInput(ONE, ZERO, sigma, {g: [zero2, zero2] for g in range(2)}),
        cert=example1.cert,
    )
    omega = example1.cert.omega
    H = hdet_compute(ve, omega)
    assert H == [[a[0] * a[1], ZERO], [ZERO, b[0] * b[1]]]
    for s, weights in ((0, a), (1, b)):
        hand = Tensor.zero(2, 2)
        for (w0, w1), coeff in omega.terms.items():
            hand = hand + Tensor.word(2, (w0, w1)).scale(
                weights[w0] * weights[w1] * Scalar._wrap(coeff)
            )
        assert hand == omega.scale(H[s][s])
        assert ve.sigma_pow(2).entry(s, s).apply(omega) == hand


def test_hdet_rejects_form_outside_top(example1):
    bad = example1.cert.omega + Tensor.word(2, (0, 0))
    with pytest.raises(NotProportional):
        hdet_compute(example1.ve, bad)


# boundary vectors and divergence ------------------------------------------


def test_divergence_quantum_plane_golden(example1):
    ve = example1.ve
    quad = build_quadruple(ve)
    omega = example1.cert.omega
    L = mu_A_solve(example1.A, omega)
    dr, dl, div = divergence(ve, quad, omega, L)
    x1 = Tensor.word(2, (0,))
    x2 = Tensor.word(2, (1,))
    assert dr[0].is_zero() and dr[1] == x2.scale(-IUNIT)
    assert dl[0] == x1.scale(IUNIT) and dl[1].is_zero()
    assert div[0].is_zero() and div[1].is_zero()
    scaled = omega.scale(Scalar(2, 7))
    assert divergence(ve, quad, scaled, L) == (dr, dl, div)


def test_divergence_zero_for_trimmed(example1_trimmed):
    ve = example1_trimmed.ve
    quad = build_quadruple(ve)
    L = mu_A_solve(ve.A, ve.cert.omega)
    dr, dl, div = divergence(ve, quad, ve.cert.omega, L)
    for s in range(2):
        assert dr[s].is_zero() and dl[s].is_zero() and div[s].is_zero()


def test_divergence_invariant_under_quadruple_choice(example1, poly3_skew):
    for bundle in (example1, poly3_skew):
        ve = bundle.ve
        omega = bundle.cert.omega
        L = mu_A_solve(bundle.A, omega)
        _, _, base_div = divergence(ve, build_quadruple(ve), omega, L)
        for seed in range(5):
            rng = random.Random(401 + seed)
            quad = build_quadruple(ve, rng=rng)
            _, _, div = divergence(ve, quad, omega, L)
            for s in range(2):
                assert (div[s] - base_div[s]).is_zero()


def test_divergence_rejects_non_product_image(example1):
    ve = example1.ve
    quad = build_quadruple(ve)
    omega = example1.cert.omega
    L = mu_A_solve(example1.A, omega)
    w2 = example1.A.koszul(2)
    bad = Lin.on_basis(w2, [Tensor.word(2, (0, 0, 0))])
    quad.delta_r[2] = BlockMap([[bad], [quad.delta_r[2].entry(1, 0)]])
    with pytest.raises(FactorizationFailure):
        divergence(ve, quad, omega, L)


# the assembled matrix -----------------------------------------------------


def test_full_report_quantum_plane(example1):
    report = nakayama_report(example1.ve, build_quadruple(example1.ve))
    assert report.d == 2
    assert report.L == [[-IUNIT, ZERO], [ZERO, IUNIT]]
    assert report.U == [[-IUNIT, ZERO], [ZERO, IUNIT]]
    assert report.H == [[IUNIT, ZERO], [ZERO, -IUNIT]]
    assert report.muB == identity_matrix(4)


def test_report_block_consistency(bundles):
    for bundle in bundles:
        ve = bundle.ve
        report = nakayama_report(ve, build_quadruple(ve))
        n = ve.nletters
        vblock = mat_mul(report.L, mat_inv(report.U))
        for m in range(n):
            assert report.muB[m][:n] == vblock[m]
            assert report.muB[m][n:] == [ZERO, ZERO]


def test_trimmed_kx_identity_matrix(trimmed_kx):
    report = nakayama_report(trimmed_kx.ve, build_quadruple(trimmed_kx.ve))
    assert report.muB == identity_matrix(3)
    assert report.U == [[ONE]]


def test_trimmed_quantum_plane_matches_full(example1_trimmed):
    ve = example1_trimmed.ve
    report = nakayama_report(ve, build_quadruple(ve))
    assert mat_mul(report.L, mat_inv(report.U)) == identity_matrix(2)
    for s in range(2):
        assert report.div[s].is_zero()
    assert report.muB == identity_matrix(4)


def test_poly3_skew_diagonal_weights(poly3_skew):
    report = nakayama_report(poly3_skew.ve, build_quadruple(poly3_skew.ve))
    expected = [[ZERO] * 5 for _ in range(5)]
    for j, w in enumerate(
        (Scalar(1, 0, 30), Scalar(1, 0, 2), Scalar(1, 0, 3), Scalar(36), Scalar(5))
    ):
        expected[j][j] = w
    assert report.muB == expected


def test_assembled_matrix_preserves_extended_relations(example1):
    ve = example1.ve
    report = nakayama_report(ve, build_quadruple(ve))
    lin = matrix_lin(ve.nhat, report.muB)
    two = lin.tensor(lin)
    Rhat = ve.B.presentation.relations
    for r in Rhat.basis():
        assert Rhat.contains(two.apply(r))


def test_assembly_error_paths(example1):
    ve = example1.ve
    quad = build_quadruple(ve)
    omega = example1.cert.omega
    L = mu_A_solve(example1.A, omega)
    _, _, div = divergence(ve, quad, omega, L)
    singular = [[ZERO, ZERO], [ZERO, ZERO]]
    with pytest.raises(AutomorphismCheckFailure):
        mu_B_matrix(ve, L, singular, div)
    wrong = identity_matrix(2)
    with pytest.raises(AutomorphismCheckFailure):
        mu_B_matrix(ve, L, wrong, div)


def test_divergence_invariant_under_lift_perturbation(example1):
    ve = example1.ve
    omega = example1.cert.omega
    L = mu_A_solve(example1.A, omega)
    _, _, base_div = divergence(ve, build_quadruple(ve), omega, L)
    rng = random.Random(433)
    for _ in range(3):
        ve2 = validate(example1.A, perturb_extension(ve, rng), cert=example1.cert)
        quad2 = build_quadruple(ve2, rng=rng)
        _, _, div2 = divergence(ve2, quad2, omega, L)
        for s in range(2):
            assert (div2[s] - base_div[s]).is_zero()
