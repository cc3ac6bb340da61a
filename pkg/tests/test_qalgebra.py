"""Quadratic algebra caches: graded components, Koszul spaces, regularity
certificates, and graded application of matrix maps and derivations."""

import random

import pytest

from dorex.exact_linalg import (
    IUNIT,
    ONE,
    Scalar,
    ShapeMismatch,
    Subspace,
    Tensor,
    ValidationError,
    words_of_degree,
)
from dorex.qalgebra import (
    AlgebraCache,
    Presentation,
    apply_graded,
    as_certificate,
    graded_basis,
    koszul_space,
    relation_span,
)

from oracles import koszul_all_at_once, word_quotient_dim


def free_algebra(n=2):
    names = tuple("x%d" % (k + 1) for k in range(n))
    return AlgebraCache(Presentation(names, "Q", Subspace.zero(n, 2)))


# presentations ------------------------------------------------------------


def test_presentation_validation():
    with pytest.raises(ValidationError):
        Presentation(("x", "x"), "Q", Subspace.zero(2, 2))
    with pytest.raises(ValidationError):
        Presentation(("x",), "R", Subspace.zero(1, 2))
    with pytest.raises(ShapeMismatch):
        Presentation(("x",), "Q", Subspace.zero(1, 3))
    with pytest.raises(ShapeMismatch):
        Presentation(("x", "y"), "Q", Subspace.zero(3, 2))


# graded components --------------------------------------------------------


def test_graded_dims_match_word_quotient(example1, poly3_skew):
    for bundle in (example1, poly3_skew):
        A = bundle.A
        n = A.nletters
        rels = A.presentation.relations.basis()
        for k in range(7):
            assert A.dim(k) == word_quotient_dim(n, rels, k)


def test_quantum_plane_low_degrees(example1):
    A = example1.A
    rels = A.presentation.relations.basis()
    assert A.dim(0) == 1
    assert A.dim(2) == word_quotient_dim(2, rels, 2) == 3
    assert A.dim(3) == word_quotient_dim(2, rels, 3) == 4
    assert A.dim(2) == 2**2 - A.relation_span(2).dim
    assert A.dim(3) == 2**3 - A.relation_span(3).dim


def test_graded_basis_projection(example1):
    A = example1.A
    dim, words, project = graded_basis(A, 2)
    assert dim == 3 and len(words) == 3
    for w in words:
        assert project(Tensor.word(2, w)) == {w: ONE}
    rel = A.presentation.relations.basis()[0]
    assert project(rel) == {}


def test_normal_form_and_multiplication(example1, poly3_skew):
    rng = random.Random(127)
    for bundle in (example1, poly3_skew):
        A = bundle.A
        n = A.nletters
        for _ in range(15):
            u = tuple(rng.randrange(n) for _ in range(rng.randint(1, 3)))
            v = tuple(rng.randrange(n) for _ in range(rng.randint(1, 3)))
            uv = A.mul_words(u, v)
            nu = A.lift_coords(len(u), A.nf_word(u))
            nv = A.lift_coords(len(v), A.nf_word(v))
            assert A.nf_tensor(nu.tensor(nv)) == uv
        for w in A.transversal(3):
            assert A.nf_word(w) == {w: (1, 0, 1)}


def test_lift_project_roundtrip(example1):
    A = example1.A
    _, words, project = graded_basis(A, 3)
    coords = {words[0]: Scalar(2), words[-1]: -IUNIT}
    assert project(A.lift_coords(3, coords)) == coords
    with pytest.raises(ShapeMismatch):
        A.lift_coords(2, coords)


# Koszul spaces ------------------------------------------------------------


def test_koszul_matches_all_at_once(example1, poly3_skew):
    for bundle in (example1, poly3_skew):
        A = bundle.A
        R = A.presentation.relations
        for i in range(5):
            assert koszul_space(A, i) == koszul_all_at_once(R, i)


def test_koszul_profiles(example1, poly3_skew):
    A = example1.A
    assert koszul_space(A, 2) == A.presentation.relations
    assert koszul_space(A, 2).dim == 1
    assert [koszul_space(A, i).dim for i in range(4)] == [1, 2, 1, 0]
    A3 = poly3_skew.A
    assert [koszul_space(A3, i).dim for i in range(5)] == [1, 3, 3, 1, 0]


def test_koszul_recursion_invariant(example1, poly3_skew):
    from dorex.exact_linalg import intersect, sandwich

    for bundle in (example1, poly3_skew):
        A = bundle.A
        for i in range(2, 4):
            w = koszul_space(A, i)
            expected = intersect([sandwich(w, 1, 0), sandwich(w, 0, 1)])
            assert koszul_space(A, i + 1) == expected


def test_relation_span_function(example1):
    A = example1.A
    assert relation_span(A, 2) == A.presentation.relations
    assert relation_span(A, 1).dim == 0


# certificates -------------------------------------------------------------


def test_certificate_quantum_plane(example1):
    cert = example1.cert
    assert cert.d == 2
    assert cert.dims_w == (1, 2, 1, 0)
    assert cert.euler_ok and cert.palindrome_ok and cert.w_top_ok and cert.ok
    assert cert.omega == Tensor(2, 2, {(0, 1): ONE, (1, 0): IUNIT})
    displayed = Tensor(2, 2, {(1, 0): ONE, (0, 1): -IUNIT})
    assert cert.omega == displayed.scale(IUNIT)


def test_certificate_poly3_deep_bound(poly3_skew):
    A = poly3_skew.A
    cert = as_certificate(A, 7)
    assert cert.d == 3 and cert.ok and cert.bound == 7
    rels = A.presentation.relations.basis()
    dims_a = [word_quotient_dim(3, rels, k) for k in range(8)]
    dims_w = [koszul_all_at_once(A.presentation.relations, i).dim for i in range(5)]
    assert tuple(dims_a) == cert.dims_a
    assert tuple(dims_w) == cert.dims_w
    for k in range(1, 8):
        total = 0
        for j in range(0, min(3, k) + 1):
            term = dims_w[j] * dims_a[k - j]
            total += term if j % 2 == 0 else -term
        assert total == 0


def test_certificate_free_algebra_fails_honestly():
    A = free_algebra()
    cert = as_certificate(A, 4)
    assert cert.d == 1
    assert cert.dims_w == (1, 2, 0)
    assert not cert.palindrome_ok
    assert not cert.w_top_ok
    assert not cert.ok
    dim_a2 = word_quotient_dim(2, [], 2)
    assert dim_a2 == 4
    assert 1 * dim_a2 - 2 * 2 + 1 * 1 != 0


def test_certificate_bound_validation(example1):
    with pytest.raises(ValidationError):
        as_certificate(example1.A, 1)


# graded application -------------------------------------------------------


def test_apply_hom_on_generator_class(example1):
    ve = example1.ve
    out = apply_graded(example1.A, "hom", ve.sigma, {(0,): ONE}, 1)
    assert out[0][0] == {} and out[1][1] == {}
    assert out[0][1] == {(1,): IUNIT}
    assert out[1][0] == {(1,): -IUNIT}


def test_apply_derivation_well_defined_on_classes(example1):
    A = example1.A
    ve = example1.ve
    x1 = Tensor.word(2, (0,))
    x2 = Tensor.word(2, (1,))
    hand = [Tensor.zero(2, 3), Tensor.zero(2, 3)]
    for s in range(2):
        for l in range(2):
            hand[s] = hand[s] + ve.sigma.entry(s, l).apply(x1).tensor(
                ve.delta.entry(l, 0).apply(x2)
            )
        hand[s] = hand[s] + ve.delta.entry(s, 0).apply(x1).tensor(x2)
    _, _, project2 = graded_basis(A, 2)
    _, _, project3 = graded_basis(A, 3)
    coords = project2(x1.tensor(x2))
    out = apply_graded(A, "derivation", ve.derivation_ext(2), coords, 2)
    for s in range(2):
        assert out[s] == project3(hand[s])
    d2 = ve.derivation_ext(2)
    direct = [project3(d2.entry(s, 0).apply(x1.tensor(x2))) for s in range(2)]
    assert out == direct


def test_apply_degree_zero_and_bad_kind(example1):
    ve = example1.ve
    unit = {(): ONE}
    assert apply_graded(example1.A, "derivation", ve.delta, unit, 0) == [{}, {}]
    hom0 = apply_graded(example1.A, "hom", ve.sigma, unit, 0)
    assert hom0[0][0] == unit and hom0[0][1] == {}
    with pytest.raises(ShapeMismatch):
        apply_graded(example1.A, "antihom", ve.sigma, unit, 1)


def test_matrix_power_preserves_koszul_spaces(example1, poly3_skew):
    from dorex.blockcalc import sigma_power

    for bundle in (example1, poly3_skew):
        A = bundle.A
        ve = bundle.ve
        for i in range(2, bundle.cert.d + 1):
            w = koszul_space(A, i)
            pw = sigma_power(ve.sigma, i)
            for b in w.basis():
                for s in range(2):
                    for t in range(2):
                        assert w.contains(pw.entry(s, t).apply(b))
