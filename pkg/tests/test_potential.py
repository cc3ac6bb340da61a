"""The twisted potential: golden parts on the quantum plane, the cyclic
twist identity, and the slice-span recovery of the extended relations."""

import dataclasses
import random

import pytest

from dorex.exact_linalg import IUNIT, ONE, Subspace, Tensor, tau_apply
from dorex.extension import validate
from dorex.nakayama import nakayama_report
from dorex.potential import (
    SpanMismatch,
    build_omega_hat,
    derivation_quotient_check,
    verify_twisted,
)
from dorex.quadruple import build_quadruple, perturb_extension

from oracles import derivative_span, extended_relation_tensors, rotate_by_swaps


def displayed_top_form():
    return Tensor(2, 2, {(1, 0): ONE, (0, 1): -IUNIT})


def build_for(bundle, omega=None, rng=None):
    quad = build_quadruple(bundle.ve, rng=rng)
    if omega is None:
        omega = bundle.cert.omega
    return build_omega_hat(bundle.A, bundle.ve, quad, omega)


def test_part3_golden_quantum_plane(example1):
    sp = build_for(example1, omega=displayed_top_form())
    expected = Tensor(4, 4, {(0, 1, 0, 1): IUNIT, (1, 0, 1, 0): -IUNIT})
    assert sp.part3 == expected


def test_part1_adjoined_pair_blocks(example1):
    sp = build_for(example1, omega=displayed_top_form())
    leading = {(3, 2, 1, 0): ONE, (3, 2, 0, 1): -IUNIT, (2, 3, 1, 0): -IUNIT, (2, 3, 0, 1): -ONE}
    trailing = {(1, 0, 3, 2): ONE, (0, 1, 3, 2): -IUNIT, (1, 0, 2, 3): -IUNIT, (0, 1, 2, 3): -ONE}
    for word, coeff in {**leading, **trailing}.items():
        assert sp.part1.coeff(word) == coeff


def test_parts_linear_in_top_form(example1):
    quad = build_quadruple(example1.ve)
    base = build_omega_hat(example1.A, example1.ve, quad, displayed_top_form())
    scaled = build_omega_hat(example1.A, example1.ve, quad, example1.cert.omega)
    assert scaled.part1 == base.part1.scale(IUNIT)
    assert scaled.part2 == base.part2.scale(IUNIT)
    assert scaled.part3 == base.part3.scale(IUNIT)


def test_trimmed_parts_vanish(example1_trimmed, trimmed_kx):
    for bundle in (example1_trimmed, trimmed_kx):
        sp = build_for(bundle)
        assert sp.part2.is_zero() and sp.part3.is_zero()
        assert sp.omega_hat == sp.part1


def test_twist_identity_all_fixtures(bundles):
    for bundle in bundles:
        quad = build_quadruple(bundle.ve)
        sp = build_omega_hat(bundle.A, bundle.ve, quad, bundle.cert.omega)
        report = nakayama_report(bundle.ve, quad)
        out = verify_twisted(sp, report.muB)
        assert out["ok"] and out["residual"].is_zero()


def test_pure_cyclic_antisymmetry(example1):
    sp = build_for(example1)
    omega_hat = sp.omega_hat
    assert omega_hat == -tau_apply(4, 3, omega_hat)
    assert omega_hat == -rotate_by_swaps(omega_hat, 3)


def test_corrupt_coefficient_breaks_twist(example1):
    sp = build_for(example1)
    report = nakayama_report(example1.ve, build_quadruple(example1.ve))
    noise = Tensor.word(4, (0, 0, 0, 0))
    broken = dataclasses.replace(sp, part1=sp.part1 + noise)
    out = verify_twisted(broken, report.muB)
    assert not out["ok"] and not out["residual"].is_zero()


def test_membership_in_extended_spaces(example1, trimmed_kx):
    for bundle in (example1, trimmed_kx):
        sp = build_for(bundle)
        ve = bundle.ve
        omega_hat = sp.omega_hat
        assert ve.B.koszul(sp.d + 2).contains(omega_hat)
        rhat = ve.B.presentation.relations
        span = derivative_span(omega_hat, sp.d)
        for row in span.basis():
            assert rhat.contains(row)


def test_slice_span_equals_extended_relations(example1, trimmed_kx, poly3_skew):
    expected_dims = {id(example1): 6, id(trimmed_kx): 3, id(poly3_skew): 10}
    for bundle in (example1, trimmed_kx, poly3_skew):
        sp = build_for(bundle)
        ve = bundle.ve
        report = derivation_quotient_check(sp, bundle.A, ve)
        oracle = Subspace.from_tensors(ve.nhat, 2, extended_relation_tensors(ve))
        assert oracle == ve.B.presentation.relations
        assert derivative_span(sp.omega_hat, sp.d) == oracle
        assert report["ok"] and report["dim"] == oracle.dim
        assert report["dim"] == expected_dims[id(bundle)]


def test_corrupt_part_raises_span_mismatch(example1):
    sp = build_for(example1)
    noise = Tensor.word(4, (0, 0, 0, 0))
    broken = dataclasses.replace(sp, part2=sp.part2 + noise)
    with pytest.raises(SpanMismatch) as info:
        derivation_quotient_check(broken, example1.A, example1.ve)
    assert info.value.span is not None and info.value.expected is not None
    assert info.value.span != info.value.expected


def test_span_outcome_invariant_across_choices(example1, poly3_skew):
    for bundle, trials in ((example1, 10), (poly3_skew, 4)):
        base = build_for(bundle)
        base_report = derivation_quotient_check(base, bundle.A, bundle.ve)
        muB = nakayama_report(bundle.ve, build_quadruple(bundle.ve)).muB
        for seed in range(trials):
            rng = random.Random(601 + seed)
            sp = build_for(bundle, rng=rng)
            report = derivation_quotient_check(sp, bundle.A, bundle.ve)
            assert report == base_report
            assert verify_twisted(sp, muB)["ok"]


def test_twist_survives_lift_perturbation(example1):
    rng = random.Random(607)
    for _ in range(2):
        ve2 = validate(example1.A, perturb_extension(example1.ve, rng), cert=example1.cert)
        quad2 = build_quadruple(ve2, rng=rng)
        sp = build_omega_hat(example1.A, ve2, quad2, example1.cert.omega)
        report = nakayama_report(ve2, quad2)
        assert verify_twisted(sp, report.muB)["ok"]
        assert derivation_quotient_check(sp, example1.A, ve2)["dim"] == 6
