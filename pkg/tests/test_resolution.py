"""Truncated free resolution of the trivial module over the extended
algebra: rank patterns, exactness window, chain squares, homotopy."""

import pytest

from dorex.exact_linalg import Tensor
from dorex.quadruple import build_quadruple
from dorex.resolution import (
    ComplexBroken,
    NotExact,
    NotMinimal,
    assemble_F,
    chain_identity_report,
    lambda_square_check,
    verify_resolution,
)


def build_complex(bundle, D=6):
    quad = build_quadruple(bundle.ve)
    return assemble_F(bundle.A, bundle.ve, quad, D)


def test_rank_pattern_quantum_plane(example1):
    F = build_complex(example1)
    assert F.rank_patterns() == {
        0: [1],
        1: [1, 1, 2],
        2: [1, 2, 2, 1],
        3: [2, 1, 1],
        4: [1],
    }
    assert [F.towers[m].rank for m in sorted(F.towers)] == [1, 4, 6, 4, 1]


def test_rank_pattern_trimmed_kx(trimmed_kx):
    F = build_complex(trimmed_kx)
    assert [F.towers[m].rank for m in sorted(F.towers)] == [1, 3, 3, 1]


def test_verify_quantum_plane(example1):
    F = build_complex(example1)
    report = verify_resolution(F)
    assert report["ok"] and report["degree_bound"] == 6
    assert report["ranks"]["1,1"] == example1.ve.B.dim(1) == 4


def test_verify_trimmed_kx(trimmed_kx):
    F = build_complex(trimmed_kx)
    assert verify_resolution(F)["ok"]


def test_alternating_sum_from_hilbert_data(example1, trimmed_kx):
    for bundle in (example1, trimmed_kx):
        F = build_complex(bundle)
        B = bundle.ve.B
        for k in range(1, 7):
            chi = 0
            for m, tower in F.towers.items():
                term = tower.dim_at(B, k)
                chi += term if m % 2 == 0 else -term
            assert chi == 0


def test_position_zero_is_the_algebra(example1):
    F = build_complex(example1)
    B = example1.ve.B
    tower = F.towers[0]
    assert tower.rank == 1 and tower.gens[0][2] == 0
    for k in range(7):
        assert tower.dim_at(B, k) == B.dim(k)


def test_matrix_shapes(example1):
    F = build_complex(example1)
    B = example1.ve.B
    rows, nrows, ncols = F.matrix(1, 3)
    assert ncols == B.dim(3)
    assert nrows == F.towers[1].dim_at(B, 3)
    assert len(rows) == nrows


def test_first_maps_golden(example1):
    F = build_complex(example1)
    g0 = F.g_map(0)
    assert g0.images == [
        [(0, Tensor.word(4, (2,)))],
        [(0, Tensor.word(4, (3,)))],
    ]
    p1 = F.partial_map(1, 0)
    assert p1.images == [
        [(0, Tensor.word(4, (0,)))],
        [(0, Tensor.word(4, (1,)))],
    ]


def test_chain_identities(example1, trimmed_kx, poly3_skew):
    for bundle in (example1, trimmed_kx, poly3_skew):
        F = build_complex(bundle, D=4)
        report = chain_identity_report(F)
        assert report and all(report.values())


def test_homotopy_identity_as_matrices(example1):
    F = build_complex(example1)
    d = F.d
    for i in range(1, d + 1):
        T = F.g_map(i).compose(F.f_map(i))
        T = T - F.h_map(i - 1).compose(F.partial_map(i, 2))
        if F.A.koszul(i + 1).dim:
            T = T - F.partial_map(i + 1, 0).compose(F.h_map(i))
        for k in range(7):
            rows, _, _ = T.matrix(k)
            assert all(not row for row in rows)


def test_lambda_square_vanishes(example1, example1_trimmed, trimmed_kx):
    for bundle in (example1, example1_trimmed, trimmed_kx):
        F = build_complex(bundle, D=4)
        for i in range(1, F.d + 1):
            assert lambda_square_check(F, i)


def test_trimmed_blocks_reduce(example1_trimmed):
    F = build_complex(example1_trimmed)
    for i in range(1, F.d + 1):
        full = F.f_map(i)
        bare = F.f_map(i, include_delta=False)
        assert (full - bare).images == [[] for _ in range(full.source.rank)]
        assert all(not terms for terms in F.h_map(i).images)


def test_corrupt_entry_breaks_complex(example1):
    F = build_complex(example1)
    t, c = F.diffs[2].images[0][0]
    F.diffs[2].images[0][0] = (t, c + c)
    with pytest.raises(ComplexBroken) as info:
        verify_resolution(F)
    assert info.value.position == 2


def test_scalar_entry_breaks_minimality(example1):
    F = build_complex(example1)
    F.diffs[2].images[0].append((0, Tensor.word(4, ())))
    with pytest.raises(NotMinimal):
        verify_resolution(F)


def test_dropped_top_map_breaks_exactness(example1):
    F = build_complex(example1)
    F.diffs[4].images = [[] for _ in range(F.towers[4].rank)]
    with pytest.raises(NotExact) as info:
        verify_resolution(F)
    assert info.value.position == 3 and info.value.degree == 4
