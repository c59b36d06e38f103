import pytest

from codim4cy.complexes import koszul_complex
from codim4cy.gb import Ideal
from codim4cy.pipeline import Rng, random_form
from codim4cy.resolve import (
    BettiTable,
    ChainComplex,
    GradedMatrix,
    betti_table,
    minimal_free_resolution,
    regularity,
    sheaf_cohomology_dim,
    syzygy_matrix,
    t1_degree0,
)
from codim4cy.ring import PolyRing

R3 = PolyRing(101, 4)
x = R3.gens()


def test_graded_matrix_degree_checks():
    M = GradedMatrix(R3, [[x[0], x[1]]], source=[-1, -1], target=[0])
    assert M.is_homogeneous() and M.entry_degree(0, 1) == 1
    with pytest.raises(ValueError):
        GradedMatrix(R3, [[x[0], x[1] * x[1]]], source=[-1, -1], target=[0])
    D = M.dual(-2)
    assert D.shape == (2, 1) and D.is_homogeneous()


def test_koszul_syzygy():
    S = syzygy_matrix(GradedMatrix(R3, [[x[0], x[1]]], source=[-1, -1], target=[0]))
    assert S.shape == (2, 1) and list(S.source) == [-2]
    col = S.column(0)
    assert (x[0] * col[0] + x[1] * col[1]).is_zero()
    assert {str(c.monic()) for c in col} == {str(x[0]), str(x[1])}


def test_repeated_entry_syzygy():
    S = syzygy_matrix(GradedMatrix(R3, [[x[0], x[0]]], source=[-1, -1], target=[0]))
    assert S.shape == (2, 1) and list(S.source) == [-1]
    a, b = S.column(0)
    assert a.is_constant() and (a + b).is_zero()


def test_complete_intersection():
    C = minimal_free_resolution(Ideal([x[0], x[1]]))
    B = betti_table(C)
    assert B == BettiTable({(0, 0): 1, (1, 1): 2, (2, 2): 1})
    assert regularity(B) == 0
    assert C.verify().ok


def test_resolution_is_a_complex_with_matching_betti():
    rng = Rng(5)
    I = Ideal([random_form(R3, 2, rng) for _ in range(3)])
    C = minimal_free_resolution(I)
    assert C.verify().ok
    assert betti_table(C) == betti_table(koszul_complex(list(I.generators)))


def test_twisted_cubic():
    # 2x2 minors of [[x0, x1, x2], [x1, x2, x3]]
    I = Ideal([x[0] * x[2] - x[1] ** 2, x[0] * x[3] - x[1] * x[2], x[1] * x[3] - x[2] ** 2])
    B = betti_table(minimal_free_resolution(I))
    assert B == BettiTable.from_rows({0: [1], 1: [0, 3, 2]})
    assert t1_degree0(I) == 0


def test_elliptic_quartic_has_one_modulus():
    rng = Rng(11)
    I = Ideal([random_form(R3, 2, rng) for _ in range(2)])
    assert t1_degree0(I) == 1
    assert t1_degree0(I, method="augmented") == 1


def test_sheaf_cohomology_of_a_line():
    I = Ideal([x[2], x[3]])
    assert sheaf_cohomology_dim(I, "structure", 1, -2) == 1
    assert sheaf_cohomology_dim(I, "structure", 1, -3) == 2
    assert sheaf_cohomology_dim(I, "structure", 1, 0) == 0
    assert sheaf_cohomology_dim(I, "ideal", 1, 0) == 0


def test_two_skew_lines_are_not_acm():
    I = Ideal([x[0] * x[2], x[0] * x[3], x[1] * x[2], x[1] * x[3]])
    C = minimal_free_resolution(I)
    assert C.length == 3
    assert sheaf_cohomology_dim(I, "ideal", 1, 0, C) == 1
    assert sheaf_cohomology_dim(I, "ideal", 1, 1, C) == 0


def test_plane_cubic_has_genus_one():
    I = Ideal([x[3], x[0] ** 3 + x[1] ** 3 + x[2] ** 3])
    assert sheaf_cohomology_dim(I, "structure", 1, 0) == 1
    assert sheaf_cohomology_dim(I, "structure", 1, 1) == 0


def test_betti_text_and_json_round_trip():
    B = BettiTable.from_rows({0: "1", 1: ". 3 .", 2: ". 4 12 4", 3: ". . . 3", 4: ". . . . 1"})
    assert BettiTable.parse(B.pretty()) == B
    assert BettiTable.from_json(B.to_json()) == B
    assert B.column_sums() == [1, 7, 12, 7, 1]
    assert B.min_generator_degree() == 2


def test_chain_complex_rejects_mismatched_twists():
    a = GradedMatrix(R3, [[x[0]]], source=[-1], target=[0])
    b = GradedMatrix(R3, [[x[1]]], source=[-3], target=[-2])
    with pytest.raises(ValueError):
        ChainComplex([a, b])
