import dataclasses

import numpy as np
import pytest

from codim4cy.complexes import (
    AlternatingMatrix,
    GNData,
    KMData,
    PfaffData,
    alt3_from_row,
    build_km_complex,
    build_pfaffian_complex,
    canonical_twist,
    gn_expected_betti,
    gn_scheme,
    km_auxiliaries,
    koszul_complex,
    pfaffian,
    pfaffian_partition_sum,
    pfaffian_row,
    quasi_self_dual_check,
    signed_pfaffian,
    verify_complex,
)
from codim4cy.hilbert import locus_dimension
from codim4cy.pipeline import Rng, random_alternating, random_form, random_km_data
from codim4cy.resolve import ChainComplex, GradedMatrix, betti_table, minimal_free_resolution
from codim4cy.ring import PolyRing
from oracles import det_mod, random_alternating_int

P7 = PolyRing(101, 8)
K = PolyRing(101, 1)


def _const_alt(Z):
    return AlternatingMatrix(K, [[K.constant(v) for v in row] for row in Z])


def test_small_pfaffians():
    a = K.var(0)
    assert pfaffian(AlternatingMatrix(K, {(0, 1): a}, l=1)) == a
    R = PolyRing(101, 6)
    z = R.gens()
    Z = AlternatingMatrix(R, {(0, 1): z[0], (0, 2): z[1], (0, 3): z[2], (1, 2): z[3], (1, 3): z[4], (2, 3): z[5]}, l=1)
    assert pfaffian(Z) == z[0] * z[5] - z[1] * z[4] + z[2] * z[3]
    assert pfaffian(AlternatingMatrix(R, {(0, 1): z[0], (1, 2): z[1]}, l=1)).is_zero()


def test_pfaffian_squared_is_determinant():
    rng = np.random.default_rng(1)
    for n in (2, 4, 6):
        for _ in range(10):
            Z = random_alternating_int(n, 101, rng)
            pf = pfaffian(_const_alt(Z)).constant_value()
            assert pf * pf % 101 == det_mod(Z, 101)


def test_partition_sum_matches_expansion():
    for n in (2, 4, 6):
        Y = random_alternating(P7, [0] * n, 1, Rng(n))
        assert pfaffian_partition_sum(Y) == pfaffian(Y)


def test_signed_pfaffians():
    R = PolyRing(101, 3)
    y = R.gens()
    Y = AlternatingMatrix(R, {(0, 1): y[0], (0, 2): y[1], (1, 2): y[2]}, l=1)
    assert signed_pfaffian(Y, (2,)) == -y[1]
    assert signed_pfaffian(Y, (1, 1)).is_zero()
    assert signed_pfaffian(Y, (3, 1, 2)) == R.constant(100)


def test_pfaffian_row_kills_the_matrix():
    for tau in (3, 5, 7):
        Y = random_alternating(P7, [0] * tau, 1, Rng(tau))
        row = pfaffian_row(Y)
        for j in range(tau):
            acc = P7.zero()
            for i in range(tau):
                acc = acc + row[i] * Y[i, j]
            assert acc.is_zero()
    with pytest.raises(ValueError):
        pfaffian_row(random_alternating(P7, [0] * 4, 1, Rng(0)))


def test_degenerate_pfaffian_row():
    Y = random_alternating(P7, [0] * 5, 1, Rng(2))
    Y0 = AlternatingMatrix(P7, {(i, j): Y[i, j] for i in range(4) for j in range(i + 1, 4)}, [0] * 5, 1)
    row = pfaffian_row(Y0)
    assert all(r.is_zero() for r in row[:4])
    assert row[4] == pfaffian(Y0.delete([4]))


def test_alt3_round_trip():
    one, zero = K.one(), K.zero()
    B = alt3_from_row([one, zero, zero])
    assert B[1, 2] == one and B[0, 1].is_zero() and B[0, 2].is_zero()
    assert all(B[i, j].is_zero() for i in range(3) for j in range(3)
               if (i, j) not in ((1, 2), (2, 1))) and alt3_from_row([zero] * 3) == alt3_from_row([zero] * 3)
    rng = Rng(3)
    for _ in range(10):
        r = [random_form(P7, 1, rng) for _ in range(3)]
        assert pfaffian_row(alt3_from_row(r)) == r


def test_auxiliaries_with_zero_A():
    D = random_km_data(P7, [0, 0, 0], [0, 0, 0], 1, 1, seed=4)
    D = dataclasses.replace(D, A=[[P7.zero()] * 3 for _ in range(3)])
    aux = km_auxiliaries(D)
    assert aux["w"].is_zero()
    assert all(f.is_zero() for row in aux["S"] for f in row)
    assert all(f.is_zero() for row in aux["T"] for f in row)
    assert aux["z"] == [D.u * bj for bj in D.b]


def test_km_builder_rejects_bad_degrees():
    D = random_km_data(P7, [0] * 3, [0] * 3, 1, 1, seed=5)
    bad = dataclasses.replace(D, b=[P7.var(0) * P7.var(1)] + D.b[1:])
    with pytest.raises(ValueError, match="b"):
        build_km_complex(bad)


def test_km_shift_invariance():
    D = random_km_data(P7, [0] * 5, [-1, 0, 0], 1, 1, seed=6)
    C, I = build_km_complex(D)
    n = 2
    a = tuple(x + n for x in D.a)
    l1 = D.l1 - 2 * n
    Y = AlternatingMatrix(P7, {(i, j): D.Y[i, j] for i in range(5) for j in range(i + 1, 5)}, a, l1)
    E = dataclasses.replace(D, a=a, f=tuple(x + n for x in D.f), l1=l1, l2=D.l2 + n, Y=Y)
    C2, I2 = build_km_complex(E)
    for k in range(1, 5):
        assert C2[k].entries == C[k].entries
    assert I2.generators == I.generators


def test_km_data_json_round_trip():
    D = random_km_data(P7, [0] * 5, [-1, 0, 0], 1, 1, seed=7)
    E = KMData.from_json(D.to_json())
    assert E.to_json() == D.to_json()
    assert build_km_complex(E)[1].generators == build_km_complex(D)[1].generators


def test_perturbed_complex_is_located():
    D = random_km_data(P7, [0] * 3, [0] * 3, 1, 1, seed=8)
    C, _ = build_km_complex(D)
    maps = [C[k] for k in range(1, 5)]
    M = maps[1]
    entries = [list(r) for r in M.entries]
    i, j = next((i, j) for i in range(len(entries)) for j in range(len(entries[0])) if not entries[i][j].is_zero())
    f = entries[i][j]
    entries[i][j] = f + P7.var(0) ** f.degree()
    maps[1] = GradedMatrix(P7, entries, M.source, M.target)
    rep = verify_complex(ChainComplex(maps))
    assert not rep.compositions_zero and "d1*d2" in rep.message


def test_koszul_quasi_self_duality():
    C = koszul_complex(P7.gens()[:4])
    assert verify_complex(C).ok
    assert quasi_self_dual_check(C, -4)
    assert not quasi_self_dual_check(C, -3)


def test_pfaffian_complexes():
    Y = random_alternating(P7, [0] * 3, 1, Rng(9))
    C, I = build_pfaffian_complex(PfaffData(P7, Y))
    assert verify_complex(C).ok
    assert {str(g.monic()) for g in I.generators} == {str(Y[i, j].monic()) for i in range(3) for j in range(i + 1, 3)}
    Y = random_alternating(P7, [0] * 5, 1, Rng(10))
    C, I = build_pfaffian_complex(PfaffData(P7, Y))
    assert verify_complex(C).ok and quasi_self_dual_check(C, C.twists(3)[0])
    assert len(I.generators) == 5 and locus_dimension(I) == 4


def test_pfaffian_data_json_round_trip():
    D = PfaffData(P7, random_alternating(P7, [0] * 5, 1, Rng(12)))
    assert PfaffData.from_json(D.to_json()).to_json() == D.to_json()


def test_gn_generic_determinantal():
    R = PolyRing(101, 9)
    z = R.gens()
    phi = [[z[3 * i + j] for j in range(3)] for i in range(3)]
    D = GNData(R, (0, 0, 0), (1, 1, 1), phi)
    I, shape = gn_scheme(D)
    assert len(I.generators) == 9
    assert locus_dimension(I) == 9 - 1 - 4
    assert betti_table(minimal_free_resolution(I)).column_sums() == [1, 9, 16, 9, 1]
    assert list(shape["ranks"]) == [1, 9, 16, 9, 1]
    assert GNData.from_json(D.to_json()).to_json() == D.to_json()


def test_gn_expected_shapes():
    assert gn_expected_betti((0,) * 4, (1,) * 4).column_sums() == [1, 16, 30, 16, 1]
    B = gn_expected_betti((0, 0, 0), (1, 1, 2))
    assert B.row(1)[:3] == [0, 3, 2] and B.row(2)[:4] == [0, 6, 12, 6]


def test_canonical_twists():
    assert canonical_twist("km", {"a": [0] * 5, "f": [-1, 0, 0], "l1": 1, "l2": 1}, 7) == 0
    assert canonical_twist("gn", {"a": [0] * 4, "f": [1] * 4}, 7) == 0
    assert canonical_twist("pf", {"e": [0] * 7, "l": 1}, 6) == 0
    with pytest.raises(ValueError):
        canonical_twist("xx", {}, 7)
