"""Acceptance criteria, one test (or a small group) per criterion.

Each test ends with a ``verdict`` call; the terminal summary then prints one
PASS / FAIL / XFAIL line per criterion.  Heavy geometry is marked ``slow``
(deselect with ``-m "not slow"``).
"""

import random
import time
from fractions import Fraction

import numpy as np
import pytest

from codim4cy.complexes import (
    AlternatingMatrix,
    build_km_complex,
    pfaffian,
    pfaffian_partition_sum,
    quasi_self_dual_check,
    verify_complex,
)
from codim4cy.gb import Ideal, minors_ideal
from codim4cy.hilbert import cy_invariants_from_hp, hilbert_polynomial
from codim4cy.pipeline import (
    Rng,
    c3_formula,
    c3_of,
    chi_conormal,
    coarse_smoothness,
    deformation_distinguisher,
    hodge,
    random_alternating,
    random_form,
    random_km_data,
    rho_check,
)
from codim4cy.resolve import BettiTable, betti_table, t1_degree0
from codim4cy.ring import PolyRing
from oracles import det_gauss, det_mod, random_alternating_int

P7 = PolyRing(101, 8)
K = PolyRing(101, 1)
P7_PRESETS = ["deg15", "deg17gn", "deg17km", "deg20gn"]


# 1 -------------------------------------------------------------------------


@pytest.mark.criterion("1")
def test_pfaffian_oracle(verdict):
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    for n in (2, 4, 6, 8):
        for _ in range(100):
            Z = random_alternating_int(n, 101, rng)
            pf = pfaffian(AlternatingMatrix(K, [[K.constant(v) for v in r] for r in Z])).constant_value()
            assert pf * pf % 101 == det_gauss(Z, 101)
            if n <= 4:
                assert det_gauss(Z, 101) == det_mod(Z, 101)
    for n in (2, 4, 6, 8):
        Y = random_alternating(P7, [0] * n, 1, Rng.child(n, "criterion1"))
        assert pfaffian_partition_sum(Y) == pfaffian(Y)
    elapsed = time.perf_counter() - t
    verdict(f"400 matrices, Pf^2 = det; partition sum = expansion; {elapsed:.2f}s")


# 2 and 3 -------------------------------------------------------------------

KM_PATTERNS = {
    "deg17km": ([-1, 0, 0], 1, 1),
    "zero": ([0, 0, 0], 1, 1),
}


@pytest.fixture(scope="module")
def km_builds():
    builds = []
    t = time.perf_counter()
    for tau in (3, 5):
        for name, (f, l1, l2) in KM_PATTERNS.items():
            for k in range(20):
                D = random_km_data(P7, [0] * tau, f, l1, l2, seed=k, label=f"criterion2/{tau}/{name}")
                builds.append((D, build_km_complex(D)[0]))
    return builds, time.perf_counter() - t


@pytest.mark.criterion("2")
def test_km_complex_identities(km_builds, verdict):
    builds, elapsed = km_builds
    for D, C in builds:
        rep = verify_complex(C)
        assert rep.ok, rep.message
    assert elapsed < 60
    verdict(f"{len(builds)} builds, all compositions zero and homogeneous; {elapsed:.1f}s")


@pytest.mark.criterion("3")
def test_km_quasi_self_duality(km_builds, verdict):
    builds, _ = km_builds
    for D, C in builds:
        assert D.g4 == D.l1 - D.l2 - 3 * D.m + 2 * sum(D.f)
        assert quasi_self_dual_check(C, D.g4)
    verdict(f"{len(builds)} builds quasi-self-dual at g4 = l1 - l2 - 3m + 2 sum(f)")


# 4 -------------------------------------------------------------------------

GOLDEN = {
    "deg15": BettiTable({(0, 0): 1, (1, 2): 5, (1, 3): 1, (2, 3): 5, (2, 5): 5, (3, 5): 1, (3, 6): 5, (4, 8): 1}),
    "deg17gn": BettiTable.from_rows({0: "1", 1: ". 3 2", 2: ". 6 12 6", 3: ". . 2 3", 4: ". . . . 1"}),
    "deg17km": BettiTable.from_rows({0: "1", 1: ". 3", 2: ". 4 12 4", 3: ". . . 3", 4: ". . . . 1"}),
    "deg20gn": BettiTable({(0, 0): 1, (1, 3): 16, (2, 4): 30, (3, 5): 16, (4, 8): 1}),
    "deg14p6": BettiTable({(0, 0): 1, (1, 3): 7, (2, 4): 7, (3, 7): 1}),
}


@pytest.mark.slow
@pytest.mark.criterion("4")
@pytest.mark.parametrize("name", list(GOLDEN))
def test_betti_golden(presets, name, verdict):
    t = time.perf_counter()
    B = betti_table(presets.resolution(name))
    assert B == GOLDEN[name], B.pretty()
    if name == "deg17gn":
        assert B.column_sums() == [1, 9, 16, 9, 1]
    verdict(f"{name}: {B.column_sums()}; {time.perf_counter() - t:.1f}s")


# 5 -------------------------------------------------------------------------

EXPECTED_HP = {"deg15": (15, 66), "deg17gn": (17, 62), "deg17km": (17, 62), "deg20gn": (20, 56), "deg14p6": (14, 56)}


@pytest.mark.criterion("5")
@pytest.mark.parametrize("name", list(EXPECTED_HP))
def test_hilbert_invariants(presets, name, verdict):
    I = presets.ideal(name)
    d, c2h, ln = cy_invariants_from_hp(hilbert_polynomial(I), I.ring.nvars)
    assert (d, c2h) == EXPECTED_HP[name] and ln
    verdict(f"{name}: d = {d}, c2.H = {c2h}, linearly normal")


# 6 -------------------------------------------------------------------------

EXPECTED_C3 = {"deg15": -150, "deg17gn": -112, "deg17km": -108, "deg20gn": -64}


@pytest.mark.slow
@pytest.mark.criterion("6")
@pytest.mark.parametrize("name", P7_PRESETS)
def test_smooth_and_c3(presets, name, verdict):
    rep = presets.report(name)
    assert rep.smoothness["verdict"] == "smooth"
    assert rep.c3 == EXPECTED_C3[name]
    if name == "deg17km":
        assert (rep.e, rep.pa) == (2, 3)
    secs = sum(rep.timings_ms.values()) / 1000
    verdict(f"{name}: smooth at e = {rep.smoothness['e']}, c3 = {rep.c3} from a degree-{rep.curve_degree} "
            f"curve with p_a = {rep.pa} at e = {rep.e}; seed {rep.seed}; {secs:.0f}s")


@pytest.mark.slow
@pytest.mark.criterion("6")
@pytest.mark.xfail(strict=True, reason="deg15, e=2: the quadrics in I are the five Pfaffians, which do not "
                   "generate the twisted conormal bundle, so every Jacobian locus is a surface and "
                   "neither the smoothness verdict nor a genus-4 curve is reachable; e=3 is used instead")
def test_deg15_at_degree_two(presets, verdict):
    I = presets.ideal("deg15")
    rep = None
    for seed in range(10):
        rep = coarse_smoothness(I, 2, Rng.child(seed, "criterion6/deg15"), max_attempts=2)
        if rep.verdict == "smooth":
            break
    assert rep.verdict == "smooth"
    assert c3_of(I, 2, Rng(0))[:2] == (-150, 4)


@pytest.mark.slow
@pytest.mark.criterion("6")
@pytest.mark.xfail(strict=True, reason="deg17gn, e=2: the three quadrics are the 2x2 minors of a 2x3 linear "
                   "matrix, so their Jacobian has rank at most 2 along X and never cuts out a curve; "
                   "c3 = -112 is recovered at e=3 instead")
def test_deg17gn_at_degree_two(presets, verdict):
    I = presets.ideal("deg17gn")
    assert c3_of(I, 2, Rng(0), max_attempts=2)[:2] == (-112, 1)


@pytest.mark.slow
@pytest.mark.criterion("6")
@pytest.mark.xfail(strict=True, reason="deg17km, e=2: I_2 is three-dimensional, so every triple spans the same "
                   "net and the two-triple test can never shrink the degeneracy curve; smoothness is "
                   "certified at e=3 (c3 and p_a at e=2 do match)")
def test_deg17km_smooth_at_degree_two(presets, verdict):
    I = presets.ideal("deg17km")
    rep = None
    for seed in range(10):
        rep = coarse_smoothness(I, 2, Rng.child(seed, "criterion6/deg17km"), max_attempts=2)
        if rep.verdict == "smooth":
            break
    assert rep.verdict == "smooth"


# 7 -------------------------------------------------------------------------

EXPECTED_H12 = {"deg15": 76, "deg17gn": 57, "deg17km": 55, "deg20gn": 33}


@pytest.mark.slow
@pytest.mark.criterion("7")
@pytest.mark.parametrize("name", P7_PRESETS)
def test_rho_and_hodge(presets, name, verdict):
    rho, table = rho_check(presets.ideal(name), presets.resolution(name))
    assert rho == "rho=1" and table["acm"]
    rep = presets.report(name)
    assert hodge(rep.c3, rho) == (1, EXPECTED_H12[name])
    verdict(f"{name}: rho = 1 (resolution length 4), h12 = {EXPECTED_H12[name]}")


# 8 -------------------------------------------------------------------------


@pytest.mark.slow
@pytest.mark.criterion("8")
@pytest.mark.parametrize("name,expected", [("deg17gn", 58), ("deg20gn", 34)])
def test_t1_parity(presets, name, expected, verdict):
    t = time.perf_counter()
    assert t1_degree0(presets.ideal(name)) == expected
    verdict(f"{name}: t1_degree0 = {expected}; {time.perf_counter() - t:.0f}s")


# 9 -------------------------------------------------------------------------

# printed tables of the other degree-14 and degree-15 threefolds in P^6
NEW_DEG14 = {0: "1", 1: ". 1", 3: ". 14 35 35 21 7 1", 4: ". . . 1"}
NEW_DEG15 = {0: "1", 1: ". 1", 3: ". 4 4", 4: ". 19 70 99 70 26 4"}
KNOWN_DEG15 = {0: "1", 2: ". 3", 3: ". 11 34 35 21 7 1", 4: ". . . 1"}


@pytest.mark.criterion("9")
def test_deformation_distinguisher(presets, verdict):
    new = BettiTable.from_rows(NEW_DEG14)
    known = betti_table(presets.resolution("deg14p6"))
    assert (new.min_generator_degree(), known.min_generator_degree()) == (2, 3)
    assert deformation_distinguisher(new, known) == "not deformation equivalent"
    B15, K15 = BettiTable.from_rows(NEW_DEG15), BettiTable.from_rows(KNOWN_DEG15)
    assert deformation_distinguisher(B15, K15) == "not deformation equivalent"
    assert deformation_distinguisher(known, known) == "indeterminate"
    verdict("degree 14: min generator degrees 2 vs 3, not deformation equivalent")


# 10 ------------------------------------------------------------------------


@pytest.mark.criterion("10")
def test_formula_identities(verdict):
    t = time.perf_counter()
    rnd = random.Random(10)
    for _ in range(1000):
        d, c2h, e, pa = (rnd.randint(-10 ** 4, 10 ** 4) for _ in range(4))
        lhs = chi_conormal(-3 * e + 8, d, c2h, c3_formula(d, c2h, e, pa))
        h = -4 * e + 8
        assert lhs == 3 * (Fraction(d, 6) * h ** 3 + Fraction(c2h, 12) * h) + 1 - pa
    assert c3_formula(15, 66, 2, 4) == -150
    assert c3_formula(17, 62, 2, 1) == -112
    elapsed = time.perf_counter() - t
    assert elapsed < 1
    verdict(f"1000 random tuples; c3_formula values -150 and -112; {elapsed:.2f}s")


# 11 ------------------------------------------------------------------------


@pytest.mark.criterion("11")
def test_cone_negative_control(verdict):
    # 2x2 minors of a 2x5 linear matrix in x0..x6 only: the cone over a scroll
    # surface, a threefold in P^7 singular at the apex (0:...:0:1)
    P6 = PolyRing(101, 7)
    verdicts = []
    for seed in range(3):
        I = scroll_ideal(P6, seed)
        rep = coarse_smoothness(I, 2, Rng.child(seed, "criterion11/test"))
        verdicts.append(rep.verdict)
        assert rep.verdict != "smooth"
    # the same construction in all eight variables is smooth and is certified
    rep = coarse_smoothness(scroll_ideal(P7, 0), 2, Rng.child(0, "criterion11/test"))
    assert rep.verdict == "smooth"
    verdict(f"cone verdicts over 3 seeds: {', '.join(verdicts)}; smooth scroll control: {rep.verdict}")


def scroll_ideal(R, seed):
    rng = Rng.child(seed, "criterion11")
    M = [[random_form(R, 1, rng) for _ in range(5)] for _ in range(2)]
    return Ideal([P7.parse(str(g)) for g in minors_ideal(M, 2).generators])
