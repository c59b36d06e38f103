import random
from fractions import Fraction

import pytest

from codim4cy.gb import Ideal, minors_ideal
from codim4cy.hilbert import hilbert_polynomial
from codim4cy.pipeline import (
    PRESETS,
    InvariantReport,
    Rng,
    c3_formula,
    c3_from_curve,
    chi_conormal,
    coarse_smoothness,
    construct,
    deformation_distinguisher,
    hodge,
    i4_ideal,
    jac3_ideal,
    random_form,
    rho_check,
)
from codim4cy.resolve import BettiTable, betti_table, minimal_free_resolution
from codim4cy.ring import PolyRing, num_monomials

P7 = PolyRing(101, 8)


def test_rng_is_deterministic_and_labelled():
    a, b = Rng(42), Rng(42)
    assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]
    assert Rng.child(1, "x").next_u64() == Rng.child(1, "x").next_u64()
    assert Rng.child(1, "x").next_u64() != Rng.child(1, "y").next_u64()
    r = Rng(0)
    draws = [r.below(7) for _ in range(2000)]
    assert set(draws) == set(range(7))


def test_random_forms():
    f = random_form(P7, 0, Rng(1))
    assert f.is_zero() or f.is_constant()
    g = random_form(P7, 1, Rng(1))
    assert len(g.terms) <= num_monomials(8, 1) and g.is_homogeneous()
    assert random_form(P7, 3, Rng(9)) == random_form(P7, 3, Rng(9))
    assert random_form(P7, -1, Rng(9)).is_zero()


def test_c3_formula_values():
    assert c3_formula(15, 66, 2, 4) == -150
    assert c3_formula(17, 62, 2, 1) == -112
    # a curve of genus p_a enters with 2 - p_a (see c3_from_curve)
    assert c3_from_curve(17, 62, 2, 3) == -108
    assert c3_from_curve(20, 56, 3, 353) == -64


def test_chi_conormal_value():
    assert chi_conormal(0, 15, 66, -150) == -139


def test_consistency_identity_random_integers():
    rnd = random.Random(0)
    for _ in range(200):
        d, c2h, e, pa = (rnd.randint(-50, 50) for _ in range(4))
        PH = lambda t: Fraction(d, 6) * t ** 3 + Fraction(c2h, 12) * t  # noqa: E731
        lhs = chi_conormal(-3 * e + 8, d, c2h, c3_formula(d, c2h, e, pa))
        assert lhs == 3 * PH(-4 * e + 8) + 1 - pa


def test_hodge_numbers():
    assert hodge(-112, "rho=1") == (1, 57)
    assert hodge(-64, "rho=1") == (1, 33)
    assert hodge(-98, "rho=1") == (1, 50)
    with pytest.raises(ValueError):
        hodge(-64, "undetermined")


def test_distinguisher():
    B = BettiTable.from_rows({0: "1", 2: ". 7 7", 4: ". . . 1"})
    assert deformation_distinguisher(B, B) == "indeterminate"


def test_presets_are_calabi_yau_shaped():
    for name, spec in PRESETS.items():
        assert spec["family"] in ("pf", "gn", "km", "pf+cubic")
        assert spec["nvars"] in (7, 8)


def test_construct_is_deterministic():
    I, meta = construct("deg17km", 101, 3)
    J, _ = construct("deg17km", 101, 3)
    assert I.generators == J.generators
    assert meta["dimension"] == 3 and meta["canonical_twist"] == 0
    degs = sorted(g.degree() for g in I.generators)
    assert degs == [2, 2, 2, 3, 3, 3, 3]


def test_jacobian_ideals_of_a_complete_intersection():
    # three generic quadrics in P^4 cut out a smooth curve, so the 3x3 minors
    # of their Jacobian vanish nowhere on it
    R = PolyRing(101, 5)
    rng = Rng(4)
    q = [random_form(R, 2, rng) for _ in range(3)]
    I = Ideal(q)
    J = jac3_ideal(q, I)
    assert hilbert_polynomial(J).degree == -1


def test_i4_ideal_contains_the_ideal():
    I, _ = construct("deg17km", 101, 0)
    quads = [g for g in I.generators if g.degree() == 2]
    J = i4_ideal(quads, I)
    assert all(J.contains(g) for g in I.generators)


def _scroll(R, seed):
    rng = Rng.child(seed, "scroll")
    M = [[random_form(R, 1, rng) for _ in range(5)] for _ in range(2)]
    return Ideal([P7.parse(str(g)) for g in minors_ideal(M, 2).generators])


def test_smooth_scroll_is_certified():
    rep = coarse_smoothness(_scroll(P7, 1), 2, Rng(1))
    assert rep.verdict == "smooth" and rep.combined_dim == -1
    assert all(t["Jac3"] == t["I4"] for t in rep.triples)


def test_cone_is_never_smooth():
    rep = coarse_smoothness(_scroll(PolyRing(101, 7), 1), 2, Rng(1), max_attempts=2)
    assert rep.verdict == "inconclusive"


def test_too_few_forms_is_inconclusive():
    R = PolyRing(101, 5)
    x = R.gens()
    rep = coarse_smoothness(Ideal([x[0] ** 3 + x[1] ** 3 + x[2] ** 3 + x[3] ** 3]), 3, Rng(0))
    assert rep.verdict == "inconclusive" and rep.attempts == 0


def test_rho_check_on_a_complete_intersection():
    rng = Rng(8)
    I = Ideal([random_form(P7, 2, rng) for _ in range(4)])
    verdict, table = rho_check(I)
    assert verdict == "rho=1" and table["acm"]


def test_report_json_round_trip():
    B = betti_table(minimal_free_resolution(Ideal(P7.gens()[:2])))
    rep = InvariantReport(example="x", prime=101, seed=0, d=1, c2H=2, linearly_normal=False, e=3,
                          curve_degree=4, pa=5, c3=-6, rho="rho=1", h11=1, h12=4, betti=B,
                          smoothness=None, timings_ms={"total": 1})
    again = InvariantReport.from_json(rep.to_json())
    assert again == rep
    assert list(rep.to_dict())[:4] == ["example", "prime", "seed", "d"]
