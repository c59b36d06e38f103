import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from codim4cy.gb import Ideal
from codim4cy.hilbert import (
    HilbertPolynomial,
    curve_invariants,
    cy_invariants_from_hp,
    hilbert_function,
    hilbert_polynomial,
    hilbert_series_numerator,
    locus_dimension,
    monomial_hilbert_numerator,
)
from codim4cy.pipeline import Rng, random_form
from codim4cy.ring import PolyRing
from oracles import hilbert_function as hf_oracle

P7 = PolyRing(101, 8)


def _linear(k, seed):
    rng = Rng(seed)
    return [random_form(P7, 1, rng) for _ in range(k)]


def test_numerators():
    assert hilbert_series_numerator(Ideal([P7.var(0)])) == [1, -1]
    assert hilbert_series_numerator(Ideal([], P7)) == [1]
    assert monomial_hilbert_numerator([[2, 0], [1, 1]]) == [1, 0, -2, 1]


def test_locus_dimensions():
    assert locus_dimension(Ideal([P7.var(0)])) == 6
    assert locus_dimension(Ideal(P7.gens())) == -1
    assert locus_dimension(Ideal([P7.one()])) == -1


def test_hilbert_polynomials_of_linear_spaces():
    t = np.arange(10)
    H = hilbert_polynomial(Ideal([], P7))
    assert all(H(m) == math.comb(m + 7, 7) for m in t)
    H = hilbert_polynomial(Ideal(_linear(3, 1)))
    assert all(H(m) == math.comb(m + 4, 4) for m in t)


def test_curve_invariants():
    assert curve_invariants(Ideal(_linear(6, 2))) == (1, 0)
    lin = _linear(5, 3)
    x = P7.gens()
    conic = x[0] * x[1] - x[2] * x[2]
    cubic = x[0] ** 3 + x[1] ** 3 + x[2] ** 3
    five = x[3:]
    assert curve_invariants(Ideal(five + [conic])) == (2, 0)
    assert curve_invariants(Ideal(five + [cubic])) == (3, 1)
    with pytest.raises(ValueError):
        curve_invariants(Ideal(lin))


def test_cy_invariants():
    H = HilbertPolynomial.parse("5/2*t^3+11/2*t")
    assert cy_invariants_from_hp(H) == (15, 66, True)
    assert cy_invariants_from_hp(HilbertPolynomial.parse("17/6*t^3+31/6*t")) == (17, 62, True)
    assert cy_invariants_from_hp(HilbertPolynomial.parse("3*t^3+6*t")) == (18, 72, False)
    assert cy_invariants_from_hp(HilbertPolynomial.parse("7/3*t^3+14/3*t"), nvars=7) == (14, 56, True)
    with pytest.raises(ValueError):
        cy_invariants_from_hp(HilbertPolynomial.parse("t^2+1"))


def test_polynomial_text_round_trip():
    H = HilbertPolynomial((Fraction(0), Fraction(31, 6), Fraction(0), Fraction(17, 6)))
    assert HilbertPolynomial.parse(str(H)) == H


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_hilbert_function_matches_linear_algebra(seed, degrees):
    R = PolyRing(101, 4)
    rng = Rng(seed)
    gens = [random_form(R, d, rng) for d in degrees]
    gens = [g for g in gens if not g.is_zero()] or [R.var(0)]
    I = Ideal(gens)
    for m in range(6):
        assert hilbert_function(I, m) == hf_oracle(gens, 4, m)
