"""Two degree-14 threefolds in P^6 with equal invariants but different Betti tables.

The Pfaffian one (seven cubics) is constructed and resolved here; the other
is given by its printed table, which starts with a quadric.  The smallest
generator degree is constant in flat families, so they cannot be deformation
equivalent.
"""

from codim4cy.hilbert import cy_invariants_from_hp, hilbert_polynomial
from codim4cy.pipeline import construct, deformation_distinguisher
from codim4cy.resolve import BettiTable, betti_table, minimal_free_resolution

I, _ = construct("deg14p6", 101, 0)
known = betti_table(minimal_free_resolution(I))
print("seven Pfaffian cubics:", cy_invariants_from_hp(hilbert_polynomial(I), nvars=7))
print(known.pretty())

other = BettiTable.from_rows({0: "1", 1: ". 1", 3: ". 14 35 35 21 7 1", 4: ". . . 1"})
print("\nprinted table of the other threefold:")
print(other.pretty())
print("\nsmallest generator degrees:", other.min_generator_degree(), known.min_generator_degree())
print("verdict:", deformation_distinguisher(other, known))
