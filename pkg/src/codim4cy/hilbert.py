"""Hilbert series and polynomials of homogeneous ideals.

Everything is read off the lead-term ideal of a Gröbner basis, which has the
same Hilbert function as the ideal itself.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gb import Ideal

__all__ = [
    "HilbertPolynomial",
    "monomial_hilbert_numerator",
    "hilbert_series_numerator",
    "hilbert_function",
    "krull_dimension",
    "locus_dimension",
    "hilbert_polynomial",
    "curve_invariants",
    "cy_invariants_from_hp",
]


# ---------------------------------------------------------------------------
# integer polynomials in t as lists of Python ints (index = power)


def _trim(a: list) -> list:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _add(a: list, b: list, shift: int = 0, sign: int = 1) -> list:
    out = list(a) + [0] * max(0, len(b) + shift - len(a))
    for k, c in enumerate(b):
        out[k + shift] += sign * c
    return _trim(out)


def _mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _minimalize(G: np.ndarray) -> np.ndarray:
    """Drop generators divisible by another one (and duplicates)."""
    if G.shape[0] <= 1:
        return G
    G = np.unique(G, axis=0)
    G = G[np.argsort(G.sum(axis=1), kind="stable")]
    keep = np.ones(G.shape[0], dtype=bool)
    for i in range(G.shape[0]):
        if not keep[i]:
            continue
        div = np.all(G[i] <= G[i + 1:], axis=1)
        keep[i + 1:] &= ~div
    return G[keep]


def _numerator(G: np.ndarray) -> list:
    # Hilbert series numerator of S / (monomials in G), G minimal
    if G.shape[0] == 0:
        return [1]
    degs = G.sum(axis=1)
    if G.shape[0] == 1:
        return _add([1], [1], int(degs[0]), -1)
    support = G > 0
    if (support.sum(axis=0) <= 1).all():
        # pairwise coprime generators: a complete intersection
        out = [1]
        for d in degs:
            out = _mul(out, _add([1], [1], int(d), -1))
        return out
    counts = support.sum(axis=0)
    v = int(np.argmax(counts))
    col = G[support[:, v], v]
    e = int(np.sort(col)[(col.shape[0] - 1) // 2])
    # I + (x_v^e)
    rest = G[G[:, v] < e]
    pv = np.zeros((1, G.shape[1]), dtype=G.dtype)
    pv[0, v] = e
    plus = _minimalize(np.vstack([rest, pv]))
    # I : x_v^e
    quot = G.copy()
    quot[:, v] = np.maximum(quot[:, v] - e, 0)
    quot = _minimalize(quot)
    return _add(_numerator(plus), _numerator(quot), e, 1)


def monomial_hilbert_numerator(gens) -> list:
    """Numerator N(t) of the Hilbert series of S/I for a monomial ideal.

    Parameters
    ----------
    gens : array_like, shape (k, n)
        Exponent vectors of the generators.

    Returns
    -------
    list of int
        Coefficients of N(t), constant term first; HS = N(t) / (1 - t)^n.
    """
    G = np.asarray(gens, dtype=np.int64)
    if G.ndim != 2:
        raise ValueError("expected a (k, n) exponent array")
    return _numerator(_minimalize(G))


def hilbert_series_numerator(I: Ideal, budget: int | None = None) -> list:
    """N(t) with HS(S/I) = N(t) / (1 - t)^nvars, as a list of ints."""
    return monomial_hilbert_numerator(I.lead_exponents(budget=budget))


def hilbert_function(I: Ideal, m: int, budget: int | None = None) -> int:
    """dim_k (S/I)_m, expanded from the Hilbert series."""
    if m < 0:
        return 0
    N = hilbert_series_numerator(I, budget)
    n = I.ring.nvars
    return sum(c * math.comb(m - k + n - 1, n - 1) for k, c in enumerate(N) if k <= m)


def _min_cover_size(G: np.ndarray) -> int:
    n = G.shape[1]
    support = G > 0
    for size in range(n + 1):
        for S in itertools.combinations(range(n), size):
            if support[:, list(S)].any(axis=1).all():
                return size
    return n


def krull_dimension(I: Ideal, budget: int | None = None) -> int:
    """Krull dimension of S/I; -1 when I is the unit ideal."""
    G = _minimalize(I.lead_exponents(budget=budget))
    if G.shape[0] and (G.sum(axis=1) == 0).any():
        return -1
    return I.ring.nvars - _min_cover_size(G)


def locus_dimension(I: Ideal, budget: int | None = None) -> int:
    """Dimension of the projective zero locus V(I); -1 when it is empty."""
    return max(krull_dimension(I, budget) - 1, -1)


@dataclass(frozen=True)
class HilbertPolynomial:
    """Univariate polynomial with exact rational coefficients, constant term first."""

    coefficients: tuple

    def __post_init__(self):
        c = [Fraction(x) for x in self.coefficients]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coefficients", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, k: int) -> Fraction:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else Fraction(0)

    def __call__(self, t) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.coefficients):
            out = out * t + c
        return out

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for k in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = str(abs(c))
            body = mag if k == 0 else f"{mag}*t" if k == 1 else f"{mag}*t^{k}"
            parts.append((sign, body))
        text = "".join(s + b for s, b in parts)
        return text[1:] if text.startswith("+") else text

    @classmethod
    def parse(cls, text: str) -> "HilbertPolynomial":
        """Inverse of ``str``: accepts sums of ``c*t^k``, ``c*t`` and constants."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty polynomial")
        terms = []
        for tok in s.replace("-", "+-").split("+"):
            if tok:
                terms.append(tok)
        coeffs: dict[int, Fraction] = {}
        for tok in terms:
            if "t" in tok:
                head, _, power = tok.partition("t")
                head = head.rstrip("*")
                c = Fraction(head if head not in ("", "-") else head + "1")
                k = int(power[1:]) if power.startswith("^") else 1
            else:
                c, k = Fraction(tok), 0
            coeffs[k] = coeffs.get(k, Fraction(0)) + c
        top = max(coeffs) if coeffs else 0
        return cls(tuple(coeffs.get(k, Fraction(0)) for k in range(top + 1)))


def _binomial_poly(shift: int, r: int) -> list:
    # coefficients of C(t + shift, r) as a polynomial in t
    out = [Fraction(1)]
    for i in range(r):
        out = [Fraction(0)] + out
        for k in range(len(out) - 1):
            out[k] += out[k + 1] * (shift - i)
    return [c / math.factorial(r) for c in out]


def hilbert_polynomial_from_numerator(N: Sequence[int], nvars: int) -> HilbertPolynomial:
    """Hilbert polynomial of N(t) / (1 - t)^nvars by exact cancellation of (1 - t)."""
    q = list(N)
    D = nvars
    while D > 0 and sum(q) == 0 and any(q):
        # synthetic division by (1 - t): q = (1 - t) r  =>  r_k = sum_{i<=k} q_i
        r, acc = [], 0
        for c in q[:-1]:
            acc += c
            r.append(acc)
        q, D = r, D - 1
    if D == 0 or not any(q):
        return HilbertPolynomial(())
    # HF(m) = sum_k q_k C(m - k + D - 1, D - 1) for m large
    total = [Fraction(0)] * D
    for k, c in enumerate(q):
        if c:
            for i, b in enumerate(_binomial_poly(D - 1 - k, D - 1)):
                total[i] += c * b
    return HilbertPolynomial(tuple(total))


def hilbert_polynomial(I: Ideal, budget: int | None = None) -> HilbertPolynomial:
    return hilbert_polynomial_from_numerator(hilbert_series_numerator(I, budget), I.ring.nvars)


def curve_invariants(I: Ideal, budget: int | None = None) -> tuple[int, int]:
    """Degree and arithmetic genus of a one-dimensional projective scheme V(I).

    Raises
    ------
    ValueError
        If V(I) is not a curve.
    """
    H = hilbert_polynomial(I, budget)
    if H.degree != 1:
        raise ValueError(f"expected a curve, Hilbert polynomial is {H}")
    deg, chi = H.coefficient(1), H.coefficient(0)
    if deg.denominator != 1 or chi.denominator != 1:
        raise ValueError(f"non-integral Hilbert polynomial {H}")
    return int(deg), int(1 - chi)


def cy_invariants_from_hp(H: HilbertPolynomial, nvars: int = 8) -> tuple[int, int, bool]:
    """``(d, c2H, linearly_normal)`` from ``d/6 t^3 + c2H/12 t``.

    A Calabi-Yau threefold in ``P^{nvars-1}`` is linearly normal exactly when
    ``h^0(O_X(1)) = chi(O_X(1)) = nvars``, i.e. ``c2H = 12*nvars - 2d``
    (``96 - 2d`` in ``P^7``).

    Raises
    ------
    ValueError
        If ``H`` is not of that shape.
    """
    if H.degree != 3 or H.coefficient(2) != 0 or H.coefficient(0) != 0:
        raise ValueError(f"Hilbert polynomial {H} is not of Calabi-Yau threefold shape")
    d = 6 * H.coefficient(3)
    c2h = 12 * H.coefficient(1)
    if d.denominator != 1 or c2h.denominator != 1:
        raise ValueError(f"Hilbert polynomial {H} has non-integral invariants")
    d, c2h = int(d), int(c2h)
    return d, c2h, c2h == 12 * nvars - 2 * d
