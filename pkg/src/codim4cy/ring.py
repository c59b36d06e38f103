"""Exact arithmetic over prime fields: monomials, grevlex, sparse polynomials.

Polynomials are stored as a pair of numpy arrays (exponent rows and
coefficients) kept in strictly descending graded reverse lexicographic order
with x0 > x1 > ... > x_{n-1}.  Homogeneous pieces of a fixed degree are
indexed by their position in the descending grevlex list of all monomials of
that degree; :func:`monomial_basis` and :func:`rank_monomials` translate
between the two views and are what the Groebner and linear-algebra layers
use.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from numba import njit

__all__ = [
    "PrimeField",
    "PolyRing",
    "Monomial",
    "Polynomial",
    "RingMismatchError",
    "is_prime",
    "monomial_basis",
    "rank_monomials",
    "num_monomials",
    "poly_arith",
    "partial_derivative",
    "jacobian",
]

MAX_DEGREE = 40
MAX_VARS = 16


class RingMismatchError(ValueError):
    """Raised when operands live in different polynomial rings."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p; elements are canonical integers in [0, p)."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __call__(self, a: int) -> int:
        return a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)


# ---------------------------------------------------------------------------
# monomial bookkeeping


@functools.lru_cache(maxsize=None)
def binomial_table() -> np.ndarray:
    """``table[a, b] = C(a, b)`` for a <= MAX_DEGREE + MAX_VARS, b <= MAX_VARS."""
    rows, cols = MAX_DEGREE + MAX_VARS + 1, MAX_VARS + 1
    t = np.zeros((rows, cols), dtype=np.int64)
    for a in range(rows):
        t[a, 0] = 1
        for b in range(1, min(a, cols - 1) + 1):
            t[a, b] = t[a - 1, b - 1] + t[a - 1, b]
    return t


def num_monomials(n: int, d: int) -> int:
    """Number of monomials of degree ``d`` in ``n`` variables."""
    if d < 0:
        return 0
    return int(binomial_table()[d + n - 1, n - 1]) if n > 0 else int(d == 0)


@njit(cache=True)
def _rank_one(e, d, binom):
    # position of e among degree-d monomials listed in descending grevlex
    n = e.shape[0]
    r = d
    pos = 0
    for k in range(n - 1, 0, -1):
        ek = e[k]
        if ek > 0:
            pos += binom[r + k, k] - binom[r - ek + k, k]
        r -= ek
    return pos


@njit(cache=True)
def _rank_rows(exps, d, binom):
    m = exps.shape[0]
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        out[i] = _rank_one(exps[i], d, binom)
    return out


def rank_monomials(exps: np.ndarray, d: int) -> np.ndarray:
    """Positions of the rows of ``exps`` (all of degree ``d``) in the basis."""
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    if exps.ndim == 1:
        exps = exps.reshape(1, -1)
    return _rank_rows(exps, d, binomial_table())


def _compositions(n: int, d: int) -> np.ndarray:
    if n == 1:
        return np.array([[d]], dtype=np.int64)
    blocks = []
    for last in range(d + 1):
        head = _compositions(n - 1, d - last)
        blocks.append(np.hstack([head, np.full((head.shape[0], 1), last, dtype=np.int64)]))
    return np.vstack(blocks)


@functools.lru_cache(maxsize=64)
def _basis_cached(n: int, d: int) -> np.ndarray:
    if d < 0:
        return np.zeros((0, n), dtype=np.int64)
    if n == 0:
        return np.zeros((1 if d == 0 else 0, 0), dtype=np.int64)
    rows = _compositions(n, d)
    rows = rows[grevlex_argsort(rows)]
    rows.setflags(write=False)
    return rows


def monomial_basis(n: int, d: int) -> np.ndarray:
    """All degree-``d`` exponent vectors in ``n`` variables, descending grevlex.

    The returned array is read-only and shared; copy before mutating.
    """
    if d > MAX_DEGREE:
        raise ValueError(f"degree {d} exceeds supported maximum {MAX_DEGREE}")
    return _basis_cached(n, d)


def grevlex_argsort(exps: np.ndarray) -> np.ndarray:
    """Indices sorting exponent rows into descending grevlex order."""
    exps = np.asarray(exps)
    if exps.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    n = exps.shape[1]
    deg = exps.sum(axis=1)
    # np.lexsort: last key is primary.  Degree descending, then ascending
    # exponent of x_{n-1}, then x_{n-2}, ...
    keys = [exps[:, k] for k in range(1, n)] + [-deg]
    return np.lexsort(keys)


def grevlex_key(e: Sequence[int]) -> tuple:
    """Sort key: larger key means larger monomial in grevlex."""
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True, order=False)
class Monomial:
    exponents: tuple

    def __post_init__(self):
        if any(x < 0 for x in self.exponents):
            raise ValueError("negative exponent")
        object.__setattr__(self, "exponents", tuple(int(x) for x in self.exponents))

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    def _key(self):
        return grevlex_key(self.exponents)

    def __lt__(self, other: "Monomial") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "Monomial") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "Monomial") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "Monomial") -> bool:
        return self._key() >= other._key()

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def divides(self, other: "Monomial") -> bool:
        return all(a <= b for a, b in zip(self.exponents, other.exponents))

    def lcm(self, other: "Monomial") -> "Monomial":
        return Monomial(tuple(max(a, b) for a, b in zip(self.exponents, other.exponents)))

    def __str__(self) -> str:
        return _monomial_str(self.exponents) or "1"


# ---------------------------------------------------------------------------
# rings and polynomials


@dataclass(frozen=True)
class PolyRing:
    """Ring descriptor F_p[x0, ..., x_{n-1}]."""

    p: int
    nvars: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not 1 <= self.nvars <= MAX_VARS:
            raise ValueError(f"number of variables must be in [1, {MAX_VARS}]")

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    def zero(self) -> "Polynomial":
        return Polynomial._raw(self, _EMPTY_EXPS(self.nvars), _EMPTY_COEFS)

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c: int) -> "Polynomial":
        c %= self.p
        if c == 0:
            return self.zero()
        return Polynomial._raw(self, np.zeros((1, self.nvars), dtype=np.int64), np.array([c], dtype=np.int64))

    def var(self, i: int) -> "Polynomial":
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        e = np.zeros((1, self.nvars), dtype=np.int64)
        e[0, i] = 1
        return Polynomial._raw(self, e, np.array([1], dtype=np.int64))

    def gens(self) -> list:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exponents: Sequence[int], coeff: int = 1) -> "Polynomial":
        return Polynomial.from_terms(self, {tuple(exponents): coeff})

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(self, text)

    def __str__(self) -> str:
        return f"ring p={self.p} n={self.nvars}"


def _EMPTY_EXPS(n: int) -> np.ndarray:
    return np.zeros((0, n), dtype=np.int64)


_EMPTY_COEFS = np.zeros(0, dtype=np.int64)


def _canonicalize(exps: np.ndarray, coefs: np.ndarray, p: int):
    """Sort descending grevlex, merge duplicates, drop zeros."""
    if exps.shape[0] == 0:
        return exps, coefs
    order = grevlex_argsort(exps)
    exps = exps[order]
    coefs = coefs[order]
    if exps.shape[0] > 1:
        diff = np.any(exps[1:] != exps[:-1], axis=1)
        starts = np.concatenate(([0], np.nonzero(diff)[0] + 1))
        if starts.shape[0] != exps.shape[0]:
            coefs = np.add.reduceat(coefs, starts)
            exps = exps[starts]
    coefs = coefs % p
    keep = coefs != 0
    if not keep.all():
        exps = exps[keep]
        coefs = coefs[keep]
    return np.ascontiguousarray(exps), np.ascontiguousarray(coefs)


class Polynomial:
    """Immutable sparse polynomial over F_p.

    ``exps`` is an (k, n) integer array and ``coefs`` a length-k array of
    nonzero residues; rows are strictly descending in grevlex.
    """

    __slots__ = ("ring", "exps", "coefs", "_hash")

    def __init__(self, ring: PolyRing, exps, coefs):
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, ring.nvars)
        coefs = np.asarray(coefs, dtype=np.int64).reshape(-1)
        if exps.shape[0] != coefs.shape[0]:
            raise ValueError("exponent and coefficient counts differ")
        if np.any(exps < 0):
            raise ValueError("negative exponent")
        exps, coefs = _canonicalize(exps, coefs, ring.p)
        self._set(ring, exps, coefs)

    def _set(self, ring, exps, coefs):
        exps.setflags(write=False)
        coefs.setflags(write=False)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "exps", exps)
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, ring, exps, coefs) -> "Polynomial":
        # trusted constructor: arrays already canonical
        obj = cls.__new__(cls)
        obj._set(ring, np.ascontiguousarray(exps, dtype=np.int64), np.ascontiguousarray(coefs, dtype=np.int64))
        return obj

    @classmethod
    def from_terms(cls, ring: PolyRing, terms: Mapping | Iterable) -> "Polynomial":
        """Build from ``{exponent_tuple: coeff}`` or ``[(coeff, exponents), ...]``."""
        if isinstance(terms, Mapping):
            items = [(c, e) for e, c in terms.items()]
        else:
            items = list(terms)
        if not items:
            return ring.zero()
        exps = np.array([list(e) for _, e in items], dtype=np.int64).reshape(-1, ring.nvars)
        coefs = np.array([int(c) % ring.p for c, _ in items], dtype=np.int64)
        return cls(ring, exps, coefs)

    @classmethod
    def from_dense(cls, ring: PolyRing, d: int, vec: np.ndarray) -> "Polynomial":
        """Homogeneous polynomial of degree ``d`` from a coefficient vector on the basis."""
        vec = np.asarray(vec, dtype=np.int64) % ring.p
        nz = np.nonzero(vec)[0]
        basis = monomial_basis(ring.nvars, d)
        return cls._raw(ring, basis[nz].copy(), vec[nz].copy())

    def to_dense(self, d: int | None = None) -> np.ndarray:
        """Coefficient vector on the degree-``d`` monomial basis (homogeneous only)."""
        if d is None:
            d = self.degree()
        if not self.is_zero() and not self.is_homogeneous():
            raise ValueError("dense form needs a homogeneous polynomial")
        out = np.zeros(num_monomials(self.ring.nvars, d), dtype=np.int64)
        if self.is_zero():
            return out
        if self.degree() != d:
            raise ValueError("degree mismatch")
        out[rank_monomials(self.exps, d)] = self.coefs
        return out

    # -- structure ---------------------------------------------------------

    def __len__(self) -> int:
        return int(self.coefs.shape[0])

    def is_zero(self) -> bool:
        return self.coefs.shape[0] == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self.is_zero():
            return -1
        return int(self.exps.sum(axis=1).max())

    def degrees(self) -> np.ndarray:
        return self.exps.sum(axis=1)

    def is_homogeneous(self) -> bool:
        if self.is_zero():
            return True
        dg = self.degrees()
        return bool(np.all(dg == dg[0]))

    def is_constant(self) -> bool:
        return self.is_zero() or (len(self) == 1 and self.degree() == 0)

    def constant_value(self) -> int:
        if self.is_zero():
            return 0
        if not self.is_constant():
            raise ValueError("not a constant")
        return int(self.coefs[0])

    @property
    def terms(self) -> list:
        """List of ``(coeff, Monomial)`` pairs, descending grevlex."""
        return [(int(c), Monomial(tuple(int(x) for x in e))) for c, e in zip(self.coefs, self.exps)]

    def term_dict(self) -> dict:
        return {tuple(int(x) for x in e): int(c) for c, e in zip(self.coefs, self.exps)}

    def lead_monomial(self) -> Monomial:
        if self.is_zero():
            raise ValueError("zero polynomial has no lead term")
        return Monomial(tuple(int(x) for x in self.exps[0]))

    def lead_coefficient(self) -> int:
        return 0 if self.is_zero() else int(self.coefs[0])

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        inv = pow(int(self.coefs[0]), self.ring.p - 2, self.ring.p)
        return Polynomial._raw(self.ring, self.exps, (self.coefs * inv) % self.ring.p)

    def homogeneous_components(self) -> dict:
        out = {}
        if self.is_zero():
            return out
        dg = self.degrees()
        for d in np.unique(dg):
            mask = dg == d
            out[int(d)] = Polynomial._raw(self.ring, self.exps[mask], self.coefs[mask])
        return out

    # -- arithmetic --------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Polynomial):
            raise TypeError("expected a Polynomial")
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def _coerce(self, other):
        if isinstance(other, (int, np.integer)):
            return self.ring.constant(int(other))
        self._check(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        return Polynomial(self.ring, np.vstack([self.exps, other.exps]), np.concatenate([self.coefs, other.coefs]))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, self.exps, (-self.coefs) % self.ring.p)

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: int) -> "Polynomial":
        c %= self.ring.p
        if c == 0:
            return self.ring.zero()
        return Polynomial._raw(self.ring, self.exps, (self.coefs * c) % self.ring.p)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(int(other))
        self._check(other)
        if self.is_zero() or other.is_zero():
            return self.ring.zero()
        if len(self) == 1 and not self.exps[0].any():
            return other.scale(int(self.coefs[0]))
        if len(other) == 1 and not other.exps[0].any():
            return self.scale(int(other.coefs[0]))
        return _multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, e: Sequence[int], c: int = 1) -> "Polynomial":
        e = np.asarray(e, dtype=np.int64)
        c %= self.ring.p
        if c == 0 or self.is_zero():
            return self.ring.zero()
        return Polynomial._raw(self.ring, self.exps + e, (self.coefs * c) % self.ring.p)

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.ring.constant(int(other))
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.coefs.shape == other.coefs.shape
            and np.array_equal(self.coefs, other.coefs)
            and np.array_equal(self.exps, other.exps)
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.ring, self.exps.tobytes(), self.coefs.tobytes()))
            object.__setattr__(self, "_hash", h)
        return h

    def derivative(self, i: int) -> "Polynomial":
        return partial_derivative(self, i)

    def evaluate(self, point: Sequence[int]) -> int:
        p = self.ring.p
        total = 0
        for c, e in zip(self.coefs, self.exps):
            t = int(c)
            for x, k in zip(point, e):
                if k:
                    t = t * pow(int(x), int(k), p) % p
            total += t
        return total % p

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def _multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    ring = f.ring
    p = ring.p
    a, b = len(f), len(g)
    if f.is_homogeneous() and g.is_homogeneous():
        d = f.degree() + g.degree()
        exps = (f.exps[:, None, :] + g.exps[None, :, :]).reshape(a * b, ring.nvars)
        coefs = ((f.coefs[:, None] * g.coefs[None, :]) % p).reshape(a * b)
        ranks = rank_monomials(exps, d)
        size = num_monomials(ring.nvars, d)
        if a * b > size // 4:
            acc = np.zeros(size, dtype=np.int64)
            np.add.at(acc, ranks, coefs)
            return Polynomial.from_dense(ring, d, acc)
        uniq, inv = np.unique(ranks, return_inverse=True)
        acc = np.zeros(uniq.shape[0], dtype=np.int64)
        np.add.at(acc, inv, coefs)
        acc %= p
        keep = acc != 0
        basis = monomial_basis(ring.nvars, d)
        return Polynomial._raw(ring, basis[uniq[keep]].copy(), acc[keep])
    exps = (f.exps[:, None, :] + g.exps[None, :, :]).reshape(a * b, ring.nvars)
    coefs = ((f.coefs[:, None] * g.coefs[None, :]) % p).reshape(a * b)
    return Polynomial(ring, exps, coefs)


def poly_arith(f: Polynomial, g: Polynomial, kind: str) -> Polynomial:
    """``kind`` is ``"add"`` or ``"mul"``; operands must share a ring."""
    if f.ring != g.ring:
        raise RingMismatchError(f"{f.ring} vs {g.ring}")
    if kind == "add":
        return f + g
    if kind == "mul":
        return f * g
    raise ValueError(f"unknown operation {kind!r}")


def partial_derivative(f: Polynomial, i: int) -> Polynomial:
    if not 0 <= i < f.ring.nvars:
        raise IndexError(f"variable index {i} out of range for {f.ring.nvars} variables")
    mask = f.exps[:, i] > 0
    if not mask.any():
        return f.ring.zero()
    exps = f.exps[mask].copy()
    coefs = (f.coefs[mask] * (exps[:, i] % f.ring.p)) % f.ring.p
    exps[:, i] -= 1
    keep = coefs != 0
    return Polynomial(f.ring, exps[keep], coefs[keep])


def linear_substitution(f: Polynomial, forms: Sequence[Polynomial]) -> Polynomial:
    """Replace ``x_i`` by ``forms[i]`` in ``f``."""
    ring = f.ring
    if len(forms) != ring.nvars:
        raise ValueError("need one form per variable")
    powers: dict = {}

    def power(i, k):
        if (i, k) not in powers:
            powers[(i, k)] = forms[i] ** k
        return powers[(i, k)]

    out = ring.zero()
    for c, e in zip(f.coefs, f.exps):
        term = ring.constant(int(c))
        for i, k in enumerate(e):
            if k:
                term = term * power(i, int(k))
        out = out + term
    return out


def jacobian(gens: Sequence[Polynomial]) -> list:
    """``nvars x s`` nested list with entry (i, j) = d gens[j] / d x_i."""
    gens = list(gens)
    if not gens:
        raise ValueError("empty generator list")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise RingMismatchError("generators live in different rings")
    return [[partial_derivative(g, i) for g in gens] for i in range(ring.nvars)]


# ---------------------------------------------------------------------------
# text form


def _monomial_str(e) -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"x{i}")
        elif k > 1:
            parts.append(f"x{i}^{int(k)}")
    return "*".join(parts)


def format_polynomial(f: Polynomial) -> str:
    """Canonical text: descending grevlex, explicit coefficients in [0, p)."""
    if f.is_zero():
        return "0"
    out = []
    for c, e in zip(f.coefs, f.exps):
        m = _monomial_str(e)
        out.append(f"{int(c)}*{m}" if m else f"{int(c)}")
    return "+".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(\^)|(\*)|([+-])|(\()|(\)))")


def parse_polynomial(ring: PolyRing, text: str) -> Polynomial:
    """Parse sums of products of integers, variables ``x<i>`` and powers.

    Accepts the canonical form and ordinary hand-written input such as
    ``x0^2 - 3*x1*x2 + (x0+x1)^2``.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at column {pos + 1}: {text[pos:pos + 10]!r}")
        pos = m.end()
        num, var, caret, star, sign, lp, rp = m.groups()
        if num is not None:
            tokens.append(("num", int(num), m.start(1)))
        elif var is not None:
            idx = int(var)
            if idx >= ring.nvars:
                raise ValueError(f"variable x{idx} out of range at column {m.start(2)}")
            tokens.append(("var", idx, m.start(2)))
        elif caret:
            tokens.append(("^", None, m.start(3)))
        elif star:
            tokens.append(("*", None, m.start(4)))
        elif sign:
            tokens.append((sign, None, m.start(5)))
        elif lp:
            tokens.append(("(", None, m.start(6)))
        else:
            tokens.append((")", None, m.start(7)))
    parser = _Parser(ring, tokens)
    result = parser.expr()
    if parser.i != len(tokens):
        raise ValueError(f"unexpected token at column {tokens[parser.i][2] + 1}")
    return result


class _Parser:
    def __init__(self, ring, tokens):
        self.ring = ring
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expr(self):
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek() in ("+", "-"):
            sign = -1 if self.take()[0] == "-" else 1
            acc = acc + self.term().scale(sign)
        return acc

    def term(self):
        acc = self.factor()
        while self.peek() == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            if self.peek() != "num":
                col = self.tokens[self.i][2] + 1 if self.i < len(self.tokens) else "end"
                raise ValueError(f"expected exponent at column {col}")
            base = base ** self.take()[1]
        return base

    def atom(self):
        kind = self.peek()
        if kind == "num":
            return self.ring.constant(self.take()[1])
        if kind == "var":
            return self.ring.var(self.take()[1])
        if kind == "(":
            self.take()
            inner = self.expr()
            if self.peek() != ")":
                raise ValueError("unbalanced parenthesis")
            self.take()
            return inner
        col = self.tokens[self.i][2] + 1 if self.i < len(self.tokens) else "end"
        raise ValueError(f"unexpected token at column {col}")
