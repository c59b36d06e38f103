"""Graded matrices, complexes, minimal free resolutions and derived invariants.

Conventions
-----------
A ``GradedMatrix`` with source twists ``u`` and target twists ``t`` is a map
``⊕ S(u_j) -> ⊕ S(t_i)``; entry (i, j) is homogeneous of degree ``t_i - u_j``.
The degree-``j`` piece of ``S(u)`` is ``S_{j+u}``.  A free module generated in
degree ``a`` is ``S(-a)``.

Resolutions are computed one internal degree at a time with dense linear
algebra over F_p.  At homological step k the kernel of ``d_k`` in degree j
has a dimension known in advance from the Hilbert series, so degrees where
the submodule generated by lower-degree syzygies already fills the kernel
need no kernel computation at all.  Degrees that can carry new generators
are bounded by the Eliahou-Kervaire numbers of a strongly stable initial
ideal (Betti numbers only drop under Gröbner degeneration).
"""

from __future__ import annotations

import json
import logging
import math
import weakref
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .gb import Ideal, minimal_generators
from .hilbert import hilbert_series_numerator
from .linalg import rank, rref, row_basis, solve_in_span, sparse_kernel, sparse_rank
from .ring import (
    PolyRing,
    Polynomial,
    RingMismatchError,
    linear_substitution,
    monomial_basis,
    num_monomials,
    partial_derivative,
    rank_monomials,
)

__all__ = [
    "GradedMatrix",
    "ChainComplex",
    "ComplexReport",
    "BettiTable",
    "degree_piece",
    "syzygy_matrix",
    "minimal_free_resolution",
    "betti_table",
    "regularity",
    "ext_graded_dim",
    "sheaf_cohomology_dim",
    "t1_degree0",
]

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# graded matrices


class GradedMatrix:
    """Matrix of homogeneous polynomials between twisted free modules.

    Parameters
    ----------
    ring : PolyRing
    entries : nested sequence of Polynomial, shape (len(target), len(source))
    source, target : sequence of int
        Twists ``u_j`` of the source and ``t_i`` of the target.
    check : bool
        Raise ``ValueError`` if some entry has the wrong degree.
    """

    __slots__ = ("ring", "entries", "source", "target")

    def __init__(self, ring: PolyRing, entries, source: Sequence[int], target: Sequence[int],
                 check: bool = True):
        rows = tuple(tuple(r) for r in entries)
        source, target = tuple(int(u) for u in source), tuple(int(t) for t in target)
        if len(rows) != len(target):
            raise ValueError(f"{len(rows)} rows but {len(target)} target twists")
        for r in rows:
            if len(r) != len(source):
                raise ValueError(f"row of length {len(r)} but {len(source)} source twists")
            for f in r:
                if f.ring != ring:
                    raise RingMismatchError("entry from a different ring")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        if check:
            bad = self.violations()
            if bad:
                i, j, want, got = bad[0]
                raise ValueError(f"entry ({i},{j}) should have degree {want}, got {got}")

    def __setattr__(self, name, value):
        raise AttributeError("GradedMatrix is immutable")

    @classmethod
    def zero(cls, ring: PolyRing, source: Sequence[int], target: Sequence[int]) -> "GradedMatrix":
        z = ring.zero()
        return cls(ring, [[z] * len(source) for _ in target], source, target, check=False)

    @classmethod
    def identity(cls, ring: PolyRing, twists: Sequence[int]) -> "GradedMatrix":
        n = len(twists)
        rows = [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]
        return cls(ring, rows, twists, twists, check=False)

    @classmethod
    def from_columns(cls, ring: PolyRing, columns: Sequence[Sequence[Polynomial]],
                     source: Sequence[int], target: Sequence[int], check: bool = True) -> "GradedMatrix":
        rows = [[columns[j][i] for j in range(len(columns))] for i in range(len(target))]
        return cls(ring, rows, source, target, check)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.target), len(self.source)

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> list:
        return [row[j] for row in self.entries]

    def entry_degree(self, i: int, j: int) -> int:
        return self.target[i] - self.source[j]

    def violations(self) -> list:
        """Entries that are nonzero but not homogeneous of the twist-forced degree."""
        out = []
        for i, row in enumerate(self.entries):
            for j, f in enumerate(row):
                if f.is_zero():
                    continue
                want = self.target[i] - self.source[j]
                if not f.is_homogeneous() or f.degree() != want:
                    got = f.degree() if f.is_homogeneous() else "inhomogeneous"
                    out.append((i, j, want, got))
        return out

    def is_homogeneous(self) -> bool:
        return not self.violations()

    def is_zero(self) -> bool:
        return all(f.is_zero() for row in self.entries for f in row)

    def has_units(self) -> bool:
        """True if some entry is a nonzero constant."""
        return any(not f.is_zero() and f.degree() == 0 for row in self.entries for f in row)

    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        if self.source != other.target:
            raise ValueError("twists do not match for composition")
        ring = self.ring
        rows = []
        for i in range(len(self.target)):
            row = []
            for j in range(len(other.source)):
                acc = ring.zero()
                for k in range(len(self.source)):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            rows.append(row)
        return GradedMatrix(ring, rows, other.source, self.target, check=False)

    def dual(self, shift: int = 0) -> "GradedMatrix":
        """``Hom(-, S(shift))``: the transpose with twists ``shift - t`` -> ``shift - u``."""
        rows = [list(col) for col in zip(*self.entries)] if self.entries else []
        if not self.entries:
            rows = [[] for _ in self.source]
        return GradedMatrix(self.ring, rows, [shift - t for t in self.target],
                            [shift - u for u in self.source], check=False)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "GradedMatrix":
        rows = range(len(self.target)) if rows is None else rows
        cols = range(len(self.source)) if cols is None else cols
        return GradedMatrix(self.ring, [[self.entries[i][j] for j in cols] for i in rows],
                            [self.source[j] for j in cols], [self.target[i] for i in rows], check=False)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMatrix) and self.source == other.source
                and self.target == other.target and self.entries == other.entries)

    def __hash__(self):
        return hash((self.source, self.target, self.entries))

    def __repr__(self) -> str:
        return f"GradedMatrix({len(self.target)}x{len(self.source)}, source={self.source}, target={self.target})"

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(f) for f in row) + "]" for row in self.entries)


def hstack(mats: Sequence[GradedMatrix]) -> GradedMatrix:
    """Juxtapose matrices sharing a target."""
    first = mats[0]
    for M in mats[1:]:
        if M.target != first.target:
            raise ValueError("targets differ")
    rows = [sum((list(M.entries[i]) for M in mats), []) for i in range(len(first.target))]
    return GradedMatrix(first.ring, rows, sum((list(M.source) for M in mats), []), first.target, check=False)


def vstack(mats: Sequence[GradedMatrix]) -> GradedMatrix:
    """Stack matrices sharing a source."""
    first = mats[0]
    for M in mats[1:]:
        if M.source != first.source:
            raise ValueError("sources differ")
    rows = [list(r) for M in mats for r in M.entries]
    return GradedMatrix(first.ring, rows, first.source, sum((list(M.target) for M in mats), []), check=False)


# ---------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class ComplexReport:
    compositions_zero: bool
    homogeneous: bool
    message: str

    @property
    def ok(self) -> bool:
        return self.compositions_zero and self.homogeneous


class ChainComplex:
    """``F_0 <-d_1- F_1 <-d_2- ... <-d_len- F_len`` with matching twists."""

    def __init__(self, maps: Iterable[GradedMatrix]):
        maps = tuple(maps)
        for k in range(len(maps) - 1):
            if maps[k].source != maps[k + 1].target:
                raise ValueError(f"d_{k + 1} and d_{k + 2} do not share a module")
        self.maps = maps

    @property
    def length(self) -> int:
        return len(self.maps)

    @property
    def ring(self) -> PolyRing:
        return self.maps[0].ring

    def twists(self, i: int) -> tuple:
        """Twists of F_i."""
        if i == 0:
            return self.maps[0].target
        return self.maps[i - 1].source

    def ranks(self) -> list[int]:
        return [len(self.twists(i)) for i in range(self.length + 1)]

    def __getitem__(self, k: int) -> GradedMatrix:
        """The differential d_k (1-based)."""
        return self.maps[k - 1]

    def verify(self) -> ComplexReport:
        """Check homogeneity of every map and that consecutive compositions vanish."""
        for k, M in enumerate(self.maps, start=1):
            bad = M.violations()
            if bad:
                i, j, want, got = bad[0]
                return ComplexReport(True, False, f"d{k} entry ({i},{j}): degree {got}, expected {want}")
        for k in range(1, self.length):
            prod = self.maps[k - 1] @ self.maps[k]
            for i, row in enumerate(prod.entries):
                for j, f in enumerate(row):
                    if not f.is_zero():
                        return ComplexReport(False, True, f"d{k}*d{k + 1} entry ({i},{j}) is nonzero")
        return ComplexReport(True, True, "ok")


# ---------------------------------------------------------------------------
# Betti tables


class BettiTable:
    """Graded Betti numbers ``beta[i, j]``; zero entries are not stored."""

    def __init__(self, data: dict | None = None):
        self._data = {(int(i), int(j)): int(c) for (i, j), c in (data or {}).items() if c}
        for c in self._data.values():
            if c < 0:
                raise ValueError("Betti numbers are non-negative")

    def __getitem__(self, ij) -> int:
        return self._data.get((int(ij[0]), int(ij[1])), 0)

    def items(self):
        return sorted(self._data.items())

    def __eq__(self, other) -> bool:
        return isinstance(other, BettiTable) and self._data == other._data

    def __repr__(self) -> str:
        return f"BettiTable({dict(self.items())})"

    @property
    def length(self) -> int:
        return max((i for i, _ in self._data), default=0)

    def column_sums(self) -> list[int]:
        sums = [0] * (self.length + 1)
        for (i, _), c in self._data.items():
            sums[i] += c
        return sums

    def regularity(self) -> int:
        return max(j - i for (i, j) in self._data)

    def row(self, r: int) -> list[int]:
        return [self[i, i + r] for i in range(self.length + 1)]

    def min_generator_degree(self) -> int:
        degs = [j for (i, j) in self._data if i == 1]
        if not degs:
            raise ValueError("table has no first column")
        return min(degs)

    def to_json(self) -> str:
        obj = {f"{i},{j}": c for (i, j), c in self._data.items()}
        return json.dumps(dict(sorted(obj.items())), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BettiTable":
        obj = json.loads(text)
        data = {}
        for key, c in obj.items():
            i, j = key.split(",")
            data[(int(i), int(j))] = int(c)
        return cls(data)

    @classmethod
    def from_rows(cls, rows: dict) -> "BettiTable":
        """Build from Macaulay2-style rows: ``{r: [beta_{0,r}, beta_{1,1+r}, ...]}``.

        Rows may also be strings such as ``". 5 5"`` with ``.`` or ``-`` for zero.
        """
        data = {}
        for r, vals in rows.items():
            if isinstance(vals, str):
                vals = [0 if v in ".-" else int(v) for v in vals.split()]
            for i, c in enumerate(vals):
                if c:
                    data[(i, i + int(r))] = int(c)
        return cls(data)

    def pretty(self) -> str:
        """Macaulay2 layout: row r, column i holds beta_{i, i+r}."""
        if not self._data:
            return "(empty)"
        L = self.length
        rows = sorted({j - i for (i, j) in self._data})
        cells = [[str(i) for i in range(L + 1)], [str(s) for s in self.column_sums()]]
        for r in range(rows[0], rows[-1] + 1):
            cells.append([str(self[i, i + r]) if self[i, i + r] else "." for i in range(L + 1)])
        width = [max(len(c[i]) for c in cells) for i in range(L + 1)]
        labels = [""] + ["total:"] + [f"{r}:" for r in range(rows[0], rows[-1] + 1)]
        lw = max(len(s) for s in labels)
        lines = []
        for lab, c in zip(labels, cells):
            lines.append(lab.rjust(lw) + " " + " ".join(x.rjust(w) for x, w in zip(c, width)))
        return "\n".join(lines)

    @classmethod
    def parse(cls, text: str) -> "BettiTable":
        """Read either the JSON form or the ``pretty`` layout."""
        s = text.strip()
        if s.startswith("{"):
            return cls.from_json(s)
        rows = {}
        for line in s.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line or line.startswith("total") or ":" not in line:
                continue
            head, _, rest = line.partition(":")
            rows[int(head)] = rest
        if not rows:
            raise ValueError("no Betti rows found")
        return cls.from_rows(rows)


def betti_table(C: ChainComplex) -> BettiTable:
    """Betti numbers of a minimal complex: beta_{i,j} counts twists -j in F_i.

    Raises
    ------
    ValueError
        If some differential has a unit entry (the complex is not minimal).
    """
    for k, M in enumerate(C.maps, start=1):
        if M.has_units():
            raise ValueError(f"complex is not minimal: d{k} has a unit entry")
    data: dict = {}
    for i in range(C.length + 1):
        for u in C.twists(i):
            data[(i, -u)] = data.get((i, -u), 0) + 1
    return BettiTable(data)


def regularity(B: BettiTable) -> int:
    return B.regularity()


# ---------------------------------------------------------------------------
# degree pieces


def _block_sizes(n: int, twists: Sequence[int], j: int) -> np.ndarray:
    return np.array([num_monomials(n, j + t) for t in twists], dtype=np.int64)


def degree_piece(M: GradedMatrix, j: int) -> sp.csr_matrix:
    """Matrix of ``M`` in internal degree ``j`` on monomial bases.

    Rows index ``⊕ S_{j + t_i}``, columns ``⊕ S_{j + u_c}``, blocks in order.
    """
    n = M.ring.nvars
    p = M.ring.p
    rsz = _block_sizes(n, M.target, j)
    csz = _block_sizes(n, M.source, j)
    roff = np.concatenate(([0], np.cumsum(rsz)))
    coff = np.concatenate(([0], np.cumsum(csz)))
    R, C, V = [], [], []
    for c, u in enumerate(M.source):
        if csz[c] == 0:
            continue
        basis = monomial_basis(n, j + u)
        for i, t in enumerate(M.target):
            f = M.entries[i][c]
            if f.is_zero() or rsz[i] == 0:
                continue
            prods = (basis[:, None, :] + f.exps[None, :, :]).reshape(-1, n)
            R.append(roff[i] + rank_monomials(prods, j + t))
            C.append(coff[c] + np.repeat(np.arange(basis.shape[0]), f.exps.shape[0]))
            V.append(np.tile(f.coefs, basis.shape[0]))
    shape = (int(roff[-1]), int(coff[-1]))
    if not R:
        return sp.csr_matrix(shape, dtype=np.int64)
    data = np.concatenate(V) % p
    return sp.csr_matrix((data, (np.concatenate(R), np.concatenate(C))), shape=shape, dtype=np.int64)


def _vector_to_column(ring: PolyRing, vec: np.ndarray, twists: Sequence[int], j: int) -> list:
    n = ring.nvars
    out, pos = [], 0
    for t in twists:
        size = num_monomials(n, j + t)
        out.append(Polynomial.from_dense(ring, j + t, vec[pos:pos + size]) if size else ring.zero())
        pos += size
    return out


# ---------------------------------------------------------------------------
# syzygies, one degree at a time


def _new_kernel_generators(d: GradedMatrix, degrees: Iterable[int],
                           expected: Callable[[int], int] | None = None,
                           seed: int = 0) -> GradedMatrix:
    """Minimal generators of ker(d) found in the given internal degrees."""
    ring, p = d.ring, d.ring.p
    cols: list = []
    src: list[int] = []
    for j in sorted(set(degrees)):
        dimF = int(_block_sizes(ring.nvars, d.source, j).sum())
        if dimF == 0:
            continue
        want = expected(j) if expected is not None else None
        if want == 0:
            continue
        if src:
            G = GradedMatrix.from_columns(ring, cols, src, d.source, check=False)
            basis, piv = row_basis(degree_piece(G, j).T, p, seed)
        else:
            basis, piv = np.zeros((0, dimF), dtype=np.int64), np.zeros(0, dtype=np.int64)
        if want is not None and basis.shape[0] >= want:
            continue
        K = sparse_kernel(degree_piece(d, j), p, seed)
        if want is not None and K.shape[0] != want:
            raise ArithmeticError(f"kernel in degree {j} has dimension {K.shape[0]}, expected {want}")
        rest = solve_in_span(basis, piv, K, p) if basis.shape[0] else K
        R, rpiv = rref(rest, p)
        fresh = R[: rpiv.shape[0]]
        if fresh.shape[0]:
            log.info("degree %d: %d new syzygies", j, fresh.shape[0])
        for v in fresh:
            cols.append(_vector_to_column(ring, v, d.source, j))
            src.append(-j)
    return GradedMatrix.from_columns(ring, cols, src, d.source, check=False) if cols else \
        GradedMatrix.zero(ring, [], d.source)


def _module_gb_bound(M: GradedMatrix) -> int:
    """Upper bound for the generator degrees of ker(M) from a module Gröbner basis.

    Position-over-term order.  By Schreyer's theorem the syzygies of a
    Gröbner basis are generated by its S-pair syzygies, so ker(M) is
    generated in degrees at most max(pair lcm degree, column degree).
    """
    ring = M.ring

    def lead(v):
        for i, f in enumerate(v):
            if not f.is_zero():
                return i, tuple(int(x) for x in f.exps[0]), int(f.coefs[0])
        return None

    def mdeg(v):
        for i, f in enumerate(v):
            if not f.is_zero():
                return f.degree() - M.target[i]
        return None

    def top_reduce(v, basis):
        v = list(v)
        while True:
            ld = lead(v)
            if ld is None:
                return None
            i, e, c = ld
            for g in basis:
                gi, ge, gc = lead(g)
                if gi == i and all(a <= b for a, b in zip(ge, e)):
                    q = tuple(b - a for a, b in zip(ge, e))
                    f = (c * pow(gc, ring.p - 2, ring.p)) % ring.p
                    v = [a - b.mul_monomial(q, f) for a, b in zip(v, g)]
                    break
            else:
                return v

    cols = [M.column(j) for j in range(len(M.source))]
    basis: list = []
    pending = sorted((mdeg(c), k) for k, c in enumerate(cols) if mdeg(c) is not None)
    queue: list = [(deg, ("col", k)) for deg, k in pending]
    pairs_done = set()
    bound = max((-u for u in M.source), default=0)
    while queue:
        queue.sort(key=lambda t: t[0])
        deg, item = queue.pop(0)
        if item[0] == "col":
            v = cols[item[1]]
        else:
            a, b = item[1], item[2]
            ga, gb = basis[a], basis[b]
            ia, ea, ca = lead(ga)
            _, eb, cb = lead(gb)
            L = tuple(max(x, y) for x, y in zip(ea, eb))
            qa = tuple(l - x for l, x in zip(L, ea))
            qb = tuple(l - x for l, x in zip(L, eb))
            inv_a, inv_b = pow(ca, ring.p - 2, ring.p), pow(cb, ring.p - 2, ring.p)
            v = [x.mul_monomial(qa, inv_a) - y.mul_monomial(qb, inv_b) for x, y in zip(ga, gb)]
        v = top_reduce(v, basis)
        if v is None:
            continue
        basis.append(v)
        h = len(basis) - 1
        ih, eh, _ = lead(v)
        for k in range(h):
            ik, ek, _ = lead(basis[k])
            if ik != ih or (k, h) in pairs_done:
                continue
            pairs_done.add((k, h))
            L = [max(x, y) for x, y in zip(ek, eh)]
            pdeg = sum(L) - M.target[ih]
            bound = max(bound, pdeg)
            queue.append((pdeg, ("pair", k, h)))
    return bound


def syzygy_matrix(M: GradedMatrix, seed: int = 0) -> GradedMatrix:
    """Minimal homogeneous generators of ker(M) as the columns of a matrix.

    The result ``Z`` satisfies ``M @ Z == 0``; its source twists record the
    generator degrees (a column of degree a has twist -a).
    """
    if not M.is_homogeneous():
        raise ValueError("syzygies need a homogeneous matrix")
    if not M.source:
        return GradedMatrix.zero(M.ring, [], M.source)
    lo = min(-u for u in M.source)
    hi = _module_gb_bound(M)
    return _new_kernel_generators(M, range(lo, hi + 1), None, seed)


# ---------------------------------------------------------------------------
# minimal free resolutions of cyclic modules S/I


def _minimalize_monomials(G: np.ndarray) -> np.ndarray:
    from .hilbert import _minimalize
    return _minimalize(G)


def _is_strongly_stable(G: np.ndarray) -> bool:
    """Strong stability for grevlex with x0 > x1 > ...: moves towards x0 stay inside."""
    G = _minimalize_monomials(G)
    for u in G:
        for i in np.nonzero(u)[0]:
            for k in range(i):
                v = u.copy()
                v[i] -= 1
                v[k] += 1
                if not np.any(np.all(G <= v, axis=1)):
                    return False
    return True


def eliahou_kervaire(G: np.ndarray) -> BettiTable:
    """Betti numbers of S/J for a strongly stable monomial ideal J with minimal generators G."""
    G = _minimalize_monomials(np.asarray(G, dtype=np.int64))
    data = {(0, 0): 1}
    for u in G:
        deg = int(u.sum())
        m0 = int(np.nonzero(u)[0].max())
        for k in range(1, m0 + 2):
            c = math.comb(m0, k - 1)
            if c:
                data[(k, deg + k - 1)] = data.get((k, deg + k - 1), 0) + c
    return BettiTable(data)


def _random_coordinates(ring: PolyRing, rng: np.random.Generator) -> list:
    from .linalg import rank as _rank
    while True:
        A = rng.integers(0, ring.p, size=(ring.nvars, ring.nvars))
        if _rank(A, ring.p) == ring.nvars:
            return [Polynomial.from_dense(ring, 1, A[i]) for i in range(ring.nvars)]


def betti_upper_bound(I: Ideal, seed: int = 0, attempts: int = 4) -> BettiTable | None:
    """Eliahou-Kervaire numbers of a strongly stable initial ideal of I, if one is found.

    The original coordinates are tried first, then random linear changes of
    coordinates (which do not change Betti numbers).
    """
    G = I.lead_exponents()
    if _is_strongly_stable(G):
        return eliahou_kervaire(G)
    rng = np.random.default_rng(seed)
    gens, _ = minimal_generators(I)
    for _ in range(attempts):
        forms = _random_coordinates(I.ring, rng)
        J = Ideal([linear_substitution(g, forms) for g in gens], I.ring)
        G = J.lead_exponents()
        if _is_strongly_stable(G):
            return eliahou_kervaire(G)
    return None


def _taylor_degrees(I: Ideal, k: int) -> list[int]:
    # fallback: beta_{k,j}(S/in I) vanishes unless j is the degree of an lcm of k generators
    G = _minimalize_monomials(I.lead_exponents())
    lo = int(G.sum(axis=1).min()) + k - 1
    hi = int(np.sort(G.sum(axis=1))[::-1][:k].sum())
    return list(range(lo, hi + 1))


class _HF:
    """Hilbert function of S/I from its series numerator, with binomial caching."""

    def __init__(self, I: Ideal):
        self.N = hilbert_series_numerator(I)
        self.n = I.ring.nvars

    def free(self, j: int) -> int:
        return math.comb(j + self.n - 1, self.n - 1) if j >= 0 else 0

    def quotient(self, j: int) -> int:
        return sum(c * self.free(j - k) for k, c in enumerate(self.N))


_RESOLUTIONS: "weakref.WeakKeyDictionary[Ideal, ChainComplex]" = weakref.WeakKeyDictionary()


def minimal_free_resolution(I: Ideal, max_length: int | None = None, seed: int = 0) -> ChainComplex:
    """Minimal graded free resolution of S/I.

    Parameters
    ----------
    I : Ideal
        Homogeneous, nonzero and proper.
    max_length : int, optional
        Stop after this many differentials.
    seed : int
        Seeds the random coordinate changes and the sketches used on large
        degree pieces; the output does not depend on it.

    Returns
    -------
    ChainComplex
        ``S <- F_1 <- F_2 <- ...`` with no unit entries.
    """
    full = max_length is None
    if full and I in _RESOLUTIONS:
        return _RESOLUTIONS[I]
    ring = I.ring
    n = ring.nvars
    if I.is_zero():
        raise ValueError("the zero ideal has a trivial resolution")
    if I.is_unit():
        raise ValueError("S/I is zero")
    gens, _ = minimal_generators(I)
    gens = sorted(gens, key=lambda g: g.degree())
    d1 = GradedMatrix(ring, [gens], [-g.degree() for g in gens], [0])
    maps = [d1]
    hf = _HF(I)
    bound = betti_upper_bound(I, seed)
    if bound is None:
        log.warning("no strongly stable initial ideal found; using lcm degree bounds")
    limit = n if max_length is None else max_length

    # ker_dim[k](j) = dim (ker d_k)_j, from exactness
    def kernel_dim(k: int, j: int) -> int:
        if k == 0:
            return hf.free(j) - hf.quotient(j)
        Fk = sum(hf.free(j + u) for u in maps[k - 1].source)
        return Fk - kernel_dim(k - 1, j)

    while len(maps) < limit:
        k = len(maps)
        d = maps[-1]
        if bound is not None:
            degrees = [j for (i, j), _ in bound.items() if i == k + 1]
        else:
            degrees = _taylor_degrees(I, k + 1)
        lo = min(-u for u in d.source) + 1
        degrees = [j for j in degrees if j >= lo]
        if not degrees:
            break
        log.info("resolution step %d: degrees %s", k + 1, degrees)
        nxt = _new_kernel_generators(d, degrees, lambda j, k=k: kernel_dim(k, j), seed)
        if not nxt.source:
            break
        maps.append(nxt)
    C = ChainComplex(maps)
    if full:
        _RESOLUTIONS[I] = C
    return C


# ---------------------------------------------------------------------------
# Ext and sheaf cohomology


def ext_graded_dim(R: ChainComplex, j: int, d: int, seed: int = 0) -> int:
    """dim_k Ext^j(S/I, S)_d from a free resolution R of S/I.

    Ext^j is zero for j beyond the length of R.
    """
    if j < 0:
        raise ValueError("cohomological index must be non-negative")
    if j > R.length:
        return 0
    n = R.ring.nvars
    # (F_j)^* = ⊕ S(-u) for F_j = ⊕ S(u)
    dimF = sum(num_monomials(n, d - u) for u in R.twists(j))
    if dimF == 0:
        return 0
    r_out = sparse_rank(degree_piece(R[j + 1].dual(), d), R.ring.p, seed) if j < R.length else 0
    r_in = sparse_rank(degree_piece(R[j].dual(), d), R.ring.p, seed) if j > 0 else 0
    return dimF - r_out - r_in


def sheaf_cohomology_dim(I: Ideal, kind: str, i: int, m: int, resolution: ChainComplex | None = None) -> int:
    """Cohomology of O_X(m) or of the ideal sheaf via graded local duality.

    ``kind="structure"``: h^i(O_X(m)) = dim Ext^{n-1-i}(S/I, S)_{-m-n} for i >= 1.
    ``kind="ideal"``: h^1(I~(m)) = dim Ext^{n-1}(S/I, S)_{-m-n} (only i = 1).
    Here n is the number of variables.
    """
    n = I.ring.nvars
    if kind == "structure":
        if i < 1 or i > n - 1:
            raise ValueError(f"unsupported cohomological degree {i} for the structure sheaf")
        idx = n - 1 - i
    elif kind == "ideal":
        if i != 1:
            raise ValueError("only H^1 of the ideal sheaf is supported")
        idx = n - 1
    else:
        raise ValueError(f"unknown sheaf kind {kind!r}")
    R = resolution if resolution is not None else minimal_free_resolution(I)
    return ext_graded_dim(R, idx, -m - n)


# ---------------------------------------------------------------------------
# first-order deformations: dim T^1 in degree 0


def _normal_form_matrix(I: Ideal, e: int) -> tuple[np.ndarray, np.ndarray]:
    """(NF, std): NF[i] = coordinates of the normal form of monomial i of degree e
    on the standard monomials std (indices into the degree-e basis)."""
    eng = I._full_run().eng
    table = eng.table(e)
    std = np.nonzero(table < 0)[0]
    N = table.shape[0]
    NF = np.zeros((N, std.shape[0]), dtype=np.int64)
    where = {int(s): k for k, s in enumerate(std)}
    for i in range(N):
        if table[i] < 0:
            NF[i, where[i]] = 1
            continue
        vec = np.zeros(N, dtype=np.int64)
        vec[i] = 1
        eng.reduce(vec, e, i)
        NF[i] = vec[std]
    return NF, std


def _poly_dense_columns(polys: Sequence[Polynomial], e: int) -> np.ndarray:
    n = polys[0].ring.nvars if polys else 0
    out = np.zeros((num_monomials(n, e), len(polys)), dtype=np.int64)
    for k, f in enumerate(polys):
        if not f.is_zero():
            out[rank_monomials(f.exps, e), k] = f.coefs
    return out


def _t1_normal_form(gens, syz: GradedMatrix, I: Ideal, seed: int) -> int:
    ring, p, n = I.ring, I.ring.p, I.ring.nvars
    degs = [g.degree() for g in gens]
    nf_cache: dict = {}

    def nf(e):
        if e not in nf_cache:
            nf_cache[e] = _normal_form_matrix(I, e)
        return nf_cache[e]

    # unknowns: phi_j in R_{d_j}, coordinates on standard monomials
    unknowns = []
    for j, dj in enumerate(degs):
        _, std = nf(dj)
        basis = monomial_basis(n, dj)
        for s in std:
            unknowns.append((j, basis[s]))
    U = len(unknowns)
    blocks = []
    for l in range(len(syz.source)):
        e = -syz.source[l]
        NF, _ = nf(e)
        prods = []
        for j, mono in unknowns:
            s = syz.entries[j][l]
            prods.append(s.mul_monomial(mono) if not s.is_zero() else ring.zero())
        P = _poly_dense_columns(prods, e)
        blocks.append((NF.T @ P) % p)
    A = np.vstack(blocks) if blocks else np.zeros((0, U), dtype=np.int64)
    ker = U - sparse_rank(sp.csr_matrix(A), p, seed)
    # image of the derivations x_k d/dx_i
    images = []
    for i in range(n):
        parts = [partial_derivative(g, i) for g in gens]
        for k in range(n):
            vec = []
            for j, f in enumerate(parts):
                NF, _ = nf(degs[j])
                col = _poly_dense_columns([f.mul_monomial([int(a == k) for a in range(n)])], degs[j])
                vec.append((NF.T @ col)[:, 0] % p)
            images.append(np.concatenate(vec))
    im = rank(np.array(images), p)
    return ker - im


def _t1_augmented(gens, syz: GradedMatrix, I: Ideal, seed: int) -> int:
    # Everything over S: preimages of I-multiples are found by appending
    # columns that span the relevant graded pieces of I.
    ring, p, n = I.ring, I.ring.p, I.ring.nvars
    degs = [g.degree() for g in gens]

    def ideal_span(e):
        cols = []
        for g in gens:
            if g.degree() <= e:
                for m in monomial_basis(n, e - g.degree()):
                    cols.append(g.mul_monomial(m))
        return _poly_dense_columns(cols, e) if cols else np.zeros((num_monomials(n, e), 0), dtype=np.int64)

    # A: (phi_j in S_{d_j}) -> (sum_j s_{jl} phi_j in S_{e_l})
    # degree-0 piece of the transpose with twists chosen so that the source
    # block j is S_{d_j} and the target block l is S_{e_l}
    T = syz.dual(0)
    Tm = GradedMatrix(ring, T.entries, degs, [-u for u in syz.source], check=False)
    A = degree_piece(Tm, 0).toarray()
    Bblocks = [ideal_span(-u) for u in syz.source]
    B = _block_diag(Bblocks)
    nphi = A.shape[1]
    rAB = rank(np.hstack([A, B]), p)
    rB = rank(B, p) if B.size else 0
    # derivations and the span of I in the degrees of the generators
    D = []
    for i in range(n):
        parts = [partial_derivative(g, i) for g in gens]
        for k in range(n):
            e = [int(a == k) for a in range(n)]
            D.append(np.concatenate([_poly_dense_columns([f.mul_monomial(e)], dj)[:, 0]
                                     for f, dj in zip(parts, degs)]))
    D = np.array(D).T
    C = _block_diag([ideal_span(dj) for dj in degs])
    rDC = rank(np.hstack([D, C]), p)
    return nphi - rAB + rB - rDC


def _block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def t1_degree0(I: Ideal, method: str = "normal_form", seed: int = 0) -> int:
    """Dimension of the degree-0 part of Hom(I/I^2, S/I) modulo derivations.

    This is the kernel of the transposed first-syzygy matrix over R = S/I,
    in degree 0, divided by the image of the transposed Jacobian matrix.

    Parameters
    ----------
    method : {"normal_form", "augmented"}
        ``"normal_form"`` works on standard-monomial bases of R.
        ``"augmented"`` stays over S and accounts for I by appending columns
        spanning its graded pieces; it is slower and serves as a cross-check.
    """
    R = minimal_free_resolution(I, max_length=2, seed=seed)
    gens = list(R[1].entries[0])
    syz = R[2] if R.length >= 2 else GradedMatrix.zero(I.ring, [], R[1].source)
    if method == "normal_form":
        return _t1_normal_form(gens, syz, I, seed)
    if method == "augmented":
        return _t1_augmented(gens, syz, I, seed)
    raise ValueError(f"unknown method {method!r}")
