"""Gröbner bases of homogeneous ideals over F_p (grevlex).

The engine is a degree-by-degree Buchberger algorithm.  In each degree d a
*reducer table* assigns to every monomial of degree d the index of a basis
element whose lead term divides it (or -1).  Reducing a degree-d polynomial
is then one compiled pass over its dense coefficient vector: positions are
visited from the largest monomial down, and every reducible nonzero entry is
cancelled by a monomial multiple of its reducer.  Pair bookkeeping follows
Gebauer and Möller.

Inputs must be homogeneous; every result below is exact.
"""

from __future__ import annotations

import contextlib
import itertools
import logging
import re
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .ring import (
    MAX_DEGREE,
    PolyRing,
    Polynomial,
    RingMismatchError,
    _rank_one,
    binomial_table,
    monomial_basis,
    num_monomials,
    rank_monomials,
)

__all__ = [
    "Ideal",
    "ResourceBudgetExceeded",
    "step_budget",
    "groebner_basis",
    "normal_form",
    "minors_ideal",
    "minimal_generators",
    "parse_ideal",
    "format_ideal",
    "read_ideal",
    "write_ideal",
]

log = logging.getLogger(__name__)

_LAZY_LIMIT = 1 << 16


class ResourceBudgetExceeded(RuntimeError):
    """Raised when a computation exceeds its configured step budget."""


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True)
def _reduce_dense(vec, d, table, basis_d, lead_exps, gexps, gcoefs, goff, p, binom, lazy, start):
    n = basis_d.shape[1]
    mult = np.empty(n, dtype=np.int64)
    e = np.empty(n, dtype=np.int64)
    for i in range(start, vec.shape[0]):
        c = vec[i] % p
        vec[i] = c
        if c == 0:
            continue
        r = table[i]
        if r < 0:
            continue
        for k in range(n):
            mult[k] = basis_d[i, k] - lead_exps[r, k]
        f = p - c
        vec[i] = 0
        # elements are monic with the lead term stored first
        for t in range(goff[r] + 1, goff[r + 1]):
            for k in range(n):
                e[k] = mult[k] + gexps[t, k]
            pos = _rank_one(e, d, binom)
            if lazy:
                vec[pos] += f * gcoefs[t]
            else:
                vec[pos] = (vec[pos] + f * gcoefs[t]) % p


@njit(cache=True)
def _add_multiple(vec, d, mult, gexps, gcoefs, lo, hi, c, p, binom):
    n = mult.shape[0]
    e = np.empty(n, dtype=np.int64)
    for t in range(lo, hi):
        for k in range(n):
            e[k] = mult[k] + gexps[t, k]
        pos = _rank_one(e, d, binom)
        vec[pos] = (vec[pos] + c * gcoefs[t]) % p


@njit(cache=True)
def _divides(a, b):
    for k in range(a.shape[0]):
        if a[k] > b[k]:
            return False
    return True


@njit(cache=True)
def _gm_new_pairs(lead_exps, lead_deg, h, maxdeg):
    """Indices i < h whose pair (i, h) survives the Gebauer-Möller criteria."""
    n = lead_exps.shape[1]
    lcm = np.empty((h, n), dtype=np.int64)
    deg = np.empty(h, dtype=np.int64)
    coprime = np.empty(h, dtype=np.bool_)
    for i in range(h):
        s = 0
        for k in range(n):
            v = max(lead_exps[i, k], lead_exps[h, k])
            lcm[i, k] = v
            s += v
        deg[i] = s
        coprime[i] = s == lead_deg[i] + lead_deg[h]
    alive = np.ones(h, dtype=np.bool_)
    for i in range(h):
        if deg[i] > maxdeg:
            alive[i] = False
    # chain criterion: drop (i, h) when another live pair's lcm divides
    # lcm(i, h); among equal lcms the first processed one wins
    for i in range(h):
        if not alive[i] or coprime[i]:
            continue
        for j in range(h):
            if j == i or not alive[j] or deg[j] > deg[i]:
                continue
            if _divides(lcm[j], lcm[i]):
                alive[i] = False
                break
    out = np.empty(h, dtype=np.int64)
    m = 0
    for i in range(h):
        if alive[i] and not coprime[i]:
            out[m] = i
            m += 1
    return out[:m], lcm


# ---------------------------------------------------------------------------
# engine


class _Store:
    """Concatenated term storage for basis elements, grown by doubling."""

    def __init__(self, n: int):
        self.n = n
        self.exps = np.zeros((64, n), dtype=np.int64)
        self.coefs = np.zeros(64, dtype=np.int64)
        self.off = [0]
        self.leads = np.zeros((16, n), dtype=np.int64)
        self.degs = np.zeros(16, dtype=np.int64)
        self.lengths: list[int] = []

    def __len__(self) -> int:
        return len(self.lengths)

    def append(self, exps: np.ndarray, coefs: np.ndarray) -> int:
        k = len(self.lengths)
        t0, t1 = self.off[-1], self.off[-1] + exps.shape[0]
        if t1 > self.exps.shape[0]:
            cap = max(2 * self.exps.shape[0], t1)
            self.exps = np.resize(self.exps, (cap, self.n))
            self.coefs = np.resize(self.coefs, cap)
        self.exps[t0:t1] = exps
        self.coefs[t0:t1] = coefs
        self.off.append(t1)
        if k >= self.leads.shape[0]:
            self.leads = np.resize(self.leads, (2 * k, self.n))
            self.degs = np.resize(self.degs, 2 * k)
        self.leads[k] = exps[0]
        self.degs[k] = int(exps[0].sum())
        self.lengths.append(exps.shape[0])
        return k

    def element(self, k: int):
        return self.exps[self.off[k]:self.off[k + 1]], self.coefs[self.off[k]:self.off[k + 1]]

    def offsets(self) -> np.ndarray:
        return np.asarray(self.off, dtype=np.int64)


class _Engine:
    def __init__(self, ring: PolyRing):
        self.ring = ring
        self.p = ring.p
        self.n = ring.nvars
        self.binom = binomial_table()
        self.lazy = ring.p < _LAZY_LIMIT
        self.store = _Store(self.n)
        self.tables: dict[int, np.ndarray] = {}
        self.unit = False

    # -- reducer tables ----------------------------------------------------
    def table(self, d: int) -> np.ndarray:
        if d in self.tables:
            return self.tables[d]
        N = num_monomials(self.n, d)
        if d == 0:
            t = np.full(N, -1, dtype=np.int64)
        else:
            prev = self.table(d - 1)
            basis = monomial_basis(self.n, d)
            lengths = np.asarray(self.store.lengths + [0], dtype=np.int64)
            best = np.full(N, -1, dtype=np.int64)
            best_len = np.full(N, np.iinfo(np.int64).max, dtype=np.int64)
            for v in range(self.n):
                rows = np.nonzero(basis[:, v] > 0)[0]
                if rows.shape[0] == 0:
                    continue
                down = basis[rows].copy()
                down[:, v] -= 1
                cand = prev[rank_monomials(down, d - 1)]
                ok = cand >= 0
                rows, cand = rows[ok], cand[ok]
                better = lengths[cand] < best_len[rows]
                best[rows[better]] = cand[better]
                best_len[rows[better]] = lengths[cand[better]]
            t = best
        self.tables[d] = t
        return t

    def _kernel_args(self):
        s = self.store
        return s.leads, s.exps, s.coefs, s.offsets()

    def reduce(self, vec: np.ndarray, d: int, start: int = 0) -> np.ndarray:
        leads, gexps, gcoefs, goff = self._kernel_args()
        _reduce_dense(vec, d, self.table(d), monomial_basis(self.n, d), leads, gexps, gcoefs, goff,
                      self.p, self.binom, self.lazy, start)
        return vec

    def add(self, vec: np.ndarray, d: int) -> int | None:
        """Make ``vec`` (already reduced) monic and add it as a new element."""
        nz = np.nonzero(vec)[0]
        if nz.shape[0] == 0:
            return None
        lead = vec[nz[0]]
        inv = pow(int(lead), self.p - 2, self.p)
        coefs = (vec[nz] * inv) % self.p
        exps = monomial_basis(self.n, d)[nz]
        k = self.store.append(exps, coefs)
        self.table(d)[nz[0]] = k
        if d == 0:
            self.unit = True
        return k


def _as_dense(f: Polynomial, d: int) -> np.ndarray:
    out = np.zeros(num_monomials(f.ring.nvars, d), dtype=np.int64)
    if len(f):
        out[rank_monomials(f.exps, d)] = f.coefs
    return out


_DEFAULT_BUDGET: list = [None]


@contextlib.contextmanager
def step_budget(steps: int | None):
    """Default step budget for every Gröbner run started inside the block."""
    old = _DEFAULT_BUDGET[0]
    _DEFAULT_BUDGET[0] = steps
    try:
        yield
    finally:
        _DEFAULT_BUDGET[0] = old


class _Run:
    """One Buchberger run; also records which inputs were needed."""

    def __init__(self, ring: PolyRing, gens: Sequence[Polynomial], max_degree: int | None,
                 budget: int | None):
        self.eng = _Engine(ring)
        self.gens = list(gens)
        self.max_degree = MAX_DEGREE if max_degree is None else min(max_degree, MAX_DEGREE)
        self.budget = budget if budget is not None else _DEFAULT_BUDGET[0]
        self.steps = 0
        self.pairs: dict[int, list] = {}
        self.minimal_inputs: list[int] = []
        self.complete = False

    def _tick(self):
        self.steps += 1
        if self.budget is not None and self.steps > self.budget:
            raise ResourceBudgetExceeded(f"Gröbner step budget {self.budget} exhausted")

    def _new_pairs(self, h: int):
        s = self.eng.store
        keep, lcm = _gm_new_pairs(s.leads, s.degs, h, self.max_degree)
        lead_h = s.leads[h]
        # Buchberger's B-criterion on pairs already queued
        for deg, bucket in self.pairs.items():
            if not bucket:
                continue
            arr = np.asarray([b[2] for b in bucket])
            ii = np.asarray([b[0] for b in bucket])
            jj = np.asarray([b[1] for b in bucket])
            div = np.all(lead_h <= arr, axis=1)
            if not div.any():
                continue
            lih = np.maximum(s.leads[ii], lead_h)
            ljh = np.maximum(s.leads[jj], lead_h)
            drop = div & np.any(lih != arr, axis=1) & np.any(ljh != arr, axis=1)
            if drop.any():
                self.pairs[deg] = [b for b, x in zip(bucket, drop) if not x]
        for i in keep:
            L = lcm[i]
            self.pairs.setdefault(int(L.sum()), []).append((int(i), h, L))

    def _spoly(self, i: int, j: int, L: np.ndarray, d: int) -> np.ndarray:
        s = self.eng.store
        vec = np.zeros(num_monomials(self.eng.n, d), dtype=np.int64)
        p = self.eng.p
        for k, c in ((i, 1), (j, p - 1)):
            lo, hi = s.off[k], s.off[k + 1]
            _add_multiple(vec, d, L - s.leads[k], s.exps, s.coefs, lo, hi, c, p, self.eng.binom)
        return vec

    def run(self) -> "_Run":
        eng = self.eng
        by_degree: dict[int, list[int]] = {}
        for idx, g in enumerate(self.gens):
            if g.is_zero():
                continue
            by_degree.setdefault(g.degree(), []).append(idx)
        pending_inputs = sorted(by_degree)
        d = 0
        while True:
            if eng.unit:
                break
            queued = [k for k, v in self.pairs.items() if v]
            later_inputs = [k for k in pending_inputs if k >= d]
            if not queued and not later_inputs:
                break
            d = min(queued + later_inputs)
            if d > self.max_degree:
                break
            table = eng.table(d)
            bucket = self.pairs.pop(d, [])
            if bucket:
                log.info("degree %d: %d pairs, basis size %d", d, len(bucket), len(eng.store))
            # pairs first, so that inputs surviving afterwards are minimal generators
            bucket.reverse()
            while bucket:
                i, j, L = bucket.pop()
                self._tick()
                vec = self._spoly(i, j, L, d)
                start = int(rank_monomials(L, d)[0]) + 1
                eng.reduce(vec, d, start)
                k = eng.add(vec, d)
                if k is not None:
                    self._new_pairs(k)
            for idx in by_degree.get(d, []):
                self._tick()
                vec = _as_dense(self.gens[idx], d)
                eng.reduce(vec, d)
                k = eng.add(vec, d)
                if k is not None:
                    self.minimal_inputs.append(idx)
                    if d == 0:
                        break
                    self._new_pairs(k)
            if d > 0 and not eng.unit and (table >= 0).all():
                # every monomial of degree d is a lead term: nothing new can appear
                self.pairs.clear()
                pending_inputs = []
                break
            d += 1
        self.complete = (not any(self.pairs.values())) and not [k for k in pending_inputs if k >= d]
        if eng.unit:
            self.complete = True
        return self

    def reduced_basis(self) -> list[Polynomial]:
        eng = self.eng
        ring = eng.ring
        s = eng.store
        if eng.unit:
            return [ring.one()]
        out = []
        for k in range(len(s)):
            exps, coefs = s.element(k)
            d = int(s.degs[k])
            vec = _as_dense(Polynomial._raw(ring, exps.copy(), coefs.copy()), d)
            lead_pos = int(rank_monomials(exps[0], d)[0])
            eng.reduce(vec, d, lead_pos + 1)
            nz = np.nonzero(vec)[0]
            out.append(Polynomial._raw(ring, monomial_basis(eng.n, d)[nz].copy(), vec[nz].copy()))
        out.sort(key=lambda f: _order_key(f), reverse=True)
        return out


def _order_key(f: Polynomial):
    e = f.exps[0]
    return (int(e.sum()), tuple(-int(x) for x in e[::-1]))


# ---------------------------------------------------------------------------
# public API


class Ideal:
    """Homogeneous ideal given by generators; caches its reduced Gröbner basis.

    Parameters
    ----------
    generators : iterable of Polynomial
        Homogeneous generators, all in the same ring.  Zeros are dropped.
    ring : PolyRing, optional
        Required only when ``generators`` is empty.
    """

    def __init__(self, generators: Iterable[Polynomial], ring: PolyRing | None = None):
        gens = [g for g in generators]
        if ring is None:
            if not gens:
                raise ValueError("ring is required for an ideal without generators")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError("generators live in different rings")
            if not g.is_homogeneous():
                raise ValueError(f"generator is not homogeneous: {g}")
        self.ring = ring
        self.generators = tuple(g for g in gens if not g.is_zero())
        self._run: _Run | None = None
        self._gb: list[Polynomial] | None = None

    def __repr__(self) -> str:
        return f"Ideal({len(self.generators)} generators in {self.ring})"

    def __add__(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise RingMismatchError("ideals live in different rings")
        return Ideal(self.generators + other.generators, self.ring)

    def is_zero(self) -> bool:
        return not self.generators

    def _full_run(self, budget: int | None = None) -> _Run:
        if self._run is None:
            self._run = _Run(self.ring, self.generators, None, budget).run()
        return self._run

    def groebner_basis(self, max_degree: int | None = None, budget: int | None = None) -> list[Polynomial]:
        if max_degree is not None:
            return _Run(self.ring, self.generators, max_degree, budget).run().reduced_basis()
        if self._gb is None:
            self._gb = self._full_run(budget).reduced_basis()
        return list(self._gb)

    def lead_exponents(self, budget: int | None = None) -> np.ndarray:
        """Exponent vectors of the lead terms of the reduced Gröbner basis."""
        gb = self.groebner_basis(budget=budget)
        if not gb:
            return np.zeros((0, self.ring.nvars), dtype=np.int64)
        return np.vstack([g.exps[0] for g in gb])

    def normal_form(self, f: Polynomial, budget: int | None = None) -> Polynomial:
        if f.ring != self.ring:
            raise RingMismatchError("polynomial and ideal live in different rings")
        run = self._full_run(budget)
        eng = run.eng
        if eng.unit:
            return self.ring.zero()
        out = self.ring.zero()
        for d, comp in sorted(f.homogeneous_components().items()):
            if d > MAX_DEGREE:
                raise ValueError(f"degree {d} exceeds supported maximum {MAX_DEGREE}")
            vec = eng.reduce(_as_dense(comp, d), d)
            out = out + Polynomial.from_dense(self.ring, d, vec)
        return out

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    __contains__ = contains

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.generators)

    def is_unit(self) -> bool:
        return self._full_run().eng.unit


def groebner_basis(I: Ideal, max_degree: int | None = None, budget: int | None = None) -> list[Polynomial]:
    """Reduced Gröbner basis of ``I`` under grevlex.

    Parameters
    ----------
    I : Ideal
    max_degree : int, optional
        Truncation degree; the result is then the basis of ``I`` up to that degree.
    budget : int, optional
        Maximal number of reductions before ``ResourceBudgetExceeded`` is raised.

    Returns
    -------
    list of Polynomial
        Monic elements sorted by descending lead monomial.
    """
    return I.groebner_basis(max_degree=max_degree, budget=budget)


def normal_form(f: Polynomial, I: Ideal) -> Polynomial:
    """Remainder of ``f`` modulo the reduced Gröbner basis of ``I``."""
    return I.normal_form(f)


def _det(M, rows: tuple, cols: tuple, memo: dict):
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if len(rows) == 1:
        val = M[rows[0]][cols[0]]
    else:
        r0, rest = rows[0], rows[1:]
        val = M[r0][cols[0]].ring.zero()
        for pos, c in enumerate(cols):
            a = M[r0][c]
            if a.is_zero():
                continue
            sub = _det(M, rest, cols[:pos] + cols[pos + 1:], memo)
            if sub.is_zero():
                continue
            val = val - a * sub if pos % 2 else val + a * sub
    memo[key] = val
    return val


def _entries(M) -> list:
    return [list(row) for row in (M.entries if hasattr(M, "entries") else M)]


def all_minors(M, k: int) -> list[Polynomial]:
    """All ``k x k`` minors of ``M`` (rows x cols nested list), in lexicographic index order."""
    rows = _entries(M)
    if k <= 0:
        raise ValueError("minor size must be positive")
    nr, nc = len(rows), len(rows[0]) if rows else 0
    if k > min(nr, nc):
        raise ValueError(f"minor size {k} exceeds matrix shape {nr}x{nc}")
    memo: dict = {}
    return [_det(rows, R, C, memo)
            for R in itertools.combinations(range(nr), k)
            for C in itertools.combinations(range(nc), k)]


def minors_ideal(M, k: int, ring: PolyRing | None = None) -> Ideal:
    """Ideal of all ``k x k`` minors, with zeros and duplicates (up to scalars) dropped."""
    rows = _entries(M)
    if ring is None:
        ring = rows[0][0].ring
    seen = set()
    gens = []
    for f in all_minors(rows, k):
        if f.is_zero():
            continue
        key = f.monic()
        if key in seen:
            continue
        seen.add(key)
        gens.append(f)
    return Ideal(gens, ring)


def minimal_generators(I: Ideal) -> tuple[list[Polynomial], int]:
    """Degreewise-minimal subset of the generators and the smallest generator degree.

    A generator of degree d is kept when it is nonzero modulo the ideal
    generated by all kept generators of lower degree and those of degree d
    chosen before it.
    """
    if I.is_zero():
        raise ValueError("the zero ideal has no generators")
    order = sorted(range(len(I.generators)), key=lambda i: I.generators[i].degree())
    gens = [I.generators[i] for i in order]
    run = _Run(I.ring, gens, max(g.degree() for g in gens), None).run()
    chosen = [gens[i] for i in sorted(run.minimal_inputs)]
    return chosen, min(g.degree() for g in chosen)


# ---------------------------------------------------------------------------
# ideal files

_HEADER = re.compile(r"^\s*ring\s+p\s*=\s*(\d+)\s+n\s*=\s*(\d+)\s*$")


class IdealFormatError(ValueError):
    """Malformed ideal file; the message carries line (and column) information."""


def parse_ideal(text: str, source: str = "<string>") -> Ideal:
    """Parse the ideal file format: a ``ring p=.. n=..`` header, one polynomial per line."""
    ring = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ring is None:
            m = _HEADER.match(line)
            if not m:
                raise IdealFormatError(f"{source}:{lineno}: expected header 'ring p=<prime> n=<nvars>'")
            try:
                ring = PolyRing(int(m.group(1)), int(m.group(2)))
            except ValueError as exc:
                raise IdealFormatError(f"{source}:{lineno}: {exc}") from None
            continue
        try:
            f = ring.parse(line)
        except ValueError as exc:
            raise IdealFormatError(f"{source}:{lineno}: {exc}") from None
        if not f.is_homogeneous():
            raise IdealFormatError(f"{source}:{lineno}: polynomial is not homogeneous")
        gens.append(f)
    if ring is None:
        raise IdealFormatError(f"{source}: missing ring header")
    return Ideal(gens, ring)


def format_ideal(I: Ideal) -> str:
    lines = [f"ring p={I.ring.p} n={I.ring.nvars}"]
    lines += [str(g) for g in I.generators]
    return "\n".join(lines) + "\n"


def read_ideal(path) -> Ideal:
    with open(path, encoding="utf-8") as fh:
        return parse_ideal(fh.read(), str(path))


def write_ideal(I: Ideal, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_ideal(I))
