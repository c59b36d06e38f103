"""Example presets, the coarse smoothness test and Calabi-Yau invariants.

The workflow mirrors the experiments the package was built for: draw random
data over F_p, build a Pfaffian, Gulliksen-Negård or Kustin-Miller scheme,
check that it is a smooth Calabi-Yau threefold with two random triples of
equations, and read off ``d``, ``c2.H``, ``c3``, the Picard number criterion
and the Hodge numbers.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complexes import (
    AlternatingMatrix,
    GNData,
    KMData,
    PfaffData,
    build_km_complex,
    build_pfaffian_complex,
    canonical_twist,
    gn_scheme,
)
from .gb import Ideal, all_minors, minimal_generators
from .hilbert import (
    curve_invariants,
    cy_invariants_from_hp,
    hilbert_polynomial,
    locus_dimension,
)
from .linalg import row_basis
from .resolve import BettiTable, ChainComplex, betti_table, minimal_free_resolution, sheaf_cohomology_dim
from .ring import PolyRing, Polynomial, jacobian, monomial_basis

__all__ = [
    "Rng",
    "random_form",
    "PRESETS",
    "ConstructionError",
    "preset_data",
    "construct",
    "SmoothnessReport",
    "coarse_smoothness",
    "c3_formula",
    "c3_of",
    "chi_conormal",
    "rho_check",
    "hodge",
    "deformation_distinguisher",
    "InvariantReport",
    "reproduce",
]

log = logging.getLogger(__name__)

_MASK = (1 << 64) - 1


class Rng:
    """SplitMix64 generator.

    ``state += 0x9E3779B97F4A7C15`` followed by the xor-shift-multiply
    finalizer with constants ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``.
    Independent streams come from :meth:`child`, which mixes the seed with a
    BLAKE2b hash of a text label, so results do not depend on draw order
    across unrelated parts of a construction.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` by rejection."""
        limit = (1 << 64) - (1 << 64) % n
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    @classmethod
    def child(cls, seed: int, label: str) -> "Rng":
        h = int.from_bytes(hashlib.blake2b(label.encode(), digest_size=8).digest(), "little")
        mixer = cls(int(seed) ^ h)
        return cls(mixer.next_u64())


def random_form(ring: PolyRing, d: int, rng: Rng) -> Polynomial:
    """Form of degree ``d`` with independent uniform coefficients.

    Coefficients are drawn in the order of the degree-``d`` monomial basis
    (largest monomial first); ``d < 0`` gives zero.
    """
    if d < 0:
        return ring.zero()
    B = monomial_basis(ring.nvars, d)
    coefs = np.array([rng.below(ring.p) for _ in range(B.shape[0])], dtype=np.int64)
    return Polynomial.from_dense(ring, d, coefs)


def _nonzero_form(ring: PolyRing, d: int, rng: Rng) -> Polynomial:
    if d < 0:
        raise ConstructionError(f"a nonzero form of negative degree {d} does not exist")
    while True:
        f = random_form(ring, d, rng)
        if not f.is_zero():
            return f


# ---------------------------------------------------------------------------
# presets


class ConstructionError(ValueError):
    """The random data did not produce a scheme of the expected shape."""


PRESETS = {
    "deg15": {"family": "pf+cubic", "nvars": 8, "e_smooth": 3, "e_c3": 3,
              "twists": {"e": [0] * 5, "l": 1, "cubic": 3}},
    "deg17gn": {"family": "gn", "nvars": 8, "e_smooth": 3, "e_c3": 3,
                "twists": {"a": [0, 0, 0], "f": [1, 1, 2]}},
    "deg17km": {"family": "km", "nvars": 8, "e_smooth": 3, "e_c3": 2,
                "twists": {"a": [0] * 5, "f": [-1, 0, 0], "l1": 1, "l2": 1}},
    "deg20gn": {"family": "gn", "nvars": 8, "e_smooth": 3, "e_c3": 3,
                "twists": {"a": [0] * 4, "f": [1] * 4}},
    "deg14p6": {"family": "pf", "nvars": 7, "e_smooth": None, "e_c3": None,
                "twists": {"e": [0] * 7, "l": 1}},
}


def random_alternating(ring: PolyRing, twists: Sequence[int], l: int, rng: Rng) -> AlternatingMatrix:
    n = len(twists)
    upper = {(i, j): random_form(ring, twists[i] + twists[j] + l, rng)
             for i in range(n) for j in range(i + 1, n)}
    return AlternatingMatrix(ring, upper, twists, l)


def random_km_data(ring: PolyRing, a, f, l1: int, l2: int, seed: int, label: str = "km") -> KMData:
    """Uniformly random Kustin-Miller data with the given twists (u, v nonzero)."""
    tau, s = len(a), (len(a) - 1) // 2
    m = sum(a) + s * l1
    Y = random_alternating(ring, a, l1, Rng.child(seed, f"{label}/Y"))
    rA = Rng.child(seed, f"{label}/A")
    A = [[random_form(ring, a[i] - f[j], rA) for j in range(3)] for i in range(tau)]
    rb = Rng.child(seed, f"{label}/b")
    b = [random_form(ring, l2 - f[j], rb) for j in range(3)]
    u = _nonzero_form(ring, m - l2, Rng.child(seed, f"{label}/u"))
    v = _nonzero_form(ring, l2 - l1 - sum(f), Rng.child(seed, f"{label}/v"))
    return KMData(ring, tuple(a), tuple(f), l1, l2, Y, A, b, u, v,
                  {"seed": seed, "label": label})


def preset_data(preset: str, prime: int = 101, seed: int = 0):
    """Random construction data for a preset.

    Returns a ``KMData``, ``GNData`` or ``PfaffData``; for ``deg15`` a pair
    ``(PfaffData, cubic)``.
    """
    if preset not in PRESETS:
        raise KeyError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    spec = PRESETS[preset]
    ring = PolyRing(prime, spec["nvars"])
    tw = spec["twists"]
    prov = {"preset": preset, "prime": prime, "seed": seed}
    fam = spec["family"]
    if fam == "km":
        D = random_km_data(ring, tw["a"], tw["f"], tw["l1"], tw["l2"], seed, preset)
        D.provenance = prov
        return D
    if fam == "gn":
        r = Rng.child(seed, f"{preset}/phi")
        phi = [[random_form(ring, fi - aj, r) for aj in tw["a"]] for fi in tw["f"]]
        return GNData(ring, tuple(tw["a"]), tuple(tw["f"]), phi, prov)
    Y = random_alternating(ring, tw["e"], tw["l"], Rng.child(seed, f"{preset}/Y"))
    D = PfaffData(ring, Y, prov)
    if fam == "pf+cubic":
        cubic = _nonzero_form(ring, tw["cubic"], Rng.child(seed, f"{preset}/cubic"))
        return D, cubic
    return D


def _family_twist(preset: str) -> int:
    spec = PRESETS[preset]
    N = spec["nvars"] - 1
    tw = spec["twists"]
    if spec["family"] == "pf+cubic":
        # a hypersurface section of degree c adds c to the canonical twist
        return canonical_twist("pf", tw, N) + tw["cubic"]
    return canonical_twist(spec["family"], tw, N)


def construct(preset: str, prime: int = 101, seed: int = 0) -> tuple[Ideal, dict]:
    """Build the ideal of a preset example and check its shape.

    Returns
    -------
    I : Ideal
    meta : dict
        ``preset``, ``family``, ``prime``, ``seed``, ``nvars``,
        ``canonical_twist``, ``dimension``, ``generators`` (count).

    Raises
    ------
    ConstructionError
        If ``V(I)`` is not three-dimensional (the caller may reseed).
    """
    data = preset_data(preset, prime, seed)
    fam = PRESETS[preset]["family"]
    if fam == "km":
        _, I = build_km_complex(data)
    elif fam == "gn":
        I, _ = gn_scheme(data)
    elif fam == "pf+cubic":
        D, cubic = data
        _, J = build_pfaffian_complex(D)
        I = Ideal(list(J.generators) + [cubic], D.ring)
    else:
        _, I = build_pfaffian_complex(data)
    gens, _ = minimal_generators(I)
    I = Ideal(gens, I.ring)
    dim = locus_dimension(I)
    meta = {
        "preset": preset,
        "family": fam,
        "prime": prime,
        "seed": seed,
        "nvars": I.ring.nvars,
        "canonical_twist": _family_twist(preset),
        "dimension": dim,
        "generators": len(gens),
    }
    if dim != 3:
        raise ConstructionError(f"{preset} with seed {seed}: V(I) has dimension {dim}, expected 3")
    return I, meta


# ---------------------------------------------------------------------------
# coarse smoothness test


def _degree_piece_basis(I: Ideal, e: int) -> list:
    """A basis of I_e as polynomials, from monomial multiples of the generators."""
    ring = I.ring
    n = ring.nvars
    vecs = []
    for g in I.generators:
        k = e - g.degree()
        if k < 0:
            continue
        for mono in monomial_basis(n, k):
            vecs.append(g.mul_monomial(mono).to_dense(e))
    if not vecs:
        return []
    R, _ = row_basis(np.array(vecs, dtype=np.int64), ring.p)
    return [Polynomial.from_dense(ring, e, row) for row in R]


def _random_triple(basis: list, rng: Rng) -> list:
    ring = basis[0].ring
    out = []
    for _ in range(3):
        f = ring.zero()
        for b in basis:
            c = rng.below(ring.p)
            if c:
                f = f + b.scale(c)
        out.append(f)
    return out


def jac3_ideal(triple: Sequence[Polynomial], I: Ideal) -> Ideal:
    """``Jac_3(h1, h2, h3) + I``: maximal minors of the Jacobian of the triple, plus I."""
    J = jacobian(triple)
    minors = [f for f in all_minors(J, 3) if not f.is_zero()]
    return Ideal(minors + list(I.generators), I.ring)


def i4_ideal(triple: Sequence[Polynomial], I: Ideal) -> Ideal:
    """``I_4(h1, h2, h3) + I``: 4x4 minors of ``[grad h1, grad h2, grad h3, grad h]``, h a generator.

    Each minor is expanded along its last column, so only the 3x3 minors of the
    triple's Jacobian are ever computed.
    """
    ring = I.ring
    n = ring.nvars
    J = jacobian(triple)
    rows3 = list(itertools.combinations(range(n), 3))
    m3 = dict(zip(rows3, all_minors(J, 3)))
    gens = []
    seen = set()
    for h in I.generators:
        grad = [h.derivative(r) for r in range(n)]
        for R4 in itertools.combinations(range(n), 4):
            acc = ring.zero()
            for k, r in enumerate(R4):
                if grad[r].is_zero():
                    continue
                minor = m3[tuple(x for x in R4 if x != r)]
                if minor.is_zero():
                    continue
                term = grad[r] * minor
                acc = acc - term if (k + 3) % 2 else acc + term
            if acc.is_zero():
                continue
            key = acc.monic()
            if key not in seen:
                seen.add(key)
                gens.append(acc)
    return Ideal(gens + list(I.generators), ring)


def _locus(J: Ideal) -> dict:
    dim = locus_dimension(J)
    hp = hilbert_polynomial(J)
    return {"dim": dim, "hp": str(hp)}


@dataclass
class SmoothnessReport:
    """Outcome of the two-triple test.

    ``triples`` holds, for each accepted triple, the dimension and Hilbert
    polynomial of ``V(I4 + I)`` and ``V(Jac3 + I)``; ``combined_dim`` is the
    dimension of ``V(Jac3(f) + Jac3(g) + I)``.
    """

    e: int
    verdict: str
    triples: list = field(default_factory=list)
    combined_dim: int | None = None
    attempts: int = 0
    curve: dict | None = None

    def to_dict(self) -> dict:
        return {"e": self.e, "verdict": self.verdict, "triples": self.triples,
                "combined_dim": self.combined_dim, "attempts": self.attempts}


def coarse_smoothness(I: Ideal, e: int, rng: Rng, max_attempts: int = 6) -> SmoothnessReport:
    """Two-triple smoothness test for a threefold in ``P^7``.

    Triples are random combinations of a basis of ``I_e``.  A triple is
    accepted when ``V(I4 + I)`` and ``V(Jac3 + I)`` are curves with the same
    Hilbert polynomial.  With two accepted triples ``f, g`` the verdict is
    ``smooth`` if ``V(Jac3(f) + Jac3(g) + I)`` is empty and
    ``isolated-hypersurface-singularities`` if it is finite (``X`` is assumed
    equidimensional); otherwise ``inconclusive``.
    """
    basis = _degree_piece_basis(I, e)
    report = SmoothnessReport(e=e, verdict="inconclusive")
    if len(basis) < 3:
        return report
    accepted = []
    while len(accepted) < 2 and report.attempts < max_attempts:
        report.attempts += 1
        triple = _random_triple(basis, rng)
        jac = jac3_ideal(triple, I)
        jl = _locus(jac)
        if jl["dim"] != 1:
            log.info("triple %d: Jac3 locus has dimension %d", report.attempts, jl["dim"])
            continue
        il = _locus(i4_ideal(triple, I))
        entry = {"I4": il, "Jac3": jl}
        if il != jl:
            log.info("triple %d: I4 and Jac3 loci differ", report.attempts)
            continue
        report.triples.append(entry)
        accepted.append((triple, jac))
    if len(accepted) < 2:
        return report
    (f, jf), (g, jg) = accepted
    report.curve = {"triple": f, "ideal": jf}
    combined = Ideal(list(jf.generators) + [h for h in jg.generators if h not in set(I.generators)], I.ring)
    report.combined_dim = locus_dimension(combined)
    if report.combined_dim == -1:
        report.verdict = "smooth"
    elif report.combined_dim == 0:
        report.verdict = "isolated-hypersurface-singularities"
    return report


# ---------------------------------------------------------------------------
# c3, chi of the conormal bundle, rho and Hodge numbers


def c3_formula(d: int, c2H: int, e: int, p_a: int) -> int:
    """``2 (d(-14e^3 + 84e^2 - 180e + 140) + 3e c2H - 8 c2H + 1 - p_a)``."""
    return 2 * (d * (-14 * e ** 3 + 84 * e ** 2 - 180 * e + 140) + 3 * e * c2H - 8 * c2H + 1 - p_a)


def chi_conormal(h: int, d: int, c2H: int, c3: int) -> Fraction:
    """Euler characteristic of ``N^v(h)`` for a Calabi-Yau threefold in ``P^7``."""
    h = Fraction(h)
    return (Fraction(c3, 2) + d * (Fraction(2, 3) * h ** 3 - 4 * h ** 2 + 4 * h - Fraction(4, 3))
            + Fraction(2 * c2H, 3) * (2 * h - 1))


def c3_from_curve(d: int, c2H: int, e: int, p_a: int) -> int:
    """Top Chern class from the genus of the degeneracy curve of a degree-``e`` triple.

    The Eagon-Northcott complex of the triple gives
    ``chi(N^v(8 - 3e)) = 3 PH(8 - 4e) - (1 - p_a)``; equating with
    :func:`chi_conormal` yields ``c3 = c3_formula(d, c2H, e, 2 - p_a)``.
    """
    return c3_formula(d, c2H, e, 2 - p_a)


def c3_of(I: Ideal, e: int, rng: Rng, curve_ideal: Ideal | None = None,
          max_attempts: int = 6) -> tuple[int, int, dict]:
    """``(c3, p_a, curve)`` from a degree-``e`` triple with a one-dimensional Jacobian locus.

    Raises
    ------
    ValueError
        If no triple gives a curve within ``max_attempts`` draws, or the
        Hilbert polynomial of ``I`` is not of Calabi-Yau shape.
    """
    d, c2H, _ = cy_invariants_from_hp(hilbert_polynomial(I), I.ring.nvars)
    if curve_ideal is None:
        basis = _degree_piece_basis(I, e)
        if len(basis) < 3:
            raise ValueError(f"I has fewer than three independent forms of degree {e}")
        for _ in range(max_attempts):
            J = jac3_ideal(_random_triple(basis, rng), I)
            if locus_dimension(J) == 1:
                curve_ideal = J
                break
        else:
            raise ValueError(f"no degree-{e} triple with a one-dimensional Jacobian locus found")
    deg, p_a = curve_invariants(curve_ideal)
    curve = {"degree": deg, "pa": p_a, "hp": str(hilbert_polynomial(curve_ideal))}
    return c3_from_curve(d, c2H, e, p_a), p_a, curve


def rho_check(I: Ideal, resolution: ChainComplex | None = None) -> tuple[str, dict]:
    """Vanishing criterion for ``rho = 1``.

    Checks ``h^i(O_X(m)) = 0`` for ``i = 1, 2, 3`` and ``h^1(I~(m)) = 0`` for
    ``m`` from the smallest generator degree ``m0`` up to ``reg + 1``; beyond
    the regularity these groups vanish anyway.  The criterion is sufficient,
    not necessary, and assumes ``I`` saturated.  A resolution of length equal
    to the codimension (arithmetically Cohen-Macaulay) guarantees both.

    Returns
    -------
    verdict : str
        ``"rho=1"`` or ``"undetermined"``.
    table : dict
        ``m0``, ``reg``, ``acm`` (fast path), ``saturation_assumed`` and the
        nonzero cohomology dimensions found (``nonzero``).
    """
    R = resolution if resolution is not None else minimal_free_resolution(I)
    B = betti_table(R)
    m0 = B.min_generator_degree()
    reg = B.regularity()
    n = I.ring.nvars
    codim = n - 1 - locus_dimension(I)
    acm = R.length == codim
    nonzero = {}
    for m in range(m0, reg + 2):
        for i in (1, 2, 3):
            h = sheaf_cohomology_dim(I, "structure", i, m, R)
            if h:
                nonzero[f"h{i}(O_X({m}))"] = h
        h = sheaf_cohomology_dim(I, "ideal", 1, m, R)
        if h:
            nonzero[f"h1(I({m}))"] = h
    table = {"m0": m0, "reg": reg, "acm": acm, "saturation_assumed": not acm, "nonzero": nonzero}
    return ("rho=1" if not nonzero else "undetermined"), table


def hodge(c3: int, rho_verdict: str) -> tuple[int, int]:
    """``(h11, h12) = (1, 1 - c3/2)`` when ``rho = 1`` is certified."""
    if rho_verdict != "rho=1":
        raise ValueError("h11 is only known when rho = 1 has been certified")
    if c3 % 2:
        raise ValueError(f"c3 = {c3} is odd")
    return 1, 1 - c3 // 2


def deformation_distinguisher(B1: BettiTable, B2: BettiTable) -> str:
    """Compare smallest generator degrees of two Calabi-Yau threefolds in the same space.

    That degree is constant in flat families, so different values prove the
    two are not deformation equivalent; equal values prove nothing.
    """
    s1, s2 = B1.min_generator_degree(), B2.min_generator_degree()
    return "not deformation equivalent" if s1 != s2 else "indeterminate"


# ---------------------------------------------------------------------------
# end-to-end


_REPORT_FIELDS = ("example", "prime", "seed", "d", "c2H", "linearly_normal", "e", "curve_degree",
                  "pa", "c3", "rho", "h11", "h12", "betti", "smoothness", "timings_ms")


@dataclass
class InvariantReport:
    example: str
    prime: int
    seed: int
    d: int
    c2H: int
    linearly_normal: bool
    e: int | None
    curve_degree: int | None
    pa: int | None
    c3: int | None
    rho: str
    h11: int | None
    h12: int | None
    betti: BettiTable
    smoothness: dict | None
    timings_ms: dict

    def to_dict(self) -> dict:
        out = {}
        for k in _REPORT_FIELDS:
            v = getattr(self, k)
            out[k] = json.loads(v.to_json()) if isinstance(v, BettiTable) else v
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "InvariantReport":
        doc = json.loads(text)
        doc["betti"] = BettiTable.from_json(json.dumps(doc["betti"]))
        return cls(**{k: doc[k] for k in _REPORT_FIELDS})


def invariants(I: Ideal, example: str = "custom", prime: int | None = None, seed: int = 0,
               e_smooth: int | None = 3, e_c3: int | None = 3) -> InvariantReport:
    """All invariants of a given ideal; smoothness and c3 are skipped when the degrees are None.

    Raises
    ------
    ValueError
        If the smoothness test does not return ``smooth``; the message
        carries the verdict.
    """
    timings = {}

    def clock(name, fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        timings[name] = int(round(1000 * (time.perf_counter() - t0)))
        return out

    nvars = I.ring.nvars
    H = clock("hilbert", hilbert_polynomial, I)
    d, c2H, ln = cy_invariants_from_hp(H, nvars)
    R = clock("resolution", minimal_free_resolution, I)
    B = betti_table(R)
    rho, _ = clock("rho", rho_check, I, R)
    smooth = None
    c3 = p_a = curve_degree = None
    if e_smooth is not None:
        rep = clock("smoothness", coarse_smoothness, I, e_smooth, Rng.child(seed, f"{example}/smooth"))
        smooth = rep.to_dict()
        if rep.verdict != "smooth":
            raise ValueError(f"smoothness test verdict: {rep.verdict}")
        reuse = rep.curve["ideal"] if e_c3 == e_smooth else None
        c3, p_a, curve = clock("c3", c3_of, I, e_c3, Rng.child(seed, f"{example}/c3"), reuse)
        curve_degree = curve["degree"]
    h11 = h12 = None
    if c3 is not None and rho == "rho=1":
        h11, h12 = hodge(c3, rho)
    return InvariantReport(example, prime if prime is not None else I.ring.p, seed, d, c2H, ln,
                           e_c3 if c3 is not None else None, curve_degree, p_a, c3, rho, h11, h12,
                           B, smooth, timings)


def reproduce(example: str, prime: int = 101, seed: int = 0, seed_budget: int = 10) -> InvariantReport:
    """Construct a preset and compute its report, trying seeds ``seed, seed+1, ...``.

    Raises
    ------
    ConstructionError
        When every seed in the budget fails; the message lists the failures.
    """
    if example not in PRESETS:
        raise KeyError(f"unknown preset {example!r}; choose from {sorted(PRESETS)}")
    spec = PRESETS[example]
    failures = []
    for s in range(seed, seed + seed_budget):
        try:
            t0 = time.perf_counter()
            I, _ = construct(example, prime, s)
            t_construct = int(round(1000 * (time.perf_counter() - t0)))
            rep = invariants(I, example, prime, s, spec["e_smooth"], spec["e_c3"])
        except (ConstructionError, ValueError) as exc:
            log.info("seed %d rejected: %s", s, exc)
            failures.append(f"seed {s}: {exc}")
            continue
        rep.timings_ms = {"construct": t_construct, **rep.timings_ms}
        return rep
    raise ConstructionError(f"{example}: no seed in [{seed}, {seed + seed_budget}) succeeded; "
                            + "; ".join(failures))


__all__ += ["invariants", "jac3_ideal", "i4_ideal", "random_km_data", "random_alternating",
            "c3_from_curve"]
