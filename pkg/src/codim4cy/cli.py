"""Command-line interface: ``codim4cy <verb> ...``.

Exit status is 0 on success, 1 on bad input, 2 when a verdict fails (not
smooth, complex check failed, rho undetermined, no seed succeeded) and 3 when
the Gröbner step budget runs out.  Machine-readable output goes to standard
output or to files; progress goes to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .complexes import build_km_complex, build_pfaffian_complex, quasi_self_dual_check, verify_complex
from .gb import IdealFormatError, ResourceBudgetExceeded, format_ideal, parse_ideal, step_budget
from .hilbert import cy_invariants_from_hp, hilbert_polynomial, locus_dimension
from .pipeline import (
    PRESETS,
    ConstructionError,
    Rng,
    coarse_smoothness,
    construct,
    deformation_distinguisher,
    invariants,
    preset_data,
    reproduce,
    rho_check,
)
from .resolve import BettiTable, betti_table, minimal_free_resolution

log = logging.getLogger("codim4cy")


class _VerdictFailure(Exception):
    pass


def _provenance(args) -> str:
    opts = {k: v for k, v in vars(args).items() if k not in ("func", "verb") and v is not None}
    lines = [f"# verb: {args.verb}"]
    lines += [f"# {k}: {v}" for k, v in sorted(opts.items())]
    lines.append(f"# version: {__version__}")
    return "\n".join(lines) + "\n"


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str, json_doc: dict | None = None) -> None:
    """Print ``text``; also write files requested with ``-o`` / ``--json``."""
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if getattr(args, "output", None):
        _write_atomic(args.output, (text if text.endswith("\n") else text + "\n") + _provenance(args))
    if getattr(args, "json", None) and json_doc is not None:
        doc = dict(json_doc)
        doc["provenance"] = {"verb": args.verb, "version": __version__,
                             "options": {k: v for k, v in vars(args).items()
                                         if k not in ("func", "verb") and v is not None}}
        _write_atomic(args.json, json.dumps(doc, indent=2) + "\n")


def _read_comments(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if line.startswith("# ") and ": " in line:
            k, _, v = line[2:].partition(": ")
            out[k.strip()] = v.strip()
    return out


def _load_ideal(path: str):
    text = Path(path).read_text(encoding="utf-8")
    return parse_ideal(text, path), _read_comments(text)


# ---------------------------------------------------------------------------
# verbs


def cmd_construct(args) -> int:
    I, meta = construct(args.preset, args.prime, args.seed)
    print(f"constructed {args.preset}: {meta['generators']} generators, dim V = {meta['dimension']}",
          file=sys.stderr)
    body = format_ideal(I) + f"# preset: {args.preset}\n"
    _emit(args, body.rstrip("\n"), meta)
    return 0


def cmd_betti(args) -> int:
    I, _ = _load_ideal(args.ideal)
    B = betti_table(minimal_free_resolution(I))
    _emit(args, B.pretty(), json.loads(B.to_json()))
    return 0


def cmd_hilbert(args) -> int:
    I, _ = _load_ideal(args.ideal)
    H = hilbert_polynomial(I)
    doc = {"hilbert_polynomial": str(H), "dimension": locus_dimension(I)}
    lines = [f"Hilbert polynomial: {H}", f"dim V(I): {doc['dimension']}"]
    try:
        d, c2H, ln = cy_invariants_from_hp(H, I.ring.nvars)
        doc.update(d=d, c2H=c2H, linearly_normal=ln)
        lines += [f"d: {d}", f"c2.H: {c2H}", f"linearly normal: {ln}"]
    except ValueError:
        lines.append("not of Calabi-Yau threefold shape")
    _emit(args, "\n".join(lines), doc)
    return 0


def cmd_smooth(args) -> int:
    I, _ = _load_ideal(args.ideal)
    rep = coarse_smoothness(I, args.e, Rng.child(args.seed, "cli/smooth"))
    _emit(args, f"verdict: {rep.verdict}\n" + json.dumps(rep.to_dict(), indent=2), rep.to_dict())
    return 0 if rep.verdict == "smooth" else 2


def cmd_invariants(args) -> int:
    I, notes = _load_ideal(args.ideal)
    example = notes.get("preset", "custom")
    spec = PRESETS.get(example, {})
    seed = args.seed if args.seed is not None else int(notes.get("seed", 0))
    e = args.e
    e_smooth = e if e is not None else spec.get("e_smooth", 3)
    e_c3 = e if e is not None else spec.get("e_c3", 3)
    try:
        rep = invariants(I, example, I.ring.p, seed, e_smooth, e_c3)
    except ValueError as exc:
        raise _VerdictFailure(str(exc)) from None
    _emit(args, rep.to_json(), rep.to_dict())
    return 0


def cmd_rho(args) -> int:
    I, _ = _load_ideal(args.ideal)
    verdict, table = rho_check(I)
    _emit(args, f"verdict: {verdict}\n" + json.dumps(table, indent=2), {"verdict": verdict, **table})
    return 0 if verdict == "rho=1" else 2


def cmd_verify_complex(args) -> int:
    fam = PRESETS[args.preset]["family"]
    if args.family not in fam.split("+"):
        raise ValueError(f"preset {args.preset} is of family {fam}, not {args.family}")
    data = preset_data(args.preset, args.prime, args.seed)
    if args.family == "km":
        C, _ = build_km_complex(data)
        g4 = data.g4
    elif args.family == "pf":
        D = data[0] if isinstance(data, tuple) else data
        C, _ = build_pfaffian_complex(D)
        g4 = C.twists(C.length)[0]
    else:
        I, _ = construct(args.preset, args.prime, args.seed)
        C = minimal_free_resolution(I)
        g4 = C.twists(C.length)[0]
    rep = verify_complex(C)
    qsd = quasi_self_dual_check(C, g4)
    ok = lambda b: "OK" if b else "FAIL"  # noqa: E731
    line = (f"compositions zero: {ok(rep.compositions_zero)}; homogeneous: {ok(rep.homogeneous)}; "
            f"quasi-self-dual (g4={g4}): {ok(qsd)}")
    if not rep.ok:
        line += f"\n{rep.message}"
    _emit(args, line, {"compositions_zero": rep.compositions_zero, "homogeneous": rep.homogeneous,
                       "quasi_self_dual": qsd, "g4": g4, "message": rep.message})
    return 0 if rep.ok and qsd else 2


def cmd_reproduce(args) -> int:
    try:
        rep = reproduce(args.example, args.prime, args.seed, args.seed_budget)
    except ConstructionError as exc:
        raise _VerdictFailure(str(exc)) from None
    _emit(args, rep.to_json(), rep.to_dict())
    return 0


def _load_betti(path: str) -> BettiTable:
    text = Path(path).read_text(encoding="utf-8")
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    stripped = body.strip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        doc.pop("provenance", None)
        return BettiTable.from_json(json.dumps(doc))
    return BettiTable.parse(body)


def cmd_distinguish(args) -> int:
    B1, B2 = _load_betti(args.first), _load_betti(args.second)
    verdict = deformation_distinguisher(B1, B2)
    text = (f"smallest generator degrees: {B1.min_generator_degree()} vs {B2.min_generator_degree()}\n"
            f"verdict: {verdict}")
    _emit(args, text, {"verdict": verdict, "min_degrees": [B1.min_generator_degree(),
                                                           B2.min_generator_degree()]})
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codim4cy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-q", "--quiet", action="store_true", help="no progress on standard error")
    parser.add_argument("--budget-steps", type=int, default=None,
                        help="abort Gröbner runs after this many reduction steps (exit 3)")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, func, help_text, ideal=False, seed=True, prime=False, e=False):
        p = sub.add_parser(name, help=help_text)
        if ideal:
            p.add_argument("ideal", help="ideal file ('ring p=.. n=..' header, one form per line)")
        if prime:
            p.add_argument("--prime", type=int, default=101)
        if seed:
            p.add_argument("--seed", type=int, default=None if ideal else 0)
        if e:
            p.add_argument("--e", type=int, default=None, help="degree of the random triples")
        p.add_argument("-o", dest="output", default=None, help="also write the text output here")
        p.add_argument("--json", default=None, help="write a JSON document here")
        p.set_defaults(func=func)
        return p

    p = add("construct", cmd_construct, "build a preset ideal", prime=True)
    p.add_argument("preset", help=f"one of {', '.join(sorted(PRESETS))}")
    add("betti", cmd_betti, "Betti table of a minimal free resolution", ideal=True, seed=False)
    add("hilbert", cmd_hilbert, "Hilbert polynomial and Calabi-Yau invariants", ideal=True, seed=False)
    p = add("smooth", cmd_smooth, "coarse smoothness test", ideal=True, e=True)
    p.set_defaults(e=3)
    add("invariants", cmd_invariants, "full invariant report of an ideal file", ideal=True, e=True)
    add("rho", cmd_rho, "vanishing criterion for Picard number one", ideal=True, seed=False)
    p = add("verify-complex", cmd_verify_complex, "check a constructed complex", prime=True)
    p.add_argument("--family", choices=["km", "gn", "pf"], required=True)
    p.add_argument("--preset", required=True)
    p = add("reproduce", cmd_reproduce, "construct a preset and report its invariants", prime=True)
    p.add_argument("example", help="preset name")
    p.add_argument("--seed-budget", type=int, default=10)
    p = add("distinguish", cmd_distinguish, "compare smallest generator degrees", seed=False)
    p.add_argument("first", help="Betti table file (pretty or JSON)")
    p.add_argument("second")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    if args.verb == "smooth" and args.seed is None:
        args.seed = 0
    for key in ("preset", "example"):
        name = getattr(args, key, None)
        if name is not None and name not in PRESETS:
            print(f"error: unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}", file=sys.stderr)
            return 1
    try:
        with step_budget(args.budget_steps):
            return args.func(args)
    except ResourceBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _VerdictFailure as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        return 2
    except (IdealFormatError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
