"""Command line front end.

Every command builds one report dict; JSON output is that dict with a
schema tag, text output is a flattened rendering of the same dict.

Exit codes: 0 success, 1 verdict differs from --expect, 2 input error,
3 resource cap hit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .certificates import (
    CUBIC_POLY,
    DEFAULT_LEVELS,
    DEFAULT_PRIME_BOUND,
    QUAD_POLY,
    QUAD_RATMAP,
    HypothesisError,
    analyze,
    thread_cap,
)
from .dynamics import (
    DegreeError,
    IrrationalCriticalPoints,
    critical_orbits,
    disc_iterate_formula,
    disc_iterate_oracle,
    is_pcf,
    orbit,
    stability_report,
)
from .exact import INFINITY, DegreeCapExceeded, Poly, RatMap, fraction_str
from .family import FamilyCapExceeded, FamilyError, fb_certify, fb_sequences
from .parse import ParseError, parse_map
from .polyfactor import DEFAULT_DEGREE_CAP, FactorizationCapExceeded

SCHEMA = "1"
EXIT_OK, EXIT_EXPECT, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
_SAFE_INT = 2 ** 53


class InputError(ValueError):
    pass


def _clean(obj):
    """Big ints and fractions become strings; everything else passes through."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) < _SAFE_INT else str(obj)
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if obj is INFINITY:
        return "inf"
    return obj


def _map(text: str, min_degree: int = 2) -> RatMap:
    f = parse_map(text)
    if f.degree < min_degree:
        raise InputError(f"map {f} has degree {f.degree} < {min_degree}")
    return f


def _point(text: str):
    if text.strip().lower() in ("inf", "infinity"):
        return INFINITY
    try:
        return Fraction(text.strip())
    except ValueError as exc:
        raise InputError(f"bad point {text!r}") from exc


def _positive(name: str, v: int) -> int:
    if v < 1:
        raise InputError(f"--{name} must be positive")
    return v


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_orbit(args) -> dict:
    f = _map(args.map)
    rec = orbit(f, _point(args.point), _positive("max-steps", args.max_steps))
    return {"map": str(f), "orbit": rec.to_json(), "verdict": rec.status}


def cmd_pcf(args) -> dict:
    f = _map(args.map)
    status = is_pcf(f, args.max_steps)
    return {"map": str(f), "verdict": status,
            "critical_orbits": [o.to_json() for o in critical_orbits(f, args.max_steps)]}


def cmd_stability(args) -> dict:
    f = _map(args.map)
    rep = stability_report(f, _positive("levels", args.levels), args.degree_cap)
    out = rep.to_json()
    out["counts"] = [lv.factor_count for lv in rep.levels]
    out["map"] = str(f)
    return out


def cmd_disc(args) -> dict:
    f = _map(args.map)
    if not f.is_polynomial:
        raise InputError("disc needs a polynomial map")
    n = _positive("iterate", args.iterate)
    t = _point(args.t)
    if t is INFINITY:
        raise InputError("t must be finite")
    formula = disc_iterate_formula(f.num, n, t)
    out = {"map": str(f), "n": n, "t": fraction_str(t), "formula": str(formula)}
    if args.oracle:
        oracle = disc_iterate_oracle(f.num, n, t)
        out["oracle"] = str(oracle)
        out["agreement"] = formula == oracle
        out["agreement_up_to_sign"] = abs(formula) == abs(oracle)
        out["verdict"] = "agree" if formula == oracle else "disagree"
    return out


def cmd_certify(args) -> dict:
    f = _map(args.map)
    rep = analyze(f, _positive("levels", args.levels), args.prime_bound, args.kind, args.degree_cap, strict=True)
    return rep.to_json()


def _family_one(b: int, levels: int, with_sequences: bool) -> dict:
    rep = fb_certify(b, levels)
    out = rep.to_json()
    if with_sequences:
        out["sequences"] = fb_sequences(b, levels).to_json()["levels"]
    return out


def _b_range(text: str) -> list[int]:
    try:
        lo, hi = (int(s) for s in text.split(".."))
    except ValueError as exc:
        raise InputError(f"bad range {text!r}; expected a..b") from exc
    if lo > hi:
        raise InputError("empty range")
    return [b for b in range(lo, hi + 1) if b not in (1, -1)]


def cmd_family(args) -> dict:
    levels = _positive("levels", args.levels)
    if args.b is not None:
        if args.b in (1, -1):
            raise InputError(f"b = {args.b} is excluded")
        return _family_one(args.b, levels, args.sequences)
    bs = _b_range(args.b_range)
    workers = thread_cap()
    if workers > 1 and len(bs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_family_one, bs, [levels] * len(bs), [args.sequences] * len(bs)))
    else:
        results = [_family_one(b, levels, args.sequences) for b in bs]
    records = sorted(results, key=lambda r: r["b"])
    summary = {}
    for r in records:
        summary[r["verdict"]] = summary.get(r["verdict"], 0) + 1
    qualifying = [r for r in records if r["proven_class"]]
    verdict = "AllQualifyingIndexOne" if all(r["verdict"] == "IndexOne" for r in qualifying) else "QualifyingGap"
    return {"range": args.b_range, "levels": levels, "records": records, "summary": summary, "verdict": verdict}


def _random_cubic(rng: random.Random) -> Poly:
    # f' = 3(z - r)(z - s) keeps the critical points rational
    while True:
        r, s = rng.randint(-9, 9), rng.randint(-9, 9)
        a2 = Fraction(-3 * (r + s), 2)
        a1 = 3 * r * s
        if a2.denominator == 1 and abs(a2) <= 9 and abs(a1) <= 9:
            return Poly([rng.randint(-9, 9), a1, a2, 1])


def _random_quadratic(rng: random.Random) -> Poly:
    return Poly([rng.randint(-9, 9), rng.randint(-9, 9), 1])


def cmd_sweep(args) -> dict:
    """Discriminant formula against the resultant route on random maps."""
    rng = random.Random(args.seed)
    mismatches = []
    checked = 0
    for i in range(_positive("count", args.count)):
        f = _random_quadratic(rng) if i % 2 == 0 else _random_cubic(rng)
        for n in range(1, args.max_n + 1):
            for _ in range(3):
                t = rng.randint(-9, 9)
                a = disc_iterate_formula(f, n, t)
                b = disc_iterate_oracle(f, n, t)
                checked += 1
                if a != b:
                    mismatches.append({"map": str(RatMap.polynomial(f)), "n": n, "t": t,
                                       "formula": str(a), "oracle": str(b)})
    return {"seed": args.seed, "checked": checked, "mismatches": mismatches,
            "verdict": "agree" if not mismatches else "disagree"}


COMMANDS = {
    "orbit": cmd_orbit,
    "pcf": cmd_pcf,
    "stability": cmd_stability,
    "disc": cmd_disc,
    "certify": cmd_certify,
    "family": cmd_family,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _config(args) -> dict:
    skip = {"func", "format", "golden", "expect"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render_json(command: str, config: dict, result: dict) -> str:
    doc = {"schema": SCHEMA, "version": __version__, "command": command, "config": config, "result": result}
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, obj, lines: list[str]) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], lines)
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, lines)
    else:
        text = json.dumps(obj) if isinstance(obj, (list, bool)) or obj is None else str(obj)
        if len(text) > 120:
            text = text[:100] + f"... ({len(text)} chars)"
        lines.append(f"{prefix}: {text}")


def render_text(command: str, result: dict) -> str:
    result = _clean(result)
    lines = [f"{command}: {result.get('verdict', 'done')}"]
    _flatten("", result, lines)
    return "\n".join(lines) + "\n"


def golden_path(directory: str, command: str, config: dict) -> Path:
    digest = hashlib.sha256(json.dumps(_clean(config), sort_keys=True).encode()).hexdigest()[:12]
    name = command if command != "certify" else f"certify-{config.get('kind')}"
    return Path(directory) / f"{name}-{digest}.json"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--golden", metavar="DIR", help="also write the JSON report into DIR")
    common.add_argument("--expect", metavar="VERDICT", help="exit 1 unless the verdict starts with VERDICT")
    common.add_argument("--degree-cap", type=int, default=DEFAULT_DEGREE_CAP)

    parser = argparse.ArgumentParser(prog="arborcert", description="Level-maximality certificates for iterated maps over Q.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", parents=[common], help="forward orbit of a point")
    p.add_argument("--map", required=True)
    p.add_argument("--point", default="0")
    p.add_argument("--max-steps", type=int, default=64)

    p = sub.add_parser("pcf", parents=[common], help="post-critical finiteness")
    p.add_argument("--map", required=True)
    p.add_argument("--max-steps", type=int, default=64)

    p = sub.add_parser("stability", parents=[common], help="factor counts of the iterates")
    p.add_argument("--map", required=True)
    p.add_argument("--levels", type=int, default=4)

    p = sub.add_parser("disc", parents=[common], help="discriminant of f^n - t")
    p.add_argument("--map", required=True)
    p.add_argument("--iterate", type=int, default=1)
    p.add_argument("--t", default="0")
    p.add_argument("--oracle", action="store_true", help="also compute it by resultants")

    p = sub.add_parser("certify", parents=[common], help="per-level certificates and a verdict")
    p.add_argument("kind", choices=(QUAD_POLY, CUBIC_POLY, QUAD_RATMAP))
    p.add_argument("--map", required=True)
    p.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    p.add_argument("--prime-bound", type=int, default=DEFAULT_PRIME_BOUND)

    p = sub.add_parser("family", parents=[common], help="the family f_b")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--b", type=int)
    g.add_argument("--b-range", metavar="A..B")
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--sequences", action="store_true", help="include P_n(-1), Q_n(-1) and their odd parts")

    p = sub.add_parser("sweep", parents=[common], help="randomised discriminant cross-check")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--max-n", type=int, default=2)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    command = args.command
    try:
        if args.degree_cap < 1:
            raise InputError("--degree-cap must be positive")
        result = COMMANDS[command](args)
    except (DegreeCapExceeded, FactorizationCapExceeded, FamilyCapExceeded) as exc:
        print(f"arborcert: resource cap hit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, InputError, DegreeError, FamilyError, HypothesisError, IrrationalCriticalPoints) as exc:
        print(f"arborcert: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = _config(args)
    document = render_json(command, config, result)
    if args.golden:
        path = golden_path(args.golden, command, config)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document)
    sys.stdout.write(document if args.format == "json" else render_text(command, result))
    if args.expect is not None and not str(result.get("verdict", "")).startswith(args.expect):
        return EXIT_EXPECT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
