from fractions import Fraction
from pathlib import Path

import sympy
from hypothesis import settings

from arborcert import Poly, RatMap, cli, parse_map

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

Z = sympy.Symbol("z")

# maps used wherever a "regression corpus" of maps is needed
CORPUS = [
    "z^2+1",
    "z^2-2",
    "z^2-z",
    "z^2+3",
    "z^3-3z+1",
    "z^3+7z^2-7",
    "z^3 - 6012/2755 z^2 + 12636/13775 z + 54/95",
    "(z^2-4z+1)/(2z)",
    "(z^2-12z+1)/(10z)",
    "(z^2+1)/(-2z)",
]


def to_sympy(p: Poly):
    return sum((sympy.Rational(c.numerator, c.denominator) * Z ** i for i, c in enumerate(p.coeffs)), sympy.Integer(0))


def from_sympy(expr) -> Poly:
    cs = sympy.Poly(expr, Z).all_coeffs()[::-1]
    return Poly(Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in cs)


def sympy_map(f: RatMap):
    return to_sympy(f.num) / to_sympy(f.den)


def M(text: str) -> RatMap:
    return parse_map(text)


GOLDEN = Path(__file__).parent / "golden"


def run_cli(args, tmp_path):
    """Run the CLI in-process with --golden; return (exit code, produced file, stored golden)."""
    code = cli.main(list(args) + ["--golden", str(tmp_path)])
    produced = sorted(tmp_path.glob("*.json"))
    assert len(produced) == 1
    return code, produced[0], GOLDEN / produced[0].name


ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
