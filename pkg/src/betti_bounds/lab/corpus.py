"""Small concrete sets with known topology, used by the test suites and scripts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..formula import Formula, parse_formula
from ..polynomial import Polynomial


def _norm(n: int) -> Polynomial:
    return Polynomial.norm_squared(n)


def solid_torus_text(R: Fraction = Fraction(1), r: Fraction = Fraction(1, 2)) -> str:
    """``(|x|^2 + R^2 - r^2)^2 - 4R^2 (x0^2 + x1^2) <= 0`` expanded."""
    x = [Polynomial.variable(3, i) for i in range(3)]
    p = (_norm(3) + (R * R - r * r)) ** 2 - 4 * R * R * (x[0] ** 2 + x[1] ** 2)
    return f"{p.to_text()} <= 0"


@dataclass(frozen=True)
class Case:
    name: str
    text: str
    box: Fraction
    res: int
    expected: tuple[int, ...] | None = None  # trimmed Betti vector when the topology is known

    @property
    def formula(self) -> Formula:
        return parse_formula(self.text)


DOMINATION_CORPUS: tuple[Case, ...] = (
    Case("circle", "x0^2 + x1^2 - 1 = 0", Fraction(2), 32, (1, 1)),
    Case("closed disk", "x0^2 + x1^2 - 1 <= 0", Fraction(2), 32, (1,)),
    Case("closed annulus", "x0^2 + x1^2 - 1 >= 0 & x0^2 + x1^2 - 4 <= 0", Fraction(3), 32, (1, 1)),
    Case(
        "three disks",
        "x0^2 + 4*x0 + x1^2 + 15/4 <= 0 | x0^2 + x1^2 - 1/4 <= 0 | x0^2 - 4*x0 + x1^2 + 15/4 <= 0",
        Fraction(3),
        36,
        (3,),
    ),
    Case("punctured disk", "x0^2 + x1^2 - 1 < 0 & !(x0 = 0 & x1 = 0)", Fraction(2), 33, (1, 1)),
    Case("clipped half-plane", "x0 >= 0 & x0^2 + x1^2 - 4 <= 0", Fraction(3), 32, (1,)),
    Case("square minus axes", "x0^2 - 1 < 0 & x1^2 - 1 < 0 & !(x0*x1 = 0)", Fraction(2), 33, (4,)),
    Case(
        "half-open annulus",
        "!(x0^2 + x1^2 - 1 >= 0) & !(x0^2 + x1^2 - 1/4 < 0)",
        Fraction(2),
        32,
        (1, 1),
    ),
    Case("two open intervals", "x0^3 - x0 > 0", Fraction(2), 32, (2,)),
    Case("cubic curve region", "x1^2 - x0^3 + x0 <= 0 & x0^2 + x1^2 - 4 < 0", Fraction(2), 48, (2,)),
    Case("filled lemniscate", "x0^4 + 2*x0^2*x1^2 + x1^4 - 2*x0^2 + 2*x1^2 <= 0", Fraction(2), 49, (1,)),
    Case(
        "split ball",
        "x0^2 + x1^2 + x2^2 - 1 < 0 & !(x2 = 0)",
        Fraction(2),
        17,
        (2,),
    ),
    Case(
        "sphere shell",
        "x0^2 + x1^2 + x2^2 - 1 >= 0 & x0^2 + x1^2 + x2^2 - 4 <= 0",
        Fraction(3),
        24,
        (1, 0, 1),
    ),
    Case("solid torus", solid_torus_text(), Fraction(2), 32, (1, 1)),
)


@dataclass(frozen=True)
class FidelityCase:
    """A set for the construction checks.

    ``radius`` bounds ``X`` for the ``X'`` construction; ``None`` means the
    formula already carries a top-level ball atom.
    """

    name: str
    text: str
    box: Fraction
    res: int
    lam: Fraction
    m: int
    radius: Fraction | None = None
    sign_res: int | None = None
    expected: tuple[int, ...] | None = None

    @property
    def formula(self) -> Formula:
        return parse_formula(self.text)


# Equation bands have width about eps = lam^(2k+2); the circle needs a coarse
# lam and a fine grid for the band to hold cell centers, and an even sign grid
# so that lattice points land on the curve.
FIDELITY_CORPUS: tuple[FidelityCase, ...] = (
    FidelityCase(
        "punctured disk", "x0^2 + x1^2 - 1 < 0 & !(x0 = 0 & x1 = 0)", Fraction(2), 33, Fraction(1, 64), 2,
        expected=(1, 1),
    ),
    FidelityCase(
        "punctured disk coarse", "x0^2 + x1^2 - 1 < 0 & !(x0 = 0 & x1 = 0)", Fraction(2), 33, Fraction(1, 4), 2,
        expected=(1, 1),
    ),
    FidelityCase("closed disk", "x0^2 + x1^2 - 1 <= 0", Fraction(2), 33, Fraction(1, 4), 2, expected=(1,)),
    FidelityCase(
        "open annulus", "x0^2 + x1^2 - 1 > 0 & x0^2 + x1^2 - 4 < 0", Fraction(3), 33, Fraction(1, 64), 2,
        expected=(1, 1),
    ),
    FidelityCase(
        "two open disks",
        "x0^2 + 2*x0 + x1^2 + 3/4 < 0 | x0^2 - 2*x0 + x1^2 + 3/4 < 0",
        Fraction(2), 33, Fraction(1, 64), 2, radius=Fraction(2), expected=(2,),
    ),
    FidelityCase(
        "circle", "x0^2 + x1^2 - 1 = 0", Fraction(2), 64, Fraction(1, 2), 2,
        radius=Fraction(3, 2), sign_res=32, expected=(1, 1),
    ),
    FidelityCase("open ray", "x0 > 0", Fraction(2), 33, Fraction(1, 64), 1, radius=Fraction(1), expected=(1,)),
    FidelityCase(
        "square minus axes", "x0^2 - 1 < 0 & x1^2 - 1 < 0 & !(x0*x1 = 0)", Fraction(2), 33, Fraction(1, 4), 2,
        radius=Fraction(3, 2), expected=(4,),
    ),
    FidelityCase(
        "sphere shell",
        "x0^2 + x1^2 + x2^2 - 1 >= 0 & x0^2 + x1^2 + x2^2 - 4 <= 0",
        Fraction(3), 15, Fraction(1, 4), 3, expected=(1, 0, 1),
    ),
)


def fidelity_rows(case: FidelityCase, field_name="GF2"):
    """``(T vs S, X' vs X)`` comparison rows for one corpus case."""
    from ..formula import And, Atom, Rel, n_vars_of, normalize
    from .constructions import build_T, closed_approximation
    from .verify import compare_sets

    f = case.formula
    n = max(n_vars_of(f), 1)
    sign_res = case.sign_res or case.res
    T = build_T(f, case.lam, case.m, case.box, sign_res, dim=n)
    row_T = compare_sets(f"{case.name}: T", f, T, case.box, case.res, n, field_name)
    Xp = closed_approximation(f, case.lam, case.box, sign_res, case.radius, n)
    X = f
    if case.radius is not None:
        X = normalize(And((f, Atom(_norm(n) - case.radius * case.radius, Rel.LE))))
    row_X = compare_sets(f"{case.name}: X'", X, Xp, case.box, case.res, n, field_name)
    return row_T, row_X
