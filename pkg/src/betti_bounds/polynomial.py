"""Sparse multivariate polynomials with exact rational coefficients.

Polynomials are immutable and hashable so that textually identical functions
in a formula collapse onto one descriptor.  Variables are ``x0 .. x{n-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Union[int, Fraction]
Exponent = tuple[int, ...]


def _as_fraction(c: Rational) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


@dataclass(frozen=True)
class Polynomial:
    """Sparse polynomial ``sum c_e x^e`` over the rationals.

    ``terms`` is kept sorted and free of zero coefficients, which makes
    structural equality coincide with polynomial equality.
    """

    n_vars: int
    terms: tuple[tuple[Exponent, Fraction], ...] = ()

    def __post_init__(self) -> None:
        if self.n_vars < 0:
            raise ValueError("n_vars must be non-negative")
        for exp, _ in self.terms:
            if len(exp) != self.n_vars:
                raise ValueError(f"exponent {exp} does not have {self.n_vars} entries")

    # -- construction ----------------------------------------------------

    @classmethod
    def from_dict(cls, n_vars: int, coeffs: Mapping[Exponent, Rational]) -> "Polynomial":
        acc: dict[Exponent, Fraction] = {}
        for exp, c in coeffs.items():
            exp = tuple(int(e) for e in exp)
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            acc[exp] = acc.get(exp, Fraction(0)) + _as_fraction(c)
        items = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        return cls(n_vars, items)

    @classmethod
    def constant(cls, n_vars: int, c: Rational) -> "Polynomial":
        return cls.from_dict(n_vars, {(0,) * n_vars: c})

    @classmethod
    def variable(cls, n_vars: int, index: int) -> "Polynomial":
        if not 0 <= index < n_vars:
            raise IndexError(f"x{index} out of range for {n_vars} variables")
        exp = tuple(1 if i == index else 0 for i in range(n_vars))
        return cls(n_vars, ((exp, Fraction(1)),))

    @classmethod
    def norm_squared(cls, n_vars: int) -> "Polynomial":
        """``|x|^2 = x0^2 + ... + x{n-1}^2``."""
        return cls.from_dict(
            n_vars, {tuple(2 if i == j else 0 for i in range(n_vars)): 1 for j in range(n_vars)}
        )

    # -- inspection ------------------------------------------------------

    def as_dict(self) -> dict[Exponent, Fraction]:
        return dict(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e, _ in self.terms)

    @property
    def degree(self) -> int:
        """Total degree; constants (including zero) have degree 0."""
        return max((sum(e) for e, _ in self.terms), default=0)

    @property
    def constant_term(self) -> Fraction:
        zero = (0,) * self.n_vars
        for e, c in self.terms:
            if e == zero:
                return c
        return Fraction(0)

    def without_constant(self) -> "Polynomial":
        zero = (0,) * self.n_vars
        return Polynomial(self.n_vars, tuple((e, c) for e, c in self.terms if e != zero))

    def max_var_index(self) -> int:
        """Largest variable index that actually occurs, or -1."""
        idx = -1
        for e, _ in self.terms:
            for i, k in enumerate(e):
                if k and i > idx:
                    idx = i
        return idx

    def with_n_vars(self, n_vars: int) -> "Polynomial":
        """Embed into a ring with more variables (or drop unused trailing ones)."""
        if n_vars == self.n_vars:
            return self
        if n_vars < self.n_vars and self.max_var_index() >= n_vars:
            raise ValueError("cannot drop a variable that occurs in the polynomial")
        if n_vars > self.n_vars:
            pad = (0,) * (n_vars - self.n_vars)
            return Polynomial(n_vars, tuple((e + pad, c) for e, c in self.terms))
        return Polynomial(n_vars, tuple((e[:n_vars], c) for e, c in self.terms))

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other: "Polynomial | Rational") -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.n_vars != self.n_vars:
                n = max(self.n_vars, other.n_vars)
                return other.with_n_vars(n)
            return other
        return Polynomial.constant(self.n_vars, other)

    def _lift(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        n = max(self.n_vars, other.n_vars)
        return self.with_n_vars(n), other.with_n_vars(n)

    def __add__(self, other: "Polynomial | Rational") -> "Polynomial":
        a, b = self._lift(self._coerce(other))
        acc = a.as_dict()
        for e, c in b.terms:
            acc[e] = acc.get(e, Fraction(0)) + c
        return Polynomial.from_dict(a.n_vars, acc)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n_vars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "Polynomial | Rational") -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Rational) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other: "Polynomial | Rational") -> "Polynomial":
        a, b = self._lift(self._coerce(other))
        acc: dict[Exponent, Fraction] = {}
        for e1, c1 in a.terms:
            for e2, c2 in b.terms:
                e = tuple(x + y for x, y in zip(e1, e2))
                acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return Polynomial.from_dict(a.n_vars, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.n_vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- evaluation ------------------------------------------------------

    def __call__(self, point: Sequence[Rational]) -> Fraction:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        if len(point) < self.n_vars:
            raise ValueError(f"need {self.n_vars} coordinates, got {len(point)}")
        pt = [_as_fraction(p) for p in point]
        total = Fraction(0)
        for e, c in self.terms:
            v = c
            for x, k in zip(pt, e):
                if k:
                    v *= x**k
            total += v
        return total

    def sign_at(self, point: Sequence[Rational]) -> int:
        v = self.evaluate(point)
        return (v > 0) - (v < 0)

    # -- text ------------------------------------------------------------

    def to_text(self) -> str:
        """Render in the formula grammar (``3/4*x0^2*x1 - x2 + 1``)."""
        if not self.terms:
            return "0"
        # highest degree first reads naturally
        ordered = sorted(self.terms, key=lambda t: (-sum(t[0]), tuple(-k for k in t[0])))
        parts: list[str] = []
        for i, (e, c) in enumerate(ordered):
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            vars_ = [f"x{j}" + (f"^{k}" if k > 1 else "") for j, k in enumerate(e) if k]
            coeff = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if vars_ and mag == 1:
                body = "*".join(vars_)
            else:
                body = "*".join([coeff] + vars_)
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_text()


def sum_of_squares(polys: Iterable[Polynomial]) -> Polynomial:
    polys = list(polys)
    n = max((p.n_vars for p in polys), default=0)
    out = Polynomial(n)
    for p in polys:
        out = out + p * p
    return out
