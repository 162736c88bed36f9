"""Boolean formulas over sign atoms, their parser, and composite complexities.

Grammar (whitespace insignificant)::

    formula    := or
    or         := and ("|" and)*
    and        := unary ("&" unary)*
    unary      := "!" unary | "(" formula ")" | atom
    atom       := poly relop "0"
    relop      := "=" | ">" | "<" | ">=" | "<="
    poly       := ["+"|"-"] term (("+"|"-") term)*
    term       := coeff ("*" var_power)* | var_power ("*"? var_power)*
    var_power  := "x" INT ("^" INT)?
    coeff      := INT | INT "/" INT
    quantified := block+ ":" formula
    block      := ("E"|"A") "(" INT ")"

Variables are ``x0 .. x{N-1}``.  In a quantified formula the free variables
come first, followed by each block's variables in prefix order, so the
innermost block owns the highest indices.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, Union

from .complexity import ComplexityMeasure, ComplexityVector, fold_complexity
from .polynomial import Polynomial, Rational


class Rel(enum.Enum):
    EQ = "="
    GT = ">"
    LT = "<"
    GE = ">="
    LE = "<="

    def holds(self, sign: int) -> bool:
        return {
            Rel.EQ: sign == 0,
            Rel.GT: sign > 0,
            Rel.LT: sign < 0,
            Rel.GE: sign >= 0,
            Rel.LE: sign <= 0,
        }[self]

    @property
    def strict(self) -> bool:
        return self in (Rel.GT, Rel.LT)


@dataclass(frozen=True)
class AbstractFunction:
    """A function known only through its complexity vector."""

    cvec: ComplexityVector
    label: str = "f"

    def __str__(self) -> str:
        return self.label


FunctionDescriptor = Union[Polynomial, AbstractFunction]


def is_concrete(fn: FunctionDescriptor) -> bool:
    return isinstance(fn, Polynomial)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    fn: FunctionDescriptor
    rel: Rel


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...] = ()


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...] = ()


@dataclass(frozen=True)
class Not:
    child: "Formula"


Formula = Union[Atom, And, Or, Not]

TRUE = And(())
FALSE = Or(())


def conj(*parts: Formula) -> Formula:
    return And(tuple(parts))


def disj(*parts: Formula) -> Formula:
    return Or(tuple(parts))


class FormulaClass(enum.Enum):
    CLOSED = "closed"
    OPEN = "open"
    MIXED = "mixed"


_NEGATED = {Rel.GT: Rel.LE, Rel.LT: Rel.GE, Rel.GE: Rel.LT, Rel.LE: Rel.GT}


def normalize(f: Formula) -> Formula:
    """Push negations to the atoms, flatten nested And/Or, drop singletons."""
    return _norm(f, negate=False)


def _norm(f: Formula, negate: bool) -> Formula:
    if isinstance(f, Not):
        return _norm(f.child, not negate)
    if isinstance(f, Atom):
        if not negate:
            return f
        if f.rel is Rel.EQ:
            return Or((Atom(f.fn, Rel.GT), Atom(f.fn, Rel.LT)))
        return Atom(f.fn, _NEGATED[f.rel])
    is_and = isinstance(f, And)
    if negate:
        is_and = not is_and
    cls = And if is_and else Or
    kids: list[Formula] = []
    for child in f.children:
        c = _norm(child, negate)
        if isinstance(c, cls):
            kids.extend(c.children)
        else:
            kids.append(c)
    if len(kids) == 1:
        return kids[0]
    return cls(tuple(kids))


def iter_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from iter_atoms(f.child)
    else:
        for c in f.children:
            yield from iter_atoms(c)


def atoms_of(f: Formula) -> tuple[int, list[FunctionDescriptor]]:
    """Distinct functions occurring in ``f`` (first-occurrence order) and their count."""
    seen: dict[FunctionDescriptor, None] = {}
    for a in iter_atoms(f):
        seen.setdefault(a.fn, None)
    fns = list(seen)
    return len(fns), fns


def classify(f: Formula) -> FormulaClass:
    """Closed if only ``=, >=, <=`` atoms occur, Open if only strict ones, else Mixed.

    The input is normalized first, so negations are accounted for.
    """
    rels = {a.rel for a in iter_atoms(normalize(f))}
    if all(not r.strict for r in rels):
        return FormulaClass.CLOSED
    if all(r.strict for r in rels):
        return FormulaClass.OPEN
    return FormulaClass.MIXED


def map_atoms(f: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return Not(map_atoms(f.child, fn))
    return type(f)(tuple(map_atoms(c, fn) for c in f.children))


def evaluate(f: Formula, point: Sequence[Rational]) -> bool:
    """Exact membership test of a rational point."""
    if isinstance(f, Atom):
        if not isinstance(f.fn, Polynomial):
            raise TypeError("cannot evaluate an abstract function")
        return f.rel.holds(f.fn.sign_at(point))
    if isinstance(f, Not):
        return not evaluate(f.child, point)
    if isinstance(f, And):
        return all(evaluate(c, point) for c in f.children)
    return any(evaluate(c, point) for c in f.children)


def n_vars_of(f: Formula) -> int:
    """Number of variables needed to evaluate ``f`` (highest index used + 1)."""
    return max(
        (a.fn.max_var_index() + 1 for a in iter_atoms(f) if isinstance(a.fn, Polynomial)),
        default=0,
    )


def is_concrete_formula(f: Formula) -> bool:
    return all(isinstance(a.fn, Polynomial) for a in iter_atoms(f))


def lift_formula(f: Formula, n_vars: int) -> Formula:
    """Re-embed every polynomial into ``n_vars`` variables."""

    def lift(a: Atom) -> Formula:
        if isinstance(a.fn, Polynomial):
            return Atom(a.fn.with_n_vars(n_vars), a.rel)
        return a

    return map_atoms(f, lift)


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def to_text(f: Formula) -> str:
    """Render in the grammar.  ``TRUE``/``FALSE`` print as ``0 = 0``/``1 = 0``."""
    return _print(f, 0)


def _print(f: Formula, ctx: int) -> str:
    # ctx: 0 = top level or inside an Or, 1 = inside an And, 2 = And nested in And
    if isinstance(f, Atom):
        if isinstance(f.fn, AbstractFunction):
            raise TypeError("abstract functions have no textual form")
        return f"{f.fn.to_text()} {f.rel.value} 0"
    if isinstance(f, Not):
        return "!(" + _print(f.child, 0) + ")"
    if not f.children:
        return "0 = 0" if isinstance(f, And) else "1 = 0"
    if len(f.children) == 1:
        return _print(f.children[0], ctx)
    if isinstance(f, And):
        text = " & ".join(_print(c, 2 if isinstance(c, And) else 1) for c in f.children)
        return _wrap(text, ctx >= 2)
    # a nested Or keeps its parentheses so reparsing gives the same tree
    text = " | ".join(_print(c, 1 if isinstance(c, Or) else 0) for c in f.children)
    return _wrap(text, ctx >= 1)


def _wrap(text: str, paren: bool) -> str:
    return f"({text})" if paren else text


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str, offset: int):
        self.offset = offset
        self.line = text.count("\n", 0, offset) + 1
        self.column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        self.message = message
        super().__init__(f"line {self.line}, column {self.column}: {message}")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


_SINGLE = {
    "+": "PLUS",
    "-": "MINUS",
    "*": "STAR",
    "/": "SLASH",
    "^": "CARET",
    "(": "LPAREN",
    ")": "RPAREN",
    "&": "AND",
    "|": "OR",
    ":": "COLON",
    "=": "REL",
}


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("INT", text[i:j], i))
            i = j
            continue
        if ch == "x":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise FormulaSyntaxError("variable needs an index, e.g. x0", text, i)
            toks.append(_Tok("VAR", text[i:j], i))
            i = j
            continue
        if ch in "<>":
            if i + 1 < n and text[i + 1] == "=":
                toks.append(_Tok("REL", text[i : i + 2], i))
                i += 2
            else:
                toks.append(_Tok("REL", ch, i))
                i += 1
            continue
        if ch == "!":
            toks.append(_Tok("NOT", ch, i))
            i += 1
            continue
        if ch in "EA":
            toks.append(_Tok("QUANT", ch, i))
            i += 1
            continue
        if ch in _SINGLE:
            toks.append(_Tok(_SINGLE[ch], ch, i))
            i += 1
            continue
        raise FormulaSyntaxError(f"unexpected character {ch!r}", text, i)
    toks.append(_Tok("EOF", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, n_vars: int | None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.n_vars = n_vars
        self.max_index = -1
        # atoms hold raw exponent dicts until the variable count is known
        self.raw_polys: list[dict[tuple[int, ...], Fraction]] = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> FormulaSyntaxError:
        tok = tok or self.tok
        return FormulaSyntaxError(msg, self.text, tok.pos)

    def expect(self, kind: str, what: str) -> _Tok:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {what}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str) -> _Tok | None:
        if self.tok.kind == kind:
            t = self.tok
            self.i += 1
            return t
        return None

    # formula layer
    def formula(self):
        kids = [self.and_()]
        while self.accept("OR"):
            kids.append(self.and_())
        return kids[0] if len(kids) == 1 else ("or", kids)

    def and_(self):
        kids = [self.unary()]
        while self.accept("AND"):
            kids.append(self.unary())
        return kids[0] if len(kids) == 1 else ("and", kids)

    def unary(self):
        if self.accept("NOT"):
            return ("not", self.unary())
        if self.accept("LPAREN"):
            inner = self.formula()
            self.expect("RPAREN", "')'")
            return inner
        return self.atom()

    def atom(self):
        poly = self.poly()
        rel = self.expect("REL", "a relation (=, >, <, >=, <=)")
        zero = self.tok
        if zero.kind != "INT" or int(zero.text) != 0:
            raise self.error("right-hand side of a relation must be 0")
        self.i += 1
        self.raw_polys.append(poly)
        return ("atom", len(self.raw_polys) - 1, Rel(rel.text))

    # polynomial layer
    def poly(self) -> dict[tuple[int, ...], Fraction]:
        acc: dict[tuple[int, ...], Fraction] = {}
        sign = 1
        if self.tok.kind in ("PLUS", "MINUS"):
            sign = -1 if self.tok.kind == "MINUS" else 1
            op = self.tok
            self.i += 1
            self._term_into(acc, sign, op)
        else:
            self._term_into(acc, 1, None)
        while self.tok.kind in ("PLUS", "MINUS"):
            op = self.tok
            sign = -1 if op.kind == "MINUS" else 1
            self.i += 1
            self._term_into(acc, sign, op)
        return acc

    def _term_into(self, acc, sign: int, op: _Tok | None) -> None:
        if self.tok.kind not in ("INT", "VAR"):
            if op is not None:
                raise self.error(f"dangling {op.text!r}: expected a term after it", op)
            found = self.tok.text or "end of input"
            raise self.error(f"expected a polynomial term, found {found!r}")
        coeff = Fraction(sign)
        powers: dict[int, int] = {}
        if self.tok.kind == "INT":
            num = int(self.tok.text)
            self.i += 1
            if self.accept("SLASH"):
                den_tok = self.expect("INT", "a denominator")
                den = int(den_tok.text)
                if den == 0:
                    raise self.error("zero denominator", den_tok)
                coeff *= Fraction(num, den)
            else:
                coeff *= num
            while self.accept("STAR"):
                self._var_power(powers)
            while self.tok.kind == "VAR":
                self._var_power(powers)
        else:
            self._var_power(powers)
            while self.tok.kind == "VAR" or (
                self.tok.kind == "STAR" and self.toks[self.i + 1].kind == "VAR"
            ):
                self.accept("STAR")
                self._var_power(powers)
        key = tuple(sorted(powers.items()))
        acc[key] = acc.get(key, Fraction(0)) + coeff

    def _var_power(self, powers: dict[int, int]) -> None:
        var = self.expect("VAR", "a variable")
        idx = int(var.text[1:])
        if self.n_vars is not None and idx >= self.n_vars:
            raise self.error(f"unknown variable {var.text} (only x0..x{self.n_vars - 1})", var)
        exp = 1
        if self.accept("CARET"):
            exp = int(self.expect("INT", "an exponent").text)
        powers[idx] = powers.get(idx, 0) + exp
        self.max_index = max(self.max_index, idx)

    def build(self, tree, n: int) -> Formula:
        polys: dict[Polynomial, Polynomial] = {}

        def poly_of(k: int) -> Polynomial:
            coeffs = {}
            for key, c in self.raw_polys[k].items():
                e = [0] * n
                for idx, p in key:
                    e[idx] = p
                coeffs[tuple(e)] = c
            p = Polynomial.from_dict(n, coeffs)
            return polys.setdefault(p, p)

        def go(t) -> Formula:
            tag = t[0]
            if tag == "atom":
                return Atom(poly_of(t[1]), t[2])
            if tag == "not":
                return Not(go(t[1]))
            kids = tuple(go(c) for c in t[1])
            return And(kids) if tag == "and" else Or(kids)

        return go(tree)


def parse_formula(text: str, n_vars: int | None = None) -> Formula:
    """Parse a quantifier-free formula.

    All polynomials share one variable count: ``n_vars`` when given
    (indices beyond it are an error), otherwise the highest index used + 1.
    """
    p = _Parser(text, n_vars)
    tree = p.formula()
    if p.tok.kind != "EOF":
        raise p.error(f"unexpected {p.tok.text!r}")
    n = n_vars if n_vars is not None else p.max_index + 1
    return p.build(tree, n)


# ---------------------------------------------------------------------------
# quantified formulas
# ---------------------------------------------------------------------------


class Quantifier(enum.Enum):
    EXISTS = "E"
    FORALL = "A"

    @property
    def dual(self) -> "Quantifier":
        return Quantifier.FORALL if self is Quantifier.EXISTS else Quantifier.EXISTS


@dataclass(frozen=True)
class QuantifiedFormula:
    """``{x_0 : Q_1 x_1 ... Q_nu x_nu  matrix(x_0, ..., x_nu)}``."""

    blocks: tuple[tuple[Quantifier, int], ...]
    free_dim: int
    matrix: Formula

    def __post_init__(self) -> None:
        if not self.blocks:
            raise ValueError("a quantified formula needs at least one block")
        if self.free_dim < 0:
            raise ValueError("free_dim must be non-negative")
        for q, w in self.blocks:
            if w < 1:
                raise ValueError(f"block width must be positive, got {w}")
        for (q1, _), (q2, _) in zip(self.blocks, self.blocks[1:]):
            if q1 is q2:
                raise ValueError("adjacent quantifier blocks must alternate; merge equal blocks")
        used = n_vars_of(self.matrix)
        if used > self.total_dim:
            raise ValueError(
                f"matrix uses x{used - 1} but only {self.total_dim} variables are bound or free"
            )

    @property
    def nu(self) -> int:
        return len(self.blocks)

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.free_dim,) + tuple(w for _, w in self.blocks)

    @property
    def total_dim(self) -> int:
        return sum(self.widths)

    def block_indices(self, j: int) -> range:
        """Variable indices owned by block ``j`` (0 is the free block)."""
        start = sum(self.widths[:j])
        return range(start, start + self.widths[j])

    def to_text(self) -> str:
        prefix = " ".join(f"{q.value}({w})" for q, w in self.blocks)
        return f"{prefix} : {to_text(self.matrix)}"


def parse_quantified(text: str, free_dim: int) -> QuantifiedFormula:
    p = _Parser(text, None)
    blocks: list[tuple[Quantifier, int]] = []
    while p.tok.kind == "QUANT":
        q = Quantifier(p.tok.text)
        p.i += 1
        p.expect("LPAREN", "'('")
        width = int(p.expect("INT", "a block width").text)
        p.expect("RPAREN", "')'")
        blocks.append((q, width))
    if not blocks:
        raise p.error("expected a quantifier block E(n) or A(n)")
    p.expect("COLON", "':' after the quantifier prefix")
    total = free_dim + sum(w for _, w in blocks)
    p.n_vars = total
    tree = p.formula()
    if p.tok.kind != "EOF":
        raise p.error(f"unexpected {p.tok.text!r}")
    try:
        return QuantifiedFormula(tuple(blocks), free_dim, p.build(tree, total))
    except ValueError as exc:
        raise FormulaSyntaxError(str(exc), text, 0) from None


def looks_quantified(text: str) -> bool:
    return text.lstrip()[:1] in ("E", "A")


# ---------------------------------------------------------------------------
# composite complexities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SumSquaresPlusNorm:
    """``f_1^2 + ... + f_m^2 + |x|^2``."""

    fs: tuple


@dataclass(frozen=True)
class NormTimesProduct:
    """``|x|^2 f_1 ... f_p``."""

    fs: tuple


@dataclass(frozen=True)
class MixedRecipe:
    """``|x|^2 (f_1^2 + ... + f_m^2)^2 g_1 ... g_q``; the squared factor is absent if there are no equations."""

    eqs: tuple
    ineqs: tuple


Recipe = Union[SumSquaresPlusNorm, NormTimesProduct, MixedRecipe]


def descriptor_complexity(measure: ComplexityMeasure, fn) -> ComplexityVector:
    """Complexity vector of a function descriptor (or a raw vector)."""
    if isinstance(fn, Polynomial):
        if fn.is_constant:
            return measure.zero
        return measure.check(measure.polynomial(fn.degree), "polynomial complexity")
    if isinstance(fn, AbstractFunction):
        return measure.check(fn.cvec, f"complexity of {fn.label}")
    return measure.check(tuple(fn))


def composite_complexity(measure: ComplexityMeasure, recipe: Recipe, n: int) -> ComplexityVector:
    norm = measure.norm_squared(n)
    if isinstance(recipe, SumSquaresPlusNorm):
        if not recipe.fs:
            raise ValueError("SumSquaresPlusNorm needs at least one function")
        cs = [descriptor_complexity(measure, f) for f in recipe.fs]
        return fold_complexity(measure, "plus", [measure.times(c, c) for c in cs] + [norm])
    if isinstance(recipe, NormTimesProduct):
        if not recipe.fs:
            raise ValueError("NormTimesProduct needs at least one function")
        cs = [descriptor_complexity(measure, f) for f in recipe.fs]
        return fold_complexity(measure, "times", [norm] + cs)
    if isinstance(recipe, MixedRecipe):
        if not recipe.eqs and not recipe.ineqs:
            raise ValueError("MixedRecipe needs at least one equation or inequality")
        factors = [norm]
        if recipe.eqs:
            eq_cs = [descriptor_complexity(measure, f) for f in recipe.eqs]
            sq_sum = fold_complexity(measure, "plus", [measure.times(c, c) for c in eq_cs])
            factors.append(measure.times(sq_sum, sq_sum))
        factors.extend(descriptor_complexity(measure, f) for f in recipe.ineqs)
        return fold_complexity(measure, "times", factors)
    raise TypeError(f"unknown recipe {recipe!r}")


def expand_recipe(recipe: Recipe, n: int) -> Polynomial:
    """The literal polynomial a recipe describes, for concrete inputs."""
    norm = Polynomial.norm_squared(n)

    def polys(fs: Iterable) -> list[Polynomial]:
        out = list(fs)
        if not all(isinstance(p, Polynomial) for p in out):
            raise TypeError("expand_recipe needs concrete polynomials")
        return [p.with_n_vars(max(n, p.n_vars)) for p in out]

    if isinstance(recipe, SumSquaresPlusNorm):
        out = norm
        for p in polys(recipe.fs):
            out = out + p * p
        return out
    if isinstance(recipe, NormTimesProduct):
        out = norm
        for p in polys(recipe.fs):
            out = out * p
        return out
    out = norm
    if recipe.eqs:
        sq = Polynomial(n)
        for p in polys(recipe.eqs):
            sq = sq + p * p
        out = out * sq * sq
    for p in polys(recipe.ineqs):
        out = out * p
    return out
