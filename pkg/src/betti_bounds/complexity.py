"""Axiomatic complexity measures and the derived functions kappa, gamma, Omega.

A measure of arity ``m`` assigns an ``m``-vector of naturals to each function
and supplies rule maps bounding the complexity of sums, products and partial
derivatives, plus a family ``t_n`` bounding the number of solutions of a
square system.  The rules are treated as the *definition* of the propagated
complexity (upper-bound semantics).

Two instances ship: ``degree`` (polynomials, Bezout) and ``pfaffian``
(chain degree, polynomial degree, chain order; Khovanskii).  Further measures
load from a declarative rule file, see :func:`load_measure`.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

ComplexityVector = tuple[int, ...]

BinaryRule = Callable[[ComplexityVector, ComplexityVector], ComplexityVector]
UnaryRule = Callable[[ComplexityVector], ComplexityVector]
SolutionRule = Callable[[Sequence[ComplexityVector]], int]


class ComplexityError(ValueError):
    """Invalid complexity input (arity mismatch, negative entries, ...)."""


class ArityError(ComplexityError):
    pass


class MeasureError(ComplexityError):
    """A user-supplied measure failed validation or evaluation."""


def _clamp(v: int) -> int:
    return v if v > 0 else 0


@dataclass(frozen=True)
class ComplexityMeasure:
    """The pair ``(c, T)``: arity plus the rule maps ``t_+, t_x, t_d, {t_n}``.

    ``coordinate`` is the declared complexity of a coordinate function ``x_j``
    and ``polynomial`` maps a total degree to the complexity this measure
    assigns to a polynomial of that degree.
    """

    name: str
    arity: int
    plus: BinaryRule
    times: BinaryRule
    partial: UnaryRule
    solutions: SolutionRule
    coordinate: ComplexityVector
    polynomial: Callable[[int], ComplexityVector]
    constants_absorb: bool = True
    description: str = field(default="", compare=False)

    @property
    def zero(self) -> ComplexityVector:
        return (0,) * self.arity

    def check(self, c: Sequence[int], what: str = "vector") -> ComplexityVector:
        c = tuple(c)
        if len(c) != self.arity:
            raise ArityError(
                f"{what} {c} has arity {len(c)}, measure {self.name!r} expects {self.arity}"
            )
        for x in c:
            if not isinstance(x, int) or isinstance(x, bool) or x < 0:
                raise ComplexityError(f"{what} {c} has a non-natural entry {x!r}")
        return c

    def norm_squared(self, n: int = 1) -> ComplexityVector:
        """Complexity of ``|x|^2`` in ``n`` variables, propagated through the rules."""
        sq = self.times(self.coordinate, self.coordinate)
        return fold_complexity(self, "plus", [sq] * max(n, 1))

    def __repr__(self) -> str:
        return f"ComplexityMeasure({self.name!r}, arity={self.arity})"


# ---------------------------------------------------------------------------
# generic operations
# ---------------------------------------------------------------------------


def fold_complexity(
    measure: ComplexityMeasure, op: str, vectors: Sequence[Sequence[int]]
) -> ComplexityVector:
    """Left fold of ``t_+`` or ``t_x`` over ``vectors`` (``t_{+,s}``, ``t_{x,s}``)."""
    if op not in ("plus", "times"):
        raise ValueError(f"op must be 'plus' or 'times', got {op!r}")
    if not vectors:
        raise ComplexityError("cannot fold an empty list of complexity vectors")
    rule = measure.plus if op == "plus" else measure.times
    checked = [measure.check(v, f"vector #{i}") for i, v in enumerate(vectors)]
    acc = checked[0]
    for v in checked[1:]:
        acc = measure.check(rule(acc, v), f"{op} rule output")
    return acc


def fold_repeated(measure: ComplexityMeasure, op: str, c: Sequence[int], s: int) -> ComplexityVector:
    """``t*_{+,s}(c)`` / ``t*_{x,s}(c)``: the fold over ``s`` copies of ``c``."""
    if s < 1:
        raise ComplexityError("repeat count must be positive")
    return fold_complexity(measure, op, [tuple(c)] * s)


def partial_complexity(measure: ComplexityMeasure, c: Sequence[int]) -> ComplexityVector:
    c = measure.check(c)
    return measure.check(measure.partial(c), "partial rule output")


def kappa(measure: ComplexityMeasure, c: Sequence[int]) -> ComplexityVector:
    """Complexity of ``dF/dX_i - lambda dF/dX_1`` after a rotation of coordinates."""
    c = measure.check(c)
    d = measure.check(measure.partial(c), "partial rule output")
    scaled = measure.check(measure.times(measure.zero, d), "times rule output")
    return measure.check(measure.plus(d, scaled), "plus rule output")


def gamma(measure: ComplexityMeasure, n: int, c: Sequence[int]) -> int:
    """Bound on the critical points of a projection on ``{F = 0}`` in ``R^n``."""
    if n < 1:
        raise ComplexityError(f"ambient dimension must be >= 1, got {n}")
    c = measure.check(c)
    k = kappa(measure, c)
    value = measure.solutions([c] + [k] * (n - 1))
    if value < 0:
        raise MeasureError(f"t_{n} of measure {measure.name!r} returned a negative value")
    return int(value)


def half_up(x: int) -> int:
    return -(-x // 2)


def omega(
    measure: ComplexityMeasure,
    n: int,
    F: Sequence[Sequence[int]],
    G: Sequence[Sequence[int]] = (),
    square_norm_c: Sequence[int] | None = None,
) -> int:
    """``Omega(F, G)``: max of the half-gamma bounds of the basic perturbed sets.

    Halving rounds up.  ``square_norm_c`` defaults to the measure's own
    complexity of ``|x|^2`` in ``n`` variables.
    """
    if not F and not G:
        raise ComplexityError("Omega needs at least one function in F or G")
    norm = measure.check(square_norm_c, "|x|^2 complexity") if square_norm_c else measure.norm_squared(n)
    g_squares = [measure.times(measure.check(g), g) for g in G]
    base = fold_complexity(measure, "plus", g_squares + [norm])
    best = half_up(gamma(measure, n, base))
    for f in F:
        f = measure.check(f)
        comp = fold_complexity(measure, "plus", [measure.times(f, f)] + g_squares + [norm])
        best = max(best, half_up(gamma(measure, n, comp)))
    return best


def omega_single(measure: ComplexityMeasure, n: int, F: Sequence[Sequence[int]]) -> int:
    """``Omega(F) = max_i gamma(n, c(f_i^2 + |x|^2)) / 2``, the measure used by the quantified bound."""
    if not F:
        raise ComplexityError("Omega(F) needs a non-empty F")
    norm = measure.norm_squared(n)
    return max(
        half_up(gamma(measure, n, fold_complexity(measure, "plus", [measure.times(f, f), norm])))
        for f in (measure.check(v) for v in F)
    )


def componentwise_max(vectors: Iterable[Sequence[int]]) -> ComplexityVector:
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        raise ComplexityError("componentwise max of nothing")
    return tuple(max(col) for col in zip(*vectors))


# ---------------------------------------------------------------------------
# degree instance
# ---------------------------------------------------------------------------


def degree_measure() -> ComplexityMeasure:
    return ComplexityMeasure(
        name="degree",
        arity=1,
        plus=lambda a, b: (max(a[0], b[0]),),
        times=lambda a, b: (a[0] + b[0],),
        partial=lambda a: (_clamp(a[0] - 1),),
        solutions=lambda cs: math.prod(c[0] for c in cs),
        coordinate=(1,),
        polynomial=lambda d: (d,),
        description="total degree of polynomials; t_n is the Bezout number",
    )


# ---------------------------------------------------------------------------
# Pfaffian instance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PfaffianComplexity:
    """Chain degree ``alpha``, polynomial degree ``beta`` and chain order."""

    alpha: int
    beta: int
    order: int = 0
    shared_chain: bool = True

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0 or self.order < 0:
            raise ComplexityError(f"Pfaffian complexity entries must be natural: {self}")

    @property
    def vector(self) -> ComplexityVector:
        return (self.alpha, self.beta, self.order)

    @classmethod
    def from_vector(cls, c: Sequence[int], shared_chain: bool = True) -> "PfaffianComplexity":
        a, b, r = c
        return cls(a, b, r, shared_chain)


def khovanskii_tn(n: int, complexities: Sequence[PfaffianComplexity | Sequence[int]]) -> int:
    """Khovanskii's bound on non-degenerate solutions of ``f_1 = ... = f_n = 0``.

    The common chain has order ``r = max r_i`` and degree ``alpha = max alpha_i``.
    """
    if not complexities:
        raise ComplexityError("Khovanskii bound needs at least one function")
    vecs = [c.vector if isinstance(c, PfaffianComplexity) else tuple(c) for c in complexities]
    if len(vecs) != n:
        raise ComplexityError(f"expected {n} functions, got {len(vecs)}")
    alpha = max(v[0] for v in vecs)
    r = max(v[2] for v in vecs)
    betas = [v[1] for v in vecs]
    inner = min(n, r) * alpha + sum(betas) - n + 1
    if r and inner < 0:
        inner = 0
    return 2 ** (r * (r - 1) // 2) * math.prod(betas) * inner**r


def pfaffian_measure(shared_chain: bool = True) -> ComplexityMeasure:
    """Pfaffian measure on ``(alpha, beta, r)``.

    With ``shared_chain`` the operands live on one chain, so the order of a
    sum or product is the common order ``max(r1, r2)``; otherwise orders add.
    """

    def order(r1: int, r2: int) -> int:
        return max(r1, r2) if shared_chain else r1 + r2

    return ComplexityMeasure(
        name="pfaffian" if shared_chain else "pfaffian-unshared",
        arity=3,
        plus=lambda a, b: (max(a[0], b[0]), max(a[1], b[1]), order(a[2], b[2])),
        times=lambda a, b: (max(a[0], b[0]), a[1] + b[1], order(a[2], b[2])),
        partial=lambda a: (a[0], _clamp(a[0] + a[1] - 1), a[2]),
        solutions=lambda cs: khovanskii_tn(len(cs), cs),
        coordinate=(1, 1, 0),
        polynomial=lambda d: (1, d, 0),
        description="Pfaffian (alpha, beta, order); t_n is Khovanskii's bound",
    )


# ---------------------------------------------------------------------------
# user measures from a declarative rule file
# ---------------------------------------------------------------------------

_ALLOWED_FUNCS: dict[str, Callable] = {
    "max": max,
    "min": min,
    "sum": sum,
    "prod": math.prod,
    "abs": abs,
    "comb": math.comb,
}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.FloorDiv: lambda a, b: a // b,
    ast.Mod: lambda a, b: a % b,
    ast.Pow: lambda a, b: a**b,
}

_CMPOPS = {
    ast.Lt: lambda a, b: a < b,
    ast.LtE: lambda a, b: a <= b,
    ast.Gt: lambda a, b: a > b,
    ast.GtE: lambda a, b: a >= b,
    ast.Eq: lambda a, b: a == b,
    ast.NotEq: lambda a, b: a != b,
}


class _RuleExpr:
    """A whitelisted integer expression compiled from rule-file text."""

    def __init__(self, text: str):
        self.text = text.strip()
        try:
            self.tree = ast.parse(self.text, mode="eval").body
        except SyntaxError as exc:
            raise MeasureError(f"cannot parse rule {text!r}: {exc.msg}") from None
        self._validate(self.tree)

    def _validate(self, node: ast.AST) -> None:
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, int) or isinstance(node.value, bool):
                raise MeasureError(f"only integer constants allowed in {self.text!r}")
        elif isinstance(node, ast.Name):
            pass
        elif isinstance(node, ast.BinOp):
            if type(node.op) not in _BINOPS:
                raise MeasureError(f"operator {type(node.op).__name__} not allowed in {self.text!r}")
            self._validate(node.left)
            self._validate(node.right)
        elif isinstance(node, ast.UnaryOp):
            if not isinstance(node.op, (ast.USub, ast.UAdd)):
                raise MeasureError(f"unary operator not allowed in {self.text!r}")
            self._validate(node.operand)
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or (
                node.func.id not in _ALLOWED_FUNCS and node.func.id != "col"
            ):
                raise MeasureError(f"call not allowed in {self.text!r}")
            if node.keywords:
                raise MeasureError(f"keyword arguments not allowed in {self.text!r}")
            for a in node.args:
                self._validate(a)
        elif isinstance(node, ast.Compare):
            for op in node.ops:
                if type(op) not in _CMPOPS:
                    raise MeasureError(f"comparison not allowed in {self.text!r}")
            self._validate(node.left)
            for c in node.comparators:
                self._validate(c)
        elif isinstance(node, ast.IfExp):
            for child in (node.test, node.body, node.orelse):
                self._validate(child)
        else:
            raise MeasureError(f"syntax {type(node).__name__} not allowed in {self.text!r}")

    def __call__(self, env: Mapping[str, object]) -> int:
        value = self._eval(self.tree, env)
        if not isinstance(value, int):
            raise MeasureError(f"rule {self.text!r} did not produce an integer")
        return value

    def _eval(self, node: ast.AST, env: Mapping[str, object]):
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            try:
                return env[node.id]
            except KeyError:
                raise MeasureError(f"unknown name {node.id!r} in rule {self.text!r}") from None
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, env), self._eval(node.right, env))
        if isinstance(node, ast.UnaryOp):
            v = self._eval(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call):
            args = [self._eval(a, env) for a in node.args]
            if node.func.id == "col":
                cs = env.get("cs")
                if cs is None:
                    raise MeasureError("col() is only available in the solutions rule")
                (i,) = args
                return [c[i - 1] for c in cs]
            return _ALLOWED_FUNCS[node.func.id](*args)
        if isinstance(node, ast.Compare):
            left = self._eval(node.left, env)
            for op, comp in zip(node.ops, node.comparators):
                right = self._eval(comp, env)
                if not _CMPOPS[type(op)](left, right):
                    return 0
                left = right
            return 1
        if isinstance(node, ast.IfExp):
            branch = node.body if self._eval(node.test, env) else node.orelse
            return self._eval(branch, env)
        raise MeasureError(f"cannot evaluate {type(node).__name__}")


def _split_rules(text: str, arity: int, key: str) -> list[_RuleExpr]:
    parts = [p for p in text.split(";") if p.strip()]
    if len(parts) != arity:
        raise MeasureError(f"rule {key!r} needs {arity} ';'-separated entries, got {len(parts)}")
    return [_RuleExpr(p) for p in parts]


def _vec_env(prefix: str, v: Sequence[int]) -> dict[str, int]:
    return {f"{prefix}{i + 1}": x for i, x in enumerate(v)}


def measure_from_rules(rules: Mapping[str, str]) -> ComplexityMeasure:
    """Build and validate a measure from ``key -> expression`` text.

    Keys: ``name``, ``arity``, ``coordinate`` (comma separated), ``polynomial``
    (``;``-separated, in ``d``), ``plus``/``times`` (in ``a1..am``, ``b1..bm``),
    ``partial`` (in ``a1..am``), ``solutions`` (in ``n`` and ``col(i)``, the
    list of ``i``-th entries over the ``n`` argument vectors), optional
    ``constants_absorb`` (true/false).
    """
    known = {"name", "arity", "coordinate", "polynomial", "plus", "times", "partial", "solutions", "constants_absorb"}
    unknown = set(rules) - known
    if unknown:
        raise MeasureError(f"unknown keys in measure definition: {sorted(unknown)}")
    missing = known - {"polynomial", "constants_absorb"} - set(rules)
    if missing:
        raise MeasureError(f"missing keys in measure definition: {sorted(missing)}")
    try:
        m = int(rules["arity"])
    except ValueError:
        raise MeasureError("arity must be an integer") from None
    if m < 1:
        raise MeasureError("arity must be positive")
    coordinate = tuple(int(x) for x in str(rules["coordinate"]).split(","))
    plus_r = _split_rules(rules["plus"], m, "plus")
    times_r = _split_rules(rules["times"], m, "times")
    partial_r = _split_rules(rules["partial"], m, "partial")
    sol_r = _RuleExpr(rules["solutions"])
    poly_r = _split_rules(rules.get("polynomial", ";".join(["d"] + ["0"] * (m - 1))), m, "polynomial")

    def binary(rs: list[_RuleExpr]) -> BinaryRule:
        def rule(a: ComplexityVector, b: ComplexityVector) -> ComplexityVector:
            env = {**_vec_env("a", a), **_vec_env("b", b)}
            return tuple(r(env) for r in rs)

        return rule

    def partial(a: ComplexityVector) -> ComplexityVector:
        env = _vec_env("a", a)
        return tuple(r(env) for r in partial_r)

    def solutions(cs: Sequence[ComplexityVector]) -> int:
        return sol_r({"n": len(cs), "cs": [tuple(c) for c in cs]})

    absorb = str(rules.get("constants_absorb", "true")).strip().lower() in ("1", "true", "yes")
    measure = ComplexityMeasure(
        name=str(rules["name"]).strip(),
        arity=m,
        plus=binary(plus_r),
        times=binary(times_r),
        partial=partial,
        solutions=solutions,
        coordinate=coordinate,
        polynomial=lambda d: tuple(r({"d": d}) for r in poly_r),
        constants_absorb=absorb,
        description="user-defined",
    )
    validate_measure(measure)
    return measure


def validate_measure(measure: ComplexityMeasure, probes: Iterable[Sequence[int]] | None = None) -> None:
    """Registration-time checks: totality on probes and the constant axioms.

    Raises :class:`MeasureError` on the first violation.
    """
    m = measure.arity
    if len(measure.coordinate) != m:
        raise MeasureError(f"coordinate complexity {measure.coordinate} does not have arity {m}")
    if any(x < 0 or x > 1 for x in measure.coordinate) or 1 not in measure.coordinate:
        raise MeasureError(f"coordinate complexity {measure.coordinate} must have entries in {{0,1}} with some 1")
    zero = measure.zero
    if probes is None:
        probes = [zero, measure.coordinate, tuple(2 for _ in range(m)), tuple(range(1, m + 1))]
    probes = [tuple(p) for p in probes]
    try:
        for p in probes:
            for q in probes:
                measure.check(measure.plus(p, q), "plus output")
                measure.check(measure.times(p, q), "times output")
            measure.check(measure.partial(p), "partial output")
            for n in (1, 2, 3):
                v = measure.solutions([p] * n)
                if not isinstance(v, int) or v < 0:
                    raise MeasureError(f"t_{n} returned {v!r} on {p}")
        if measure.plus(zero, zero) != zero or measure.times(zero, zero) != zero:
            raise MeasureError("combining constants must give a constant (zero vector)")
        if measure.constants_absorb:
            for p in probes:
                if measure.plus(zero, p) != p:
                    raise MeasureError(f"adding a constant changed complexity {p} -> {measure.plus(zero, p)}")
                if measure.times(zero, p) != p:
                    raise MeasureError(f"scaling by a constant changed complexity {p} -> {measure.times(zero, p)}")
        measure.check(measure.polynomial(2), "polynomial(2)")
    except ComplexityError as exc:
        if isinstance(exc, MeasureError):
            raise
        raise MeasureError(str(exc)) from None


def parse_rule_file(text: str) -> dict[str, str]:
    """``key = value`` lines under a ``[measure]`` header; ``#`` starts a comment."""
    rules: dict[str, str] = {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[measure]" or seen_header:
                raise MeasureError(f"line {lineno}: expected a single [measure] header")
            seen_header = True
            continue
        if not seen_header:
            raise MeasureError(f"line {lineno}: content before [measure] header")
        if "=" not in line:
            raise MeasureError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in rules:
            raise MeasureError(f"line {lineno}: duplicate key {key!r}")
        rules[key] = value.strip()
    if not seen_header:
        raise MeasureError("missing [measure] header")
    return rules


def load_measure(path: str | Path) -> ComplexityMeasure:
    return measure_from_rules(parse_rule_file(Path(path).read_text(encoding="utf-8")))


_REGISTRY: dict[str, ComplexityMeasure] = {
    "degree": degree_measure(),
    "pfaffian": pfaffian_measure(),
    "pfaffian-unshared": pfaffian_measure(shared_chain=False),
}


def register_measure(measure: ComplexityMeasure) -> None:
    validate_measure(measure)
    _REGISTRY[measure.name] = measure


def get_measure(name: str) -> ComplexityMeasure:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise MeasureError(f"unknown measure {name!r}; known: {sorted(_REGISTRY)}") from None


def measure_names() -> list[str]:
    return sorted(_REGISTRY)
