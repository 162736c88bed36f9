"""Executable Betti-number bounds with provenance.

Every asymptotic constant is an explicit, named :class:`OConstants` entry
(default 1) so that each result is a reproducible integer rather than an
O-claim.  All arithmetic is exact big-integer arithmetic; a bit-length guard
stops accidental towers before they exhaust memory.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .complexity import (
    ComplexityMeasure,
    ComplexityVector,
    componentwise_max,
    gamma,
    half_up,
    omega,
    omega_single,
)
from .formula import (
    And,
    Atom,
    Formula,
    FormulaClass,
    MixedRecipe,
    NormTimesProduct,
    Not,
    QuantifiedFormula,
    Quantifier,
    Rel,
    SumSquaresPlusNorm,
    atoms_of,
    classify,
    composite_complexity,
    descriptor_complexity,
    iter_atoms,
    n_vars_of,
    normalize,
)
from .polynomial import Polynomial

DEFAULT_MAX_BITS = 1 << 20


class BoundError(ValueError):
    """Invalid parameters for a bound."""


class BoundTooLargeError(ArithmeticError):
    """The exact value would exceed the configured bit budget."""

    def __init__(self, what: str, estimated_bits: float, max_bits: int):
        self.estimated_bits = estimated_bits
        self.max_bits = max_bits
        super().__init__(
            f"{what} needs about {estimated_bits:.3g} bits, over the budget of {max_bits}; "
            "raise max_bits or shrink the parameters"
        )


class RouteError(ValueError):
    """A theorem override does not apply to the formula (strict mode)."""


class RouteWarning(UserWarning):
    pass


class ConsistencyError(AssertionError):
    """An internal inequality that must always hold was violated."""


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

O_CONSTANT_NAMES = ("exponent", "projection", "terms")
O_CONSTANT_HELP = {
    "exponent": "constant c in the exponent c*(2u)^nu*w of the quantified bound",
    "projection": "factor in front of the gamma-sum of the projection bound",
    "terms": "constant c in the count 2^(c*i^2*(2u)^i*w) of additional terms",
}


@dataclass(frozen=True)
class OConstants:
    """Named positive integers replacing the O(.) of asymptotic statements."""

    values: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        for name, v in self.values:
            if name not in O_CONSTANT_NAMES:
                raise BoundError(f"unknown O-constant {name!r}; known: {', '.join(O_CONSTANT_NAMES)}")
            if not isinstance(v, int) or v < 1:
                raise BoundError(f"O-constant {name} must be an integer >= 1, got {v!r}")

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **kwargs: int) -> "OConstants":
        merged = dict(mapping or {})
        merged.update(kwargs)
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def parse(cls, items: Iterable[str]) -> "OConstants":
        """From ``NAME=K`` strings (the CLI form)."""
        out: dict[str, int] = {}
        for item in items:
            name, sep, val = item.partition("=")
            if not sep:
                raise BoundError(f"O-constant must look like NAME=K, got {item!r}")
            try:
                out[name.strip()] = int(val)
            except ValueError:
                raise BoundError(f"O-constant {name.strip()} needs an integer value, got {val!r}") from None
        return cls.of(out)

    def get(self, name: str) -> int:
        if name not in O_CONSTANT_NAMES:
            raise KeyError(name)
        return dict(self.values).get(name, 1)

    def as_dict(self) -> dict[str, int]:
        """Every known constant, defaults included."""
        return {name: self.get(name) for name in O_CONSTANT_NAMES}


@dataclass(frozen=True)
class Bound:
    """A natural number together with how it was obtained."""

    value: int
    theorem: str
    inputs: dict = field(default_factory=dict)
    o_constants: dict = field(default_factory=dict)
    trace: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or self.value < 0:
            raise BoundError(f"bound value must be a natural number, got {self.value!r}")
        if not self.theorem:
            raise BoundError("every bound needs a theorem identifier")

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


def _val(b: Bound | int) -> int:
    v = b.value if isinstance(b, Bound) else b
    if not isinstance(v, int) or v < 0:
        raise BoundError(f"expected a natural number, got {v!r}")
    return v


def checked_pow(base: int, exp: int, what: str, max_bits: int = DEFAULT_MAX_BITS) -> int:
    if exp < 0:
        raise BoundError(f"negative exponent in {what}")
    if base > 1 and exp > 0:
        est = exp * math.log2(base)
        if est > max_bits:
            raise BoundTooLargeError(what, est, max_bits)
    return base**exp


def _vec(c) -> list[int]:
    return list(c)


# ---------------------------------------------------------------------------
# closed-form theorems for basic sets
# ---------------------------------------------------------------------------


def _check_dim(n: int) -> None:
    if n < 1:
        raise BoundError(f"ambient dimension must be >= 1, got {n}")


def equalities_bound(measure: ComplexityMeasure, n: int, fs: Sequence) -> Bound:
    """Betti sum of ``{f_1 = ... = f_m = 0}`` in ``R^n``."""
    _check_dim(n)
    if not fs:
        raise BoundError("equalities_bound needs at least one function")
    comp = composite_complexity(measure, SumSquaresPlusNorm(tuple(fs)), n)
    g = gamma(measure, n, comp)
    return Bound(
        half_up(g),
        "equalities",
        {"measure": measure.name, "n": n, "complexities": [_vec(descriptor_complexity(measure, f)) for f in fs]},
        trace=(f"composite c(sum f^2 + |x|^2) = {comp}", f"gamma({n}, {comp}) = {g}", "halved, rounding up"),
    )


def nonstrict_bound(measure: ComplexityMeasure, n: int, fs: Sequence) -> Bound:
    """Betti sum of ``{f_1 >= 0, ..., f_p >= 0}`` in ``R^n``."""
    _check_dim(n)
    if not fs:
        raise BoundError("nonstrict_bound needs at least one function")
    comp = composite_complexity(measure, NormTimesProduct(tuple(fs)), n)
    g = gamma(measure, n, comp)
    return Bound(
        half_up(g),
        "nonstrict",
        {"measure": measure.name, "n": n, "complexities": [_vec(descriptor_complexity(measure, f)) for f in fs]},
        trace=(f"composite c(|x|^2 f_1...f_p) = {comp}", f"gamma({n}, {comp}) = {g}", "halved, rounding up"),
    )


def mixed_bound(measure: ComplexityMeasure, n: int, eqs: Sequence, ineqs: Sequence) -> Bound:
    """Betti sum of equations ``f_i = 0`` together with inequalities ``g_j >= 0``."""
    _check_dim(n)
    if not eqs and not ineqs:
        raise BoundError("mixed_bound needs at least one equation or inequality")
    comp = composite_complexity(measure, MixedRecipe(tuple(eqs), tuple(ineqs)), n)
    g = gamma(measure, n, comp)
    return Bound(
        half_up(g),
        "mixed",
        {
            "measure": measure.name,
            "n": n,
            "equations": [_vec(descriptor_complexity(measure, f)) for f in eqs],
            "inequalities": [_vec(descriptor_complexity(measure, f)) for f in ineqs],
        },
        trace=(f"composite c(|x|^2 (sum f^2)^2 prod g) = {comp}", f"gamma({n}, {comp}) = {g}", "halved, rounding up"),
    )


# ---------------------------------------------------------------------------
# sign conditions and Boolean combinations
# ---------------------------------------------------------------------------


def sign_conditions_bound(i: int, s: int, n_prime: int, omega_value: Bound | int) -> Bound:
    """``b_i`` summed over realizations of sign conditions on ``s`` functions."""
    if i < 0 or n_prime < 0 or s < 0:
        raise BoundError("i, s and n' must be non-negative")
    if i > n_prime:
        raise BoundError(f"homology degree {i} exceeds the dimension bound n'={n_prime}")
    om = _val(omega_value)
    coeff = sum(math.comb(s, j) * 4**j for j in range(n_prime - i + 1))
    return Bound(
        coeff * om,
        "sign_conditions",
        {"i": i, "s": s, "n_prime": n_prime, "omega": om},
        trace=(f"sum_j C(s,j) 4^j = {coeff}",),
    )


def closed_set_bound(s: int, n_prime: int, omega_value: Bound | int) -> Bound:
    """Betti sum of a set defined by a formula with only non-strict atoms."""
    if s < 0 or n_prime < 0:
        raise BoundError("s and n' must be non-negative")
    om = _val(omega_value)
    coeff = sum(math.comb(s, j) * 6**j for i in range(n_prime + 1) for j in range(n_prime - i + 1))
    return Bound(
        coeff * om,
        "closed",
        {"s": s, "n_prime": n_prime, "omega": om},
        trace=(f"sum_i sum_j C(s,j) 6^j = {coeff}",),
    )


def boolean_combination_bound(n: int, s: int, omega_prime: Bound | int) -> Bound:
    """Betti sum of an arbitrary Boolean combination of ``s`` atoms in ``R^n``.

    ``omega_prime`` must be computed over the atom functions together with
    ``|x|^2``.
    """
    if n < 0 or s < 0:
        raise BoundError("n and s must be non-negative")
    om = _val(omega_prime)
    m = 2 * s * s + 1
    coeff = sum(math.comb(m, j) * 6**j for i in range(n + 1) for j in range(1, n - i + 1))
    return Bound(
        coeff * om,
        "boolean",
        {"n": n, "s": s, "omega_prime": om},
        trace=(f"sum_i sum_(j>=1) C(2s^2+1, j) 6^j = {coeff}",),
    )


def projection_coefficient(k: int, s: int) -> int:
    """``(k^3 + 4k^2 + 5k + 2)/2 * s``; the numerator is always even."""
    return (k + 1) ** 2 * (k + 2) // 2 * s


def projection_bound(
    measure: ComplexityMeasure,
    k: int,
    n: int,
    fiber_dim: int,
    s: int,
    fs: Sequence,
    consts: OConstants = OConstants(),
    max_bits: int = DEFAULT_MAX_BITS,
) -> Bound:
    """``b_k`` of the projection to ``R^n`` of a set in ``R^(n+fiber_dim)`` defined by ``s`` atoms."""
    if k < 0 or fiber_dim < 0 or s < 0:
        raise BoundError("k, fiber_dim and s must be non-negative")
    _check_dim(n)
    if not fs:
        raise BoundError("projection_bound needs the atom functions")
    coeff = projection_coefficient(k, s)
    exp = n + (k + 1) * fiber_dim
    gammas = []
    for p in range(k + 1):
        dim = n + (p + 1) * fiber_dim
        comp = composite_complexity(measure, SumSquaresPlusNorm(tuple(fs)), dim)
        gammas.append(gamma(measure, dim, comp))
    c = consts.get("projection")
    value = checked_pow(coeff, exp, "projection bound", max_bits) * c * sum(gammas)
    return Bound(
        value,
        "projection",
        {"measure": measure.name, "k": k, "n": n, "fiber_dim": fiber_dim, "s": s},
        consts.as_dict(),
        (f"coefficient {coeff} raised to {exp}", f"gamma terms {gammas}", f"projection constant {c}"),
    )


# ---------------------------------------------------------------------------
# quantified formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuantifierProfile:
    """Block widths ``n_0..n_nu`` and the derived partial sums/products.

    Zero widths enter the partial products as 1 so that a sentence (no free
    variables) does not collapse every product to 0.
    """

    widths: tuple[int, ...]
    k_cap: int | None = None

    def __post_init__(self) -> None:
        if len(self.widths) < 2:
            raise BoundError("a profile needs the free width n_0 and at least one block")
        if any(w < 0 for w in self.widths) or any(w < 1 for w in self.widths[1:]):
            raise BoundError(f"invalid block widths {self.widths}")
        if self.k_cap is not None and self.k_cap < 0:
            raise BoundError("k_cap must be non-negative")

    @classmethod
    def of(cls, *widths: int, k_cap: int | None = None) -> "QuantifierProfile":
        return cls(tuple(widths), k_cap)

    @classmethod
    def from_formula(cls, qf: QuantifiedFormula) -> "QuantifierProfile":
        return cls(qf.widths)

    @property
    def nu(self) -> int:
        return len(self.widths) - 1

    @property
    def K(self) -> int:
        return self.k_cap if self.k_cap is not None else sum(self.widths)

    def u(self, j: int) -> int:
        return sum(self.widths[: j + 1])

    def w(self, j: int) -> int:
        return math.prod(max(x, 1) for x in self.widths[: j + 1])

    @property
    def t(self) -> tuple[int, ...]:
        return tuple(_val(b) for b in t_sequence(self))


def t_sequence(profile: QuantifierProfile) -> list[Bound]:
    """Dimensions ``t_j`` of the spaces carrying the construction, worst case.

    Checks ``t_j <= (2K)^j w_j + 1`` and raises :class:`ConsistencyError`
    if it ever fails.
    """
    K = profile.K
    out: list[Bound] = []
    t = profile.widths[0]
    for j in range(profile.nu + 1):
        if j > 0:
            p_j = t + K
            t = t + profile.widths[j] * (p_j + 1)
        cap = (2 * K) ** j * profile.w(j) + 1
        if t > cap:
            raise ConsistencyError(f"t_{j} = {t} exceeds (2K)^j w_j + 1 = {cap} for {profile}")
        out.append(Bound(t, "t_sequence", {"j": j, "widths": list(profile.widths), "K": K}, trace=(f"cap {cap}",)))
    return out


def atom_count(profile: QuantifierProfile, s: int) -> Bound:
    """Number of atoms of the Boolean formula that replaces the quantifiers."""
    if s < 0:
        raise BoundError("s must be non-negative")
    nu = profile.nu
    ws = profile.widths
    if nu == 1:
        value = 4 * (ws[0] + ws[1] + 1) * s
        return Bound(value, "atom_count", {"widths": list(ws), "s": s}, trace=("4(n+1)s for one block",))
    t = profile.t
    t2, t1 = t[nu - 2], t[nu - 1]
    inner = max(
        (4 * t[r - 1] + 2 * sum(ws[r:])) * (2 * t2 + 1) + 2 * t1 + 2 * ws[nu] for r in range(2, nu + 1)
    )
    value = ((2 * t2 + 1) * 4 * s * profile.u(nu) + 2 * t1 + 2 * ws[nu] + inner * (nu - 2)) * (t1 + 1)
    return Bound(
        value,
        "atom_count",
        {"widths": list(ws), "s": s},
        trace=(f"t = {list(t)}", "free index r maximized over 2..nu"),
    )


def term_count(profile: QuantifierProfile, i: int, consts: OConstants = OConstants(), max_bits: int = DEFAULT_MAX_BITS) -> Bound:
    """``2^(c i^2 (2u_nu)^i w_(i-2))`` additional terms at level ``i``."""
    if i < 2:
        raise BoundError(f"term_count needs i >= 2, got {i}")
    if i - 2 > profile.nu:
        raise BoundError(f"level {i} is beyond the {profile.nu} blocks of the profile")
    c = consts.get("terms")
    exp = c * i * i * (2 * profile.u(profile.nu)) ** i * profile.w(i - 2)
    return Bound(
        checked_pow(2, exp, "term count", max_bits),
        "term_count",
        {"widths": list(profile.widths), "i": i},
        consts.as_dict(),
        (f"exponent {exp}",),
    )


def quantified_bound(
    measure: ComplexityMeasure,
    profile: QuantifierProfile,
    s: int,
    C_atoms: Sequence[int],
    consts: OConstants = OConstants(),
    max_bits: int = DEFAULT_MAX_BITS,
) -> Bound:
    """Betti sum of a set defined by a prenex formula with ``nu`` alternating blocks."""
    if s < 1:
        raise BoundError("the quantified bound needs s >= 1")
    nu = profile.nu
    u = profile.u(nu)
    base = 2 ** (nu * nu) * u**nu * s * profile.w(nu - 1)
    c = consts.get("exponent")
    exp = c * (2 * u) ** nu * profile.w(nu)
    t = profile.t
    t_nu = t[nu]
    if t_nu < 1:
        raise BoundError("the construction space has dimension 0")
    cvec = measure.check(tuple(C_atoms), "atom complexity")
    om = omega_single(measure, t_nu, [cvec, measure.norm_squared(t_nu)])
    power = checked_pow(base, exp, "quantified bound", max_bits)
    if om > 1 and power.bit_length() + om.bit_length() > max_bits:
        raise BoundTooLargeError("quantified bound", power.bit_length() + om.bit_length(), max_bits)
    atoms = atom_count(profile, s)
    return Bound(
        power * om,
        "quantified",
        {
            "measure": measure.name,
            "widths": list(profile.widths),
            "s": s,
            "atom_complexity": list(cvec),
            "t_nu": t_nu,
            "omega": om,
            "atom_count": atoms.value,
        },
        consts.as_dict(),
        (
            f"base 2^(nu^2) u^nu s w_(nu-1) = {base}",
            f"exponent c (2u)^nu w_nu = {exp} with c = {c}",
            f"Omega(F) over R^{t_nu} with F = {{g, |x|^2}}, c(g) = {tuple(cvec)}: {om}",
            f"t = {list(t)}",
            f"replacement formula has at most {atoms.value} atoms",
        ),
    )


# ---------------------------------------------------------------------------
# combinators
# ---------------------------------------------------------------------------


def mv_union_bound(
    i: int,
    n_pieces: int,
    piece_bounds: Mapping[frozenset, Bound | int],
    empty: Iterable[frozenset] = (),
) -> Bound:
    """Mayer-Vietoris: ``b_i`` of a union from the ranks of all intersections.

    ``piece_bounds[J]`` bounds ``b_(i-|J|+1)`` of the intersection over ``J``
    (indices ``0..n_pieces-1``).  Subsets listed in ``empty`` contribute 0,
    as do subsets whose homology degree is negative.
    """
    if i < 0 or n_pieces < 1:
        raise BoundError("need i >= 0 and at least one piece")
    empty = {frozenset(J) for J in empty}
    for J in list(piece_bounds) + list(empty):
        J = frozenset(J)
        if not J or not J <= set(range(n_pieces)):
            raise BoundError(f"subset {sorted(J)} is not a non-empty subset of 0..{n_pieces - 1}")
    normalized = {frozenset(J): v for J, v in piece_bounds.items()}
    total = 0
    used = 0
    for size in range(1, n_pieces + 1):
        deg = i - size + 1
        for J in combinations(range(n_pieces), size):
            J = frozenset(J)
            if J in normalized:
                if deg >= 0:
                    total += _val(normalized[J])
                    used += 1
            elif J not in empty and deg >= 0:
                raise BoundError(f"missing bound for intersection {sorted(J)} (degree {deg})")
    return Bound(total, "mayer_vietoris", {"i": i, "n_pieces": n_pieces}, trace=(f"{used} terms summed",))


def alexander_dual(q: int, n: int, betti_of_augmented: Bound | int, reduced: bool = False) -> Bound:
    """Bound ``b_q`` of ``I^n \\ X`` from the rank of ``X`` with the thickened box boundary.

    The input ranks ``b_(n-q-1)``; when it is unreduced and that degree is 0,
    one is subtracted to pass to reduced homology.
    """
    if q < 0:
        raise BoundError("q must be non-negative")
    if q >= n:
        raise BoundError(f"duality needs q <= n-1, got q={q}, n={n}")
    v = _val(betti_of_augmented)
    dual_deg = n - q - 1
    adjusted = v
    if dual_deg == 0 and not reduced:
        adjusted = max(v - 1, 0)
    return Bound(
        adjusted,
        "alexander_duality",
        {"q": q, "n": n, "input": v, "input_reduced": reduced},
        trace=(f"H_{q}(complement) ~ reduced H_{dual_deg}(X u boundary)",),
    )


def fiber_product_bound(k: int, w_bounds: Mapping[int, Bound | int]) -> Bound:
    """``b_k`` of the image of a surjection from ``sum_(p+q=k) b_q(W_p)``.

    ``w_bounds[p]`` bounds ``b_(k-p)`` of the ``p``-fold fibre product ``W_p``.
    """
    if k < 0:
        raise BoundError("k must be non-negative")
    missing = [p for p in range(k + 1) if p not in w_bounds]
    if missing:
        raise BoundError(f"missing b_(k-p)(W_p) for p in {missing}")
    extra = sorted(set(w_bounds) - set(range(k + 1)))
    if extra:
        raise BoundError(f"unexpected entries for p in {extra}")
    return Bound(sum(_val(w_bounds[p]) for p in range(k + 1)), "fiber_product", {"k": k})


# ---------------------------------------------------------------------------
# routing formulas to theorems
# ---------------------------------------------------------------------------

ROUTES = ("trivial", "equalities", "nonstrict", "mixed", "closed", "open", "boolean", "quantified")


def _conjunct_atoms(f: Formula) -> list[Atom] | None:
    """Atoms of a plain conjunction (or a single atom), else ``None``."""
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, And) and all(isinstance(c, Atom) for c in f.children):
        return list(f.children)
    return None


def applicable_routes(f: Formula) -> list[str]:
    nf = normalize(f)
    _, fns = atoms_of(nf)
    if all(isinstance(fn, Polynomial) and fn.is_constant for fn in fns):
        return ["trivial"]
    routes = []
    atoms = _conjunct_atoms(nf)
    if atoms is not None:
        rels = {a.rel for a in atoms}
        if rels == {Rel.EQ}:
            routes.append("equalities")
        if rels and rels <= {Rel.GE, Rel.LE}:
            routes.append("nonstrict")
        if rels and rels <= {Rel.EQ, Rel.GE, Rel.LE}:
            routes.append("mixed")
    cls = classify(nf)
    if cls is FormulaClass.CLOSED:
        routes.append("closed")
    elif cls is FormulaClass.OPEN:
        routes.append("open")
    routes.append("boolean")
    return routes


def default_route(f: Formula) -> str:
    return applicable_routes(f)[0]


def bound_formula(
    f: Formula,
    measure: ComplexityMeasure,
    n: int | None = None,
    route: str | None = None,
    strict: bool = False,
) -> Bound:
    """Select the sharpest applicable theorem (or ``route``) and evaluate it."""
    dim = n if n is not None else max(n_vars_of(f), 1)
    _check_dim(dim)
    if n is not None and n_vars_of(f) > n:
        raise BoundError(f"formula uses {n_vars_of(f)} variables but n={n}")
    nf = normalize(f)
    routes = applicable_routes(nf)
    notes: list[str] = []
    if route is not None:
        if route not in ROUTES:
            raise BoundError(f"unknown theorem {route!r}; choose from {', '.join(ROUTES)}")
        if route not in routes:
            msg = f"theorem {route!r} does not apply to this formula (applicable: {', '.join(routes)})"
            if strict:
                raise RouteError(msg)
            warnings.warn(msg + f"; using {routes[0]!r}", RouteWarning, stacklevel=2)
            notes.append("override ignored: " + msg)
            route = routes[0]
    else:
        route = routes[0]

    s, fns = atoms_of(nf)
    cvecs = [descriptor_complexity(measure, fn) for fn in fns]
    if route == "trivial":
        b = Bound(1, "trivial", {"n": dim, "s": 0}, trace=("no atoms: the set is empty or all of R^n",))
    elif route in ("equalities", "nonstrict", "mixed"):
        atoms = _conjunct_atoms(nf)
        assert atoms is not None
        eq_fns = _dedupe(a.fn for a in atoms if a.rel is Rel.EQ)
        ineq_fns = _dedupe(a.fn for a in atoms if a.rel is not Rel.EQ)
        if route == "equalities":
            b = equalities_bound(measure, dim, eq_fns)
        elif route == "nonstrict":
            b = nonstrict_bound(measure, dim, ineq_fns)
        else:
            b = mixed_bound(measure, dim, eq_fns, ineq_fns)
    elif route == "closed":
        om = omega(measure, dim, cvecs)
        b = closed_set_bound(s, dim, om)
        b = _with(b, inputs={"measure": measure.name, "n": dim}, trace=(f"Omega(F, {{}}) = {om}",))
    elif route == "open":
        dual = normalize(Not(nf))
        om = omega(measure, dim, cvecs)
        inner = closed_set_bound(s, dim, om)
        b = Bound(
            inner.value,
            "open",
            {**inner.inputs, "measure": measure.name, "n": dim},
            trace=(
                f"Omega(F, {{}}) = {om}",
                "complement is closed with the same atoms; bounded via Alexander duality",
                f"complement has {sum(1 for _ in iter_atoms(dual))} atom occurrences",
            )
            + inner.trace,
        )
    else:
        norm = measure.norm_squared(dim)
        om = omega(measure, dim, cvecs + [norm])
        b = boolean_combination_bound(dim, s, om)
        b = _with(
            b, inputs={"measure": measure.name}, trace=(f"Omega(F u {{|x|^2}}, {{}}) = {om}",)
        )
    return _with(b, inputs={"route": route}, trace=tuple(notes))


def _dedupe(items) -> list:
    return list(dict.fromkeys(items))


def _with(b: Bound, inputs: dict | None = None, trace: tuple[str, ...] = ()) -> Bound:
    return Bound(b.value, b.theorem, {**b.inputs, **(inputs or {})}, b.o_constants, b.trace + tuple(trace))


def bound_quantified(
    qf: QuantifiedFormula,
    measure: ComplexityMeasure,
    consts: OConstants = OConstants(),
    max_bits: int = DEFAULT_MAX_BITS,
    k_cap: int | None = None,
) -> Bound:
    """Bound for ``{x_0 : Q_1 x_1 ... Q_nu x_nu matrix}``.

    A universally quantified leading block is handled through the complement
    (an existential formula with the negated matrix).  Its atoms and
    complexities are the same, so the value is unchanged; the dualization is
    recorded in the trace.
    """
    profile = QuantifierProfile(qf.widths, k_cap)
    s, fns = atoms_of(qf.matrix)
    n = qf.total_dim
    cvecs = [descriptor_complexity(measure, fn) for fn in fns] + [measure.norm_squared(n)]
    c_atoms = componentwise_max(cvecs)
    b = quantified_bound(measure, profile, max(s, 1), c_atoms, consts, max_bits)
    notes: tuple[str, ...] = ()
    if qf.blocks[0][0] is Quantifier.FORALL:
        notes = (
            "leading block is universal: bounded the complement "
            + " ".join(f"{q.dual.value}({w})" for q, w in qf.blocks)
            + " with negated matrix, transferred by Alexander duality",
        )
    return _with(b, inputs={"route": "quantified", "prefix": [q.value for q, _ in qf.blocks]}, trace=notes)
