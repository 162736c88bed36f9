"""Concrete thickening and closure constructions on formulas.

``T`` replaces a set given by sign conditions with a finite union of closed
thickenings along a chain ``eps_0 < delta_0 < eps_1 < ... < delta_m``.
``X'`` turns a Boolean combination inside a bounded closed set into a closed
set by adding closed bands around kept sign conditions and removing open
bands around dropped ones, level by level.  Everything is formula algebra;
the grid is only used to witness which sign conditions are realized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..formula import (
    And,
    Atom,
    Formula,
    Not,
    Or,
    Rel,
    atoms_of,
    iter_atoms,
    n_vars_of,
    normalize,
)
from ..polynomial import Polynomial
from .raster import grid_sign_vectors

DEFAULT_LAMBDA = Fraction(1, 64)


class ScheduleError(ValueError):
    pass


class UnboundedError(ValueError):
    pass


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class EpsilonSchedule:
    """``delta_k = lam^(2(m-k)+1)``, ``eps_k = lam^(2(m-k)+2)`` for ``k = 0..m``."""

    lam: Fraction = DEFAULT_LAMBDA
    m: int = 1

    def __post_init__(self) -> None:
        lam = Fraction(self.lam)
        object.__setattr__(self, "lam", lam)
        if not 0 < lam < 1:
            raise ScheduleError(f"lambda must lie strictly between 0 and 1, got {lam}")
        if self.m < 0:
            raise ScheduleError(f"chain length m must be non-negative, got {self.m}")

    def _check(self, k: int) -> None:
        if not 0 <= k <= self.m:
            raise ScheduleError(f"index {k} is outside the schedule 0..{self.m}")

    def delta(self, k: int) -> Fraction:
        self._check(k)
        return self.lam ** (2 * (self.m - k) + 1)

    def eps(self, k: int) -> Fraction:
        self._check(k)
        return self.lam ** (2 * (self.m - k) + 2)

    @property
    def chain(self) -> tuple[Fraction, ...]:
        """``(eps_0, delta_0, ..., eps_m, delta_m)``, strictly increasing."""
        out: list[Fraction] = []
        for k in range(self.m + 1):
            out += [self.eps(k), self.delta(k)]
        return tuple(out)

    def to_text(self) -> str:
        return f"lambda={self.lam} m={self.m} chain=" + ",".join(str(v) for v in self.chain)


@dataclass(frozen=True)
class SignCondition:
    signs: tuple[int, ...]
    realized: bool = False
    witness: tuple[Fraction, ...] | None = None

    @property
    def level(self) -> int:
        return sum(1 for s in self.signs if s == 0)


def _as_poly(fn) -> Polynomial:
    if not isinstance(fn, Polynomial):
        raise ConstructionError("sign decomposition needs concrete polynomials")
    return fn


def sign_decompose(fs: Sequence, box, resolution, dim: int | None = None) -> list[SignCondition]:
    """Sign vectors of ``fs`` witnessed at some point of the doubled grid.

    This under-approximates the realizable sign conditions: one realized only
    off the grid is missed.
    """
    polys = [_as_poly(f) for f in fs]
    if dim is None:
        dim = max([p.max_var_index() + 1 for p in polys] + [1])
    found = grid_sign_vectors(polys, box, resolution, dim)
    return [SignCondition(sig, True, w) for sig, w in sorted(found.items())]


def _signs_satisfy(f: Formula, sign_of: dict) -> bool:
    """Truth of ``f`` when each atom function has the given sign."""
    if isinstance(f, Atom):
        return f.rel.holds(sign_of[f.fn])
    if isinstance(f, Not):
        return not _signs_satisfy(f.child, sign_of)
    if isinstance(f, And):
        return all(_signs_satisfy(c, sign_of) for c in f.children)
    return any(_signs_satisfy(c, sign_of) for c in f.children)


def _ge(p: Polynomial, c: Fraction) -> Atom:
    return Atom(p - c, Rel.GE)


def _le(p: Polynomial, c: Fraction) -> Atom:
    return Atom(p - c, Rel.LE)


def _flat(cls, parts: list[Formula]) -> Formula:
    return parts[0] if len(parts) == 1 else cls(tuple(parts))


def is_ball_atom(a: Atom) -> bool:
    """``a`` confines points to a ball: ``k|x|^2 + linear + c <= 0`` with ``k > 0`` (or the mirrored ``>=``)."""
    if not isinstance(a.fn, Polynomial) or a.rel not in (Rel.LE, Rel.LT, Rel.GE, Rel.GT):
        return False
    p = a.fn if a.rel in (Rel.LE, Rel.LT) else -a.fn
    quad = {e: c for e, c in p.terms if sum(e) == 2}
    if any(sum(e) > 2 for e, _ in p.terms) or not quad:
        return False
    n = p.n_vars
    k = None
    for e, c in quad.items():
        if max(e) != 2:
            return False
        k = c if k is None else k
        if c != k:
            return False
    return k > 0 and len(quad) == n


def top_level_ball(f: Formula) -> Atom | None:
    nf = normalize(f)
    parts = nf.children if isinstance(nf, And) else (nf,)
    for part in parts:
        if isinstance(part, Atom) and is_ball_atom(part):
            return part
    return None


@dataclass(frozen=True)
class SignDecomposition:
    """The atom functions of a formula and the realized sign conditions it keeps."""

    functions: tuple[Polynomial, ...]
    realized: tuple[SignCondition, ...]
    kept: tuple[SignCondition, ...]
    dim: int


def decompose(formula: Formula, box, resolution, dim: int | None = None) -> SignDecomposition:
    n = dim if dim is not None else max(n_vars_of(formula), 1)
    _, fns = atoms_of(formula)
    polys = tuple(_as_poly(f).with_n_vars(n) for f in fns)
    realized = sign_decompose(polys, box, resolution, n)
    kept = []
    for sc in realized:
        sign_of = {f: sc.signs[i] for i, f in enumerate(fns)}
        if _signs_satisfy(formula, sign_of):
            kept.append(sc)
    return SignDecomposition(polys, tuple(realized), tuple(kept), n)


def _thickened(dec: SignDecomposition, delta: Fraction, eps: Fraction | None) -> list[Formula]:
    pieces: list[Formula] = []
    for sc in dec.kept:
        conds: list[Formula] = []
        for p, s in zip(dec.functions, sc.signs):
            if s > 0:
                conds.append(_ge(p, delta))
            elif s < 0:
                conds.append(_le(p, -delta))
            elif eps is None:
                conds.append(Atom(p, Rel.EQ))
            else:
                conds += [_ge(p, -eps), _le(p, eps)]
        pieces.append(_flat(And, conds) if conds else And(()))
    return pieces


def _with_ball(body: Formula, n: int, delta: Fraction, bounded: bool) -> Formula:
    if bounded:
        return body
    ball = _le(Polynomial.norm_squared(n), 1 / delta)
    return normalize(And((body, ball)))


def _resolve_bounded(formula: Formula, bounded: bool | None) -> bool:
    return top_level_ball(formula) is not None if bounded is None else bounded


def build_S_delta(
    formula: Formula,
    schedule: EpsilonSchedule,
    k: int,
    box,
    resolution,
    bounded: bool | None = None,
    dim: int | None = None,
) -> Formula:
    """Closed shrink of a sign-condition union: ``h > 0 -> h >= delta_k``, ``h < 0 -> h <= -delta_k``."""
    delta = schedule.delta(k)
    dec = decompose(formula, box, resolution, dim)
    body = _flat(Or, _thickened(dec, delta, None)) if dec.kept else Or(())
    return _with_ball(body, dec.dim, delta, _resolve_bounded(formula, bounded))


def build_S_delta_eps(
    formula: Formula,
    schedule: EpsilonSchedule,
    k: int,
    box,
    resolution,
    bounded: bool | None = None,
    dim: int | None = None,
) -> Formula:
    """As :func:`build_S_delta`, and ``h = 0`` widens to ``-eps_k <= h <= eps_k``."""
    delta, eps = schedule.delta(k), schedule.eps(k)
    dec = decompose(formula, box, resolution, dim)
    body = _flat(Or, _thickened(dec, delta, eps)) if dec.kept else Or(())
    return _with_ball(body, dec.dim, delta, _resolve_bounded(formula, bounded))


def build_T(
    formula: Formula,
    lam=DEFAULT_LAMBDA,
    m: int = 1,
    box=2,
    resolution=16,
    bounded: bool | None = None,
    dim: int | None = None,
) -> Formula:
    """Union of the thickened closed sets for ``k = 0..m`` of one schedule."""
    if m < 1:
        raise ScheduleError("the T construction needs m >= 1")
    schedule = EpsilonSchedule(Fraction(lam), m)
    dec = decompose(formula, box, resolution, dim)
    is_bounded = _resolve_bounded(formula, bounded)
    parts = []
    for k in range(m + 1):
        delta, eps = schedule.delta(k), schedule.eps(k)
        body = _flat(Or, _thickened(dec, delta, eps)) if dec.kept else Or(())
        parts.append(_with_ball(body, dec.dim, delta, is_bounded))
    return normalize(Or(tuple(parts)))


def closed_approximation(
    formula: Formula,
    lam=DEFAULT_LAMBDA,
    box=2,
    resolution=16,
    radius: Fraction | int | None = None,
    dim: int | None = None,
) -> Formula:
    """Closed set ``X'`` with the homotopy type of ``X`` (bounded inputs only).

    The ambient closed set ``S`` is the ball ``|x|^2 <= radius^2`` when
    ``radius`` is given, otherwise a ball atom conjoined at the top level of
    ``formula`` (taken non-strictly).  With ``t`` atom functions the band
    widths ``eps_1 < ... < eps_2t`` are read off one schedule with ``m = t``.
    """
    n = dim if dim is not None else max(n_vars_of(formula), 1)
    if radius is not None:
        r = Fraction(radius)
        if r <= 0:
            raise ConstructionError("radius must be positive")
        ball = Atom(Polynomial.norm_squared(n) - r * r, Rel.LE)
        X = normalize(And((formula, ball)))
    else:
        found = top_level_ball(formula)
        if found is None:
            raise UnboundedError("X' needs a bounded set: pass a radius or conjoin a ball atom")
        ball = Atom(found.fn, Rel.LE if found.rel in (Rel.LE, Rel.LT) else Rel.GE)
        X = normalize(formula)
    S = ball
    _, fns = atoms_of(And((X, S)))
    polys = [_as_poly(f).with_n_vars(n) for f in fns]
    t = len(polys)
    schedule = EpsilonSchedule(Fraction(lam), t)
    chain = schedule.chain

    def eps(j: int) -> Fraction:
        return chain[j]

    realized = sign_decompose(polys, box, resolution, n)
    sign_sets = []
    for sc in realized:
        sign_of = {f: sc.signs[i] for i, f in enumerate(fns)}
        if _signs_satisfy(S, sign_of):
            sign_sets.append((sc, _signs_satisfy(X, sign_of)))

    def reali(sc: SignCondition, closed: bool) -> Formula:
        m = sc.level
        conds: list[Formula] = [S]
        for p, s in zip(polys, sc.signs):
            if s == 0:
                e = eps(2 * m) if closed else eps(2 * m - 1)
                if closed:
                    conds += [_ge(p, -e), _le(p, e)]
                else:
                    conds += [Atom(p + e, Rel.GT), Atom(p - e, Rel.LT)]
            elif s > 0:
                conds.append(Atom(p, Rel.GE if closed else Rel.GT))
            else:
                conds.append(Atom(p, Rel.LE if closed else Rel.LT))
        return And(tuple(conds))

    current: Formula = X
    for level in range(t + 1):
        keep = [reali(sc, True) for sc, inside in sign_sets if sc.level == level and inside]
        drop = [reali(sc, False) for sc, inside in sign_sets if sc.level == level and not inside]
        grown = Or((current, *keep)) if keep else current
        current = And((grown, *[Not(d) for d in drop])) if drop else grown
    return normalize(current)


def formula_size(f: Formula) -> int:
    return sum(1 for _ in iter_atoms(f))
