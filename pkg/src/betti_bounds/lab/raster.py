"""Exact rasterization of concrete formulas onto cubical grids.

The box ``[-R, R]^n`` with ``N`` cells per axis is indexed by the doubled
lattice ``x = R (j - N) / N``, ``0 <= j <= 2N``: odd ``j`` are cell centers,
even ``j`` are cell vertices.  With ``R = Rn/Rd`` and ``q = Rd N`` every
lattice coordinate is ``Rn a / q`` for an integer ``a = j - N``, so a
polynomial scaled by ``L q^deg`` is an integer polynomial in the ``a``'s and
signs are decided exactly, in ``int64`` when the magnitude allows it and with
Python integers otherwise.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from ..formula import And, Atom, Formula, Not, Or, Rel, iter_atoms, n_vars_of
from ..polynomial import Polynomial

MAX_DIM = 3
_INT64_SAFE = 1 << 62


class RasterError(ValueError):
    pass


def thread_count() -> int:
    """Internal parallelism cap from ``BETTI_BOUNDS_THREADS`` (default 1)."""
    raw = os.environ.get("BETTI_BOUNDS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _as_box(box) -> Fraction:
    r = Fraction(box)
    if r <= 0:
        raise RasterError(f"box half-width must be positive, got {box}")
    return r


def _as_res(resolution, dim: int) -> tuple[int, ...]:
    if isinstance(resolution, int):
        res = (resolution,) * dim
    else:
        res = tuple(int(r) for r in resolution)
    if len(res) != dim or any(r < 1 for r in res):
        raise RasterError(f"resolution {resolution} does not fit dimension {dim}")
    return res


class CubicalSet:
    """Occupancy of the top cells of a grid on ``[-R, R]^n`` (row-major, axis 0 first)."""

    __slots__ = ("box", "resolution", "occupancy")

    def __init__(self, box, resolution: Sequence[int], occupancy: np.ndarray):
        self.box = _as_box(box)
        self.resolution = tuple(int(r) for r in resolution)
        if not 1 <= len(self.resolution) <= MAX_DIM:
            raise RasterError(f"dimension {len(self.resolution)} is outside 1..{MAX_DIM}")
        occ = np.ascontiguousarray(occupancy, dtype=bool)
        if occ.shape != self.resolution:
            raise RasterError(f"occupancy shape {occ.shape} does not match resolution {self.resolution}")
        occ = occ.copy()
        occ.setflags(write=False)
        self.occupancy = occ

    @property
    def dim(self) -> int:
        return len(self.resolution)

    @property
    def count(self) -> int:
        return int(self.occupancy.sum())

    def cell_width(self, axis: int = 0) -> Fraction:
        return 2 * self.box / self.resolution[axis]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CubicalSet):
            return NotImplemented
        return (
            self.box == other.box
            and self.resolution == other.resolution
            and bool(np.array_equal(self.occupancy, other.occupancy))
        )

    def __hash__(self) -> int:
        return hash((self.box, self.resolution, self.occupancy.tobytes()))

    def issubset(self, other: "CubicalSet") -> bool:
        self._same_grid(other)
        return bool(np.all(~self.occupancy | other.occupancy))

    def _same_grid(self, other: "CubicalSet") -> None:
        if self.box != other.box or self.resolution != other.resolution:
            raise RasterError("cubical sets live on different grids")

    def __repr__(self) -> str:
        return f"CubicalSet(box={self.box}, resolution={self.resolution}, occupied={self.count})"


# ---------------------------------------------------------------------------
# exact grid evaluation
# ---------------------------------------------------------------------------


class GridEvaluator:
    """Evaluates polynomial signs on a product grid of lattice coordinates.

    ``axes[i]`` holds the integer ``a`` values along axis ``i``; the real
    coordinate is ``Rn * a / q``.  Values of the non-constant part of each
    polynomial are cached, so families differing only by constants (the
    ``h - delta`` shifts of the thickening constructions) cost one evaluation.
    """

    def __init__(self, box: Fraction, q: int, axes: Sequence[np.ndarray]):
        self.box = box
        self.q = q
        self.axes = [np.asarray(a, dtype=np.int64) for a in axes]
        self.shape = tuple(len(a) for a in self.axes)
        self.dim = len(self.axes)
        self._cache: dict[Polynomial, tuple[np.ndarray, int, int, int]] = {}

    def _scaled_part(self, p0: Polynomial) -> tuple[np.ndarray, int, int, int]:
        """Integer array ``p0 * L * q^D`` plus ``(L, D, bound on |values|)``."""
        hit = self._cache.get(p0)
        if hit is not None:
            return hit
        D = p0.degree
        L = 1
        for _, c in p0.terms:
            L = L * c.denominator // math.gcd(L, c.denominator)
        rn = self.box.numerator
        coeffs = []
        for e, c in p0.terms:
            k = sum(e)
            coeffs.append((e, int(c * L) * rn**k * self.q ** (D - k)))
        amax = [int(np.abs(a).max()) if len(a) else 0 for a in self.axes]
        bound = sum(abs(c) * math.prod(amax[i] ** k for i, k in enumerate(e) if k) for e, c in coeffs)
        use_obj = bound >= _INT64_SAFE
        dtype = object if use_obj else np.int64
        values = np.zeros(self.shape, dtype=dtype)
        for e, c in coeffs:
            term = np.array(c, dtype=dtype)
            for i, k in enumerate(e):
                if not k:
                    continue
                col = self.axes[i].astype(dtype) ** k
                shape = [1] * self.dim
                shape[i] = -1
                term = term * col.reshape(shape)
            values = values + term
        if values.shape != self.shape:
            values = np.broadcast_to(values, self.shape).copy()
        out = (values, L, D, bound)
        self._cache[p0] = out
        return out

    def values(self, p: Polynomial) -> np.ndarray:
        """Integer array with the sign of ``p`` at every grid point."""
        if p.max_var_index() >= self.dim:
            raise RasterError(f"polynomial uses x{p.max_var_index()} but the grid has {self.dim} axes")
        p = p.with_n_vars(self.dim) if p.n_vars != self.dim else p
        p0 = p.without_constant()
        const = p.constant_term
        if p0.is_zero:
            s = (const > 0) - (const < 0)
            return np.full(self.shape, s, dtype=np.int64)
        vals, L, D, bound = self._scaled_part(p0)
        k = const * L * self.q**D
        num, den = k.numerator, k.denominator
        if vals.dtype != object and bound * den + abs(num) >= _INT64_SAFE:
            vals = vals.astype(object)
        if den == 1:
            return vals + num if num else vals
        return vals * den + num

    def sign(self, p: Polynomial) -> np.ndarray:
        v = self.values(p)
        return ((v > 0).astype(np.int8) - (v < 0).astype(np.int8)).astype(np.int8)

    def prefetch(self, polys: Sequence[Polynomial]) -> None:
        """Warm the cache, in parallel when ``BETTI_BOUNDS_THREADS`` > 1."""
        parts = list(dict.fromkeys(p.with_n_vars(self.dim).without_constant() for p in polys))
        parts = [p for p in parts if not p.is_zero and p not in self._cache]
        workers = min(thread_count(), len(parts))
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                results = list(pool.map(self._compute_uncached, parts))
            for p, r in zip(parts, results):
                self._cache.setdefault(p, r)
        else:
            for p in parts:
                self._scaled_part(p)

    def _compute_uncached(self, p0: Polynomial):
        # a private evaluator avoids racing on the shared cache
        return GridEvaluator(self.box, self.q, self.axes)._scaled_part(p0)


@dataclass(frozen=True)
class Lattice:
    """The doubled lattice of a box and resolution."""

    box: Fraction
    resolution: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.resolution)

    @property
    def q(self) -> int:
        # one common scale; axes with other resolutions are rescaled below
        return self.box.denominator * math.lcm(*self.resolution)

    def _axis(self, i: int, which: str) -> np.ndarray:
        N = self.resolution[i]
        scale = math.lcm(*self.resolution) // N
        if which == "centers":
            js = np.arange(1, 2 * N, 2)
        elif which == "vertices":
            js = np.arange(0, 2 * N + 1, 2)
        else:
            js = np.arange(0, 2 * N + 1)
        return (js - N) * scale

    def evaluator(self, which: str) -> GridEvaluator:
        return GridEvaluator(self.box, self.q, [self._axis(i, which) for i in range(self.dim)])

    def point(self, index: Sequence[int], which: str = "all") -> tuple[Fraction, ...]:
        """Rational coordinates of a grid point of the given kind."""
        return tuple(
            Fraction(int(self._axis(i, which)[k]) * self.box.numerator, self.q) for i, k in enumerate(index)
        )


def _eval_tree(f: Formula, atom_mask) -> np.ndarray:
    if isinstance(f, Atom):
        return atom_mask(f)
    if isinstance(f, Not):
        return ~_eval_tree(f.child, atom_mask)
    if isinstance(f, And):
        out = None
        for c in f.children:
            m = _eval_tree(c, atom_mask)
            out = m if out is None else (out & m)
        return out if out is not None else atom_mask(None)
    out = None
    for c in f.children:
        m = _eval_tree(c, atom_mask)
        out = m if out is None else (out | m)
    return out if out is not None else ~atom_mask(None)


def _rel_mask(rel: Rel, sign: np.ndarray) -> np.ndarray:
    if rel is Rel.EQ:
        return sign == 0
    if rel is Rel.GT:
        return sign > 0
    if rel is Rel.LT:
        return sign < 0
    if rel is Rel.GE:
        return sign >= 0
    return sign <= 0


def rasterize(
    formula: Formula,
    box,
    resolution,
    mode: str = "center",
    dim: int | None = None,
) -> CubicalSet:
    """Occupy each cell whose center satisfies ``formula`` (exact arithmetic).

    With ``mode="crossing"`` an equation atom ``h = 0`` holds on a cell when
    ``h`` vanishes at a corner or changes sign between corners, so curves
    and points are not lost between cell centers.  All other atoms use the
    center value.
    """
    if mode not in ("center", "crossing"):
        raise RasterError(f"unknown rasterization mode {mode!r}")
    n = dim if dim is not None else max(n_vars_of(formula), 1)
    if not 1 <= n <= MAX_DIM:
        raise RasterError(f"dimension {n} is outside 1..{MAX_DIM}")
    for a in iter_atoms(formula):
        if not isinstance(a.fn, Polynomial):
            raise RasterError("cannot rasterize an abstract function")
    R = _as_box(box)
    res = _as_res(resolution, n)
    lattice = Lattice(R, res)
    centers = lattice.evaluator("centers")
    centers.prefetch([a.fn for a in iter_atoms(formula)])
    vertices = lattice.evaluator("vertices") if mode == "crossing" else None
    cache: dict[Atom, np.ndarray] = {}

    def atom_mask(a: Atom | None) -> np.ndarray:
        if a is None:
            return np.ones(res, dtype=bool)
        hit = cache.get(a)
        if hit is not None:
            return hit
        if vertices is not None and a.rel is Rel.EQ:
            m = _crossing_mask(vertices.sign(a.fn), res)
        else:
            m = _rel_mask(a.rel, centers.sign(a.fn))
        cache[a] = m
        return m

    occ = _eval_tree(formula, atom_mask)
    return CubicalSet(R, res, np.broadcast_to(occ, res))


def _crossing_mask(vsign: np.ndarray, res: tuple[int, ...]) -> np.ndarray:
    lo = np.full(res, 1, dtype=np.int8)
    hi = np.full(res, -1, dtype=np.int8)
    for offs in product((0, 1), repeat=len(res)):
        sl = tuple(slice(o, o + N) for o, N in zip(offs, res))
        corner = vsign[sl]
        lo = np.minimum(lo, corner)
        hi = np.maximum(hi, corner)
    return (lo <= 0) & (hi >= 0)


def grid_sign_vectors(fs: Sequence[Polynomial], box, resolution, dim: int | None = None):
    """Distinct sign vectors of ``fs`` over every doubled-lattice point, with a witness each."""
    n = dim if dim is not None else max([p.max_var_index() + 1 for p in fs] + [1])
    R = _as_box(box)
    res = _as_res(resolution, n)
    lattice = Lattice(R, res)
    if not fs:
        return {(): lattice.point((res[i] for i in range(n)), "all")}
    ev = lattice.evaluator("all")
    ev.prefetch(list(fs))
    stack = np.stack([ev.sign(p).ravel() for p in fs], axis=1)
    uniq, first = np.unique(stack, axis=0, return_index=True)
    shape = ev.shape
    out = {}
    for row, idx in zip(uniq, first):
        out[tuple(int(x) for x in row)] = lattice.point(np.unravel_index(int(idx), shape), "all")
    return out
