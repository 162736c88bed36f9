"""Betti numbers of cubical sets over a field.

The closed cubical complex generated by the occupied top cells is stored in
the doubled-lattice array (odd coordinate = interval factor, even = vertex).
It is first shrunk by coreduction: one vertex per connected component is
removed (each accounts for one generator of ``H_0``), then pairs ``(a, b)``
where ``b`` is the only remaining face of ``a`` are cancelled, which leaves
homology unchanged.  Ranks of the boundary matrices of what remains give the
other Betti numbers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import ndimage

from .raster import CubicalSet, RasterError

Field = Union[str, int]


@dataclass(frozen=True)
class BettiVector:
    ranks: tuple[int, ...]
    field: str = "GF2"

    def __post_init__(self) -> None:
        if any(r < 0 for r in self.ranks):
            raise ValueError(f"negative Betti number in {self.ranks}")

    @property
    def total(self) -> int:
        return sum(self.ranks)

    def __getitem__(self, k: int) -> int:
        return self.ranks[k] if k < len(self.ranks) else 0

    def __iter__(self):
        return iter(self.ranks)

    def __len__(self) -> int:
        return len(self.ranks)

    def trimmed(self) -> tuple[int, ...]:
        """Ranks without trailing zeros, e.g. ``(1, 1)`` for an annulus in R^3."""
        r = list(self.ranks)
        while r and r[-1] == 0:
            r.pop()
        return tuple(r)

    def same_ranks(self, other: "BettiVector") -> bool:
        return self.trimmed() == other.trimmed()


def _field_prime(field: Field) -> int:
    if isinstance(field, int):
        p = field
    else:
        name = field.upper().replace(" ", "")
        if name == "GF2":
            return 2
        if name.startswith("GF(") and name.endswith(")"):
            p = int(name[3:-1])
        elif name.startswith("GFP(") and name.endswith(")"):
            p = int(name[4:-1])
        else:
            raise ValueError(f"unknown coefficient field {field!r}; use GF2 or GF(p)")
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    return p


def _field_name(p: int) -> str:
    return "GF2" if p == 2 else f"GF({p})"


def closure_array(occupancy: np.ndarray) -> np.ndarray:
    """Doubled-lattice indicator of the closed complex.

    Two empty layers surround it so that every neighbour of a live cell is a
    valid index and odd coordinates still mark interval factors.
    """
    occ = np.asarray(occupancy, dtype=bool)
    shape = tuple(2 * s + 5 for s in occ.shape)
    top = np.zeros(shape, dtype=bool)
    top[tuple(slice(3, 2 * s + 2, 2) for s in occ.shape)] = occ
    return ndimage.binary_dilation(top, structure=np.ones((3,) * occ.ndim, dtype=bool))


def _parity_codes(shape: tuple[int, ...]) -> np.ndarray:
    code = np.zeros(shape, dtype=np.uint8)
    for i, s in enumerate(shape):
        axis = (np.arange(s) % 2).astype(np.uint8) << i
        view = [1] * len(shape)
        view[i] = s
        code = code | axis.reshape(view)
    return code


def betti(cs: CubicalSet | np.ndarray, field: Field = "GF2") -> BettiVector:
    """Betti numbers ``b_0..b_n`` of the closed union of the occupied cells."""
    occ = cs.occupancy if isinstance(cs, CubicalSet) else np.asarray(cs, dtype=bool)
    n = occ.ndim
    if not 1 <= n <= 3:
        raise RasterError(f"homology is implemented for dimensions 1..3, got {n}")
    p = _field_prime(field)
    if not occ.any():
        return BettiVector((0,) * (n + 1), _field_name(p))

    full = closure_array(occ)
    shape = full.shape
    strides = [int(np.prod(shape[i + 1 :])) for i in range(n)]
    flat = full.ravel()
    alive = bytearray(flat.astype(np.uint8).tobytes())
    codes = _parity_codes(shape).ravel().tolist()

    # per parity code: the axes that are intervals and the axes that are vertices
    axis_info = []
    for code in range(1 << n):
        odd = [i for i in range(n) if code >> i & 1]
        even = [i for i in range(n) if not code >> i & 1]
        axis_info.append((odd, even))

    def faces(c: int):
        odd, _ = axis_info[codes[c]]
        out = []
        for i in odd:
            out.append(c - strides[i])
            out.append(c + strides[i])
        return out

    def cofaces(c: int):
        _, even = axis_info[codes[c]]
        out = []
        for i in even:
            out.append(c - strides[i])
            out.append(c + strides[i])
        return out

    # one vertex per connected component: the lower corner of some top cell
    labels, ncomp = ndimage.label(occ, structure=np.ones((3,) * n, dtype=bool))
    firsts = ndimage.find_objects(labels)
    seeds = []
    for k, sl in enumerate(firsts, start=1):
        sub = labels[sl] == k
        local = np.argwhere(sub)[0]
        cell = [s.start + int(x) for s, x in zip(sl, local)]
        seeds.append(sum((2 * c + 2) * st for c, st in zip(cell, strides)))

    queued = bytearray(len(alive))
    Q: deque[int] = deque()

    def push_cofaces(c: int) -> None:
        for d in cofaces(c):
            if alive[d] and not queued[d]:
                queued[d] = 1
                Q.append(d)

    for v in seeds:
        assert alive[v] and codes[v] == 0
        alive[v] = 0
        push_cofaces(v)
        while Q:
            a = Q.popleft()
            queued[a] = 0
            if not alive[a]:
                continue
            live = [f for f in faces(a) if alive[f]]
            if len(live) == 1:
                b = live[0]
                alive[a] = 0
                alive[b] = 0
                push_cofaces(b)
                push_cofaces(a)

    remaining = np.flatnonzero(np.frombuffer(bytes(alive), dtype=np.uint8))
    by_dim: list[list[int]] = [[] for _ in range(n + 1)]
    for c in remaining.tolist():
        by_dim[bin(codes[c]).count("1")].append(c)
    index = [{c: k for k, c in enumerate(cells)} for cells in by_dim]

    ranks = [0] * (n + 2)
    for k in range(1, n + 1):
        if not by_dim[k] or not by_dim[k - 1]:
            continue
        cols = []
        for c in by_dim[k]:
            odd, _ = axis_info[codes[c]]
            col = {}
            for pos, i in enumerate(odd):
                sgn = 1 if pos % 2 == 0 else -1
                for face, s in ((c + strides[i], sgn), (c - strides[i], -sgn)):
                    r = index[k - 1].get(face)
                    if r is not None:
                        col[r] = (col.get(r, 0) + s) % p
            cols.append({r: v for r, v in col.items() if v})
        ranks[k] = _rank_gf2(cols) if p == 2 else _rank_gfp(cols, p)

    out = []
    for k in range(n + 1):
        out.append(len(by_dim[k]) - ranks[k] - ranks[k + 1])
    out[0] += ncomp
    return BettiVector(tuple(out), _field_name(p))


def _rank_gf2(cols: list[dict[int, int]]) -> int:
    pivots: dict[int, int] = {}
    rank = 0
    for col in cols:
        v = 0
        for r in col:
            v |= 1 << r
        while v:
            low = v.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = v
                rank += 1
                break
            v ^= other
    return rank


def _rank_gfp(cols: list[dict[int, int]], p: int) -> int:
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for col in cols:
        v = dict(col)
        while v:
            low = max(v)
            other = pivots.get(low)
            if other is None:
                inv = pow(v[low], -1, p)
                pivots[low] = {r: x * inv % p for r, x in v.items()}
                rank += 1
                break
            factor = v[low]
            for r, x in other.items():
                y = (v.get(r, 0) - factor * x) % p
                if y:
                    v[r] = y
                else:
                    v.pop(r, None)
    return rank


def euler_characteristic(occupancy: np.ndarray) -> int:
    full = closure_array(occupancy)
    dims = np.zeros(full.shape, dtype=np.int8)
    code = _parity_codes(full.shape)
    for i in range(full.ndim):
        dims += (code >> i & 1).astype(np.int8)
    return int(sum((-1) ** k * int(np.count_nonzero(full & (dims == k))) for k in range(full.ndim + 1)))


def betti_by_complement(cs: CubicalSet | np.ndarray) -> tuple[int, ...]:
    """Independent check from connectivity counts and the Euler characteristic.

    ``b_0`` counts components of the union (cells touching at a corner are
    connected).  The top Betti number of a set in ``R^n`` counts the bounded
    components of the complement, where empty cells connect only through
    shared facets.  The remaining middle rank follows from the Euler
    characteristic, which determines everything for ``n <= 3``.
    """
    occ = cs.occupancy if isinstance(cs, CubicalSet) else np.asarray(cs, dtype=bool)
    n = occ.ndim
    if not occ.any():
        return (0,) * (n + 1)
    _, b0 = ndimage.label(occ, structure=np.ones((3,) * n, dtype=bool))
    padded = np.pad(~occ, 1, constant_values=True)
    _, comp = ndimage.label(padded, structure=ndimage.generate_binary_structure(n, 1))
    top = comp - 1
    chi = euler_characteristic(occ)
    if n == 1:
        return (b0, 0)
    if n == 2:
        return (b0, top, 0)
    b1 = b0 + top - chi
    return (b0, b1, top, 0)
