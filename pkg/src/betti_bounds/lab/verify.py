"""Oracle checks: bounds against computed Betti numbers, and construction fidelity."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..bounds import Bound, bound_formula
from ..complexity import ComplexityMeasure, get_measure
from ..formula import Formula, Rel, is_concrete_formula, iter_atoms, n_vars_of, normalize, to_text
from .homology import BettiVector, betti
from .raster import CubicalSet, rasterize


class CapabilityError(ValueError):
    """The oracle cannot handle this input (abstract functions, too many dimensions)."""


def raster_mode(f: Formula) -> str:
    """``crossing`` when the formula has equation atoms, so thin sets stay visible."""
    return "crossing" if any(a.rel is Rel.EQ for a in iter_atoms(normalize(f))) else "center"


def refined(resolution: int, factor: int | None = None) -> int:
    """Next resolution of a stability check; odd grids refine by 3 to keep their center lattice."""
    if factor is None:
        factor = 3 if resolution % 2 else 2
    return resolution * factor


@dataclass(frozen=True)
class StabilityCheck:
    resolution: int
    refined_resolution: int
    coarse: BettiVector
    fine: BettiVector

    @property
    def stable(self) -> bool:
        return self.coarse.same_ranks(self.fine)


def oracle_betti(
    f: Formula,
    box,
    resolution: int,
    field_name="GF2",
    mode: str | None = None,
    dim: int | None = None,
) -> tuple[BettiVector, CubicalSet]:
    n = dim if dim is not None else max(n_vars_of(f), 1)
    if not is_concrete_formula(f):
        raise CapabilityError("the oracle needs concrete polynomials")
    if n > 3:
        raise CapabilityError(f"the oracle handles dimension <= 3, got {n}")
    cs = rasterize(f, box, resolution, mode=mode or raster_mode(f), dim=n)
    return betti(cs, field_name), cs


def stability(f: Formula, box, resolution: int, field_name="GF2", mode=None, dim=None, factor=None) -> StabilityCheck:
    coarse, _ = oracle_betti(f, box, resolution, field_name, mode, dim)
    fine_res = refined(resolution, factor)
    fine, _ = oracle_betti(f, box, fine_res, field_name, mode, dim)
    return StabilityCheck(resolution, fine_res, coarse, fine)


@dataclass
class DominationReport:
    formula: str
    betti: BettiVector
    bound: Bound
    box: Fraction
    resolution: int
    mode: str
    stability: StabilityCheck | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def betti_sum(self) -> int:
        return self.betti.total

    @property
    def passed(self) -> bool:
        return self.betti_sum <= self.bound.value

    @property
    def stability_warning(self) -> bool:
        return self.stability is not None and not self.stability.stable

    def as_dict(self) -> dict:
        out = {
            "formula": self.formula,
            "betti": list(self.betti.ranks),
            "field": self.betti.field,
            "betti_sum": self.betti_sum,
            "bound": str(self.bound.value),
            "theorem": self.bound.theorem,
            "passed": self.passed,
            "box": str(self.box),
            "resolution": self.resolution,
            "mode": self.mode,
            "stability_warning": self.stability_warning,
            "notes": list(self.notes),
        }
        if self.stability is not None:
            out["refined_resolution"] = self.stability.refined_resolution
            out["refined_betti"] = list(self.stability.fine.ranks)
        return out


def verify_domination(
    f: Formula,
    route: str | None = None,
    box=2,
    resolution: int = 32,
    measure: ComplexityMeasure | str = "degree",
    field_name="GF2",
    check_stability: bool = True,
    bound_override: int | None = None,
    strict: bool = False,
) -> DominationReport:
    """Compare the engine's bound for ``f`` with the oracle's Betti sum.

    ``bound_override`` replaces the engine value; it exists to exercise the
    failure path.
    """
    m = get_measure(measure) if isinstance(measure, str) else measure
    n = max(n_vars_of(f), 1)
    mode = raster_mode(f)
    b, _ = oracle_betti(f, box, resolution, field_name, mode, n)
    bnd = bound_formula(f, m, n, route=route, strict=strict)
    notes = []
    if bound_override is not None:
        bnd = Bound(bound_override, "override", {"replaced": str(bnd.value)}, trace=("test hook value",))
        notes.append("bound replaced by a caller-supplied value")
    stab = stability(f, box, resolution, field_name, mode, n) if check_stability else None
    if stab is not None and not stab.stable:
        notes.append(
            f"Betti vector changed from {stab.coarse.ranks} to {stab.fine.ranks} "
            f"between resolutions {stab.resolution} and {stab.refined_resolution}"
        )
    return DominationReport(to_text(f), b, bnd, Fraction(box), resolution, mode, stab, notes)


@dataclass(frozen=True)
class FidelityRow:
    label: str
    original: BettiVector
    constructed: BettiVector
    resolution: int
    stable: bool

    @property
    def equal(self) -> bool:
        return self.original.same_ranks(self.constructed)

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "original": list(self.original.ranks),
            "constructed": list(self.constructed.ranks),
            "equal": self.equal,
            "resolution": self.resolution,
            "stable": self.stable,
        }


def compare_sets(
    label: str,
    original: Formula,
    constructed: Formula,
    box,
    resolution: int,
    dim: int | None = None,
    field_name="GF2",
    factor: int | None = None,
) -> FidelityRow:
    """Betti vectors of a set and its construction, each checked for stability under refinement.

    The constructed sets are closed and full-dimensional, so they use center
    sampling; the original uses crossing sampling when it has equations.
    """
    n = dim if dim is not None else max(n_vars_of(original), n_vars_of(constructed), 1)
    s1 = stability(original, box, resolution, field_name, None, n, factor)
    s2 = stability(constructed, box, resolution, field_name, "center", n, factor)
    return FidelityRow(label, s1.coarse, s2.coarse, resolution, s1.stable and s2.stable)
