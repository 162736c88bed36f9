from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from betti_bounds.formula import (
    AbstractFunction,
    Atom,
    FormulaClass,
    Rel,
    classify,
    parse_formula,
    to_text,
)
from betti_bounds.lab.constructions import (
    ConstructionError,
    EpsilonSchedule,
    ScheduleError,
    UnboundedError,
    build_S_delta,
    build_S_delta_eps,
    build_T,
    closed_approximation,
    sign_decompose,
)
from betti_bounds.lab.homology import betti
from betti_bounds.lab.raster import rasterize
from betti_bounds.lab.verify import CapabilityError, compare_sets, refined, verify_domination
from betti_bounds.polynomial import Polynomial

F = Fraction


def test_schedule_values():
    s = EpsilonSchedule(F(1, 2), 1)
    assert s.delta(0) == F(1, 8) and s.eps(0) == F(1, 16)
    assert s.delta(1) == F(1, 2) and s.eps(1) == F(1, 4)
    assert s.chain == (F(1, 16), F(1, 8), F(1, 4), F(1, 2))
    with pytest.raises(ScheduleError):
        s.delta(2)
    for lam in (0, 1, F(3, 2), -1):
        with pytest.raises(ScheduleError):
            EpsilonSchedule(lam, 2)


@given(st.fractions(min_value=F(1, 1000), max_value=F(999, 1000)), st.integers(0, 6))
def test_schedule_chain_increasing_and_deterministic(lam, m):
    s = EpsilonSchedule(lam, m)
    chain = s.chain
    assert len(chain) == 2 * (m + 1)
    assert 0 < chain[0] and chain[-1] < 1
    assert all(a < b for a, b in zip(chain, chain[1:]))
    assert EpsilonSchedule(lam, m).to_text() == s.to_text()


def test_sign_decompose_examples():
    x0 = Polynomial.variable(1, 0)
    assert [sc.signs for sc in sign_decompose([x0], 1, 4)] == [(-1,), (0,), (1,)]
    assert [sc.signs for sc in sign_decompose([], 1, 4)] == [()]
    circle = Polynomial.norm_squared(2) - 1
    signs = {sc.signs for sc in sign_decompose([circle], 2, 8)}
    # spacing 1/4 on [-2, 2]^2 contains (1, 0), so the zero set is witnessed
    assert signs == {(-1,), (0,), (1,)}
    with pytest.raises(ConstructionError):
        sign_decompose([AbstractFunction((1,))], 1, 4)


def test_S_delta_example():
    f = parse_formula("x0 > 0")
    out = build_S_delta(f, EpsilonSchedule(F(1, 4), 1), 0, 2, 8, dim=1)
    assert to_text(out) == "x0 - 1/64 >= 0 & x0^2 - 64 <= 0"
    assert classify(out) is FormulaClass.CLOSED


def test_S_delta_keeps_equations():
    f = parse_formula("x0 = 0")
    out = build_S_delta(f, EpsilonSchedule(F(1, 4), 1), 1, 2, 8, dim=1)
    assert to_text(out) == "x0 = 0 & x0^2 - 4 <= 0"


def test_S_delta_eps_examples():
    sch = EpsilonSchedule(F(1, 8), 0)
    out = build_S_delta_eps(parse_formula("x0 = 0"), sch, 0, 2, 8, dim=1)
    assert to_text(out) == "x0 + 1/64 >= 0 & x0 - 1/64 <= 0 & x0^2 - 8 <= 0"
    out = build_S_delta_eps(parse_formula("x0 > 0 & x1 = 0"), sch, 0, 2, 8, dim=2)
    assert to_text(out) == "x0 - 1/8 >= 0 & x1 + 1/64 >= 0 & x1 - 1/64 <= 0 & x0^2 + x1^2 - 8 <= 0"


def test_bounded_input_gets_no_extra_ball():
    f = parse_formula("x0^2 + x1^2 - 1 < 0")
    out = build_S_delta(f, EpsilonSchedule(F(1, 4), 1), 0, 2, 8)
    assert "- 64" not in to_text(out)


CONTAIN = [
    "x0^2 + x1^2 - 1 < 0",
    "x0 > 0 & x1 - x0^2 < 0",
    "x0^2 - 1 < 0 & x1^2 - 1 < 0 & !(x0*x1 = 0)",
    "x0*x1 - 1/4 > 0 | x0 + x1 < 0",
]


@pytest.mark.parametrize("text", CONTAIN)
def test_S_delta_inside_S_and_eps_grows(text):
    f = parse_formula(text)
    box, res = 2, 24
    sch = EpsilonSchedule(F(1, 4), 2)
    S = rasterize(f, box, res)
    for k in range(3):
        Sd = rasterize(build_S_delta(f, sch, k, box, res), box, res)
        Sde = rasterize(build_S_delta_eps(f, sch, k, box, res), box, res)
        assert Sd.issubset(S)
        assert Sd.issubset(Sde)
    # a smaller delta gives a larger set
    small = rasterize(build_S_delta(f, sch, 0, box, res), box, res)
    large = rasterize(build_S_delta(f, sch, 2, box, res), box, res)
    assert large.issubset(small)


def test_construction_determinism():
    f = parse_formula("x0^2 + x1^2 - 1 < 0 & !(x0 = 0 & x1 = 0)")
    a = to_text(build_T(f, F(1, 4), 2, 2, 17))
    b = to_text(build_T(f, F(1, 4), 2, 2, 17))
    assert a == b
    assert to_text(closed_approximation(f, F(1, 4), 2, 17)) == to_text(closed_approximation(f, F(1, 4), 2, 17))


def test_build_T_shape():
    T = build_T(parse_formula("x0 > 0"), F(1, 2), 1, 2, 8, dim=1)
    assert classify(T) is FormulaClass.CLOSED
    assert betti(rasterize(T, 2, 32)).trimmed() == (1,)
    with pytest.raises(ScheduleError):
        build_T(parse_formula("x0 > 0"), F(1, 2), 0, 2, 8)


def test_build_T_on_compact_input():
    f = parse_formula("x0 >= 0 & x0^2 - 1 <= 0")
    row = compare_sets("T", f, build_T(f, F(1, 2), 1, 2, 16, dim=1), 2, 32)
    assert row.equal and row.stable


def test_closed_approximation_examples():
    xp = closed_approximation(parse_formula("x0 > 0"), F(1, 64), 2, 33, radius=1)
    assert betti(rasterize(xp, 2, 99)).trimmed() == (1,)
    pd = parse_formula("x0^2 + x1^2 - 1 < 0 & !(x0 = 0 & x1 = 0)")
    row = compare_sets("X'", pd, closed_approximation(pd, F(1, 4), 2, 33), 2, 33)
    assert row.equal and row.original.trimmed() == (1, 1)
    closed = parse_formula("x0^2 + x1^2 - 1 <= 0 & x0 >= 0")
    row = compare_sets("X'", closed, closed_approximation(closed, F(1, 4), 2, 33), 2, 33)
    assert row.equal


def test_closed_approximation_needs_bounded_set():
    with pytest.raises(UnboundedError):
        closed_approximation(parse_formula("x0 > 0"), F(1, 4), 2, 8)
    with pytest.raises(ConstructionError):
        closed_approximation(parse_formula("x0 > 0"), F(1, 4), 2, 8, radius=-1)


def test_m_below_dimension_can_disconnect():
    # x0 >= 0 with a single schedule level splits at the sign change of x0
    f = parse_formula("x0 >= 0")
    sch = EpsilonSchedule(F(1, 4), 0)
    lone = build_S_delta_eps(f, sch, 0, 2, 8, dim=1)
    assert betti(rasterize(lone, 2, 64)).trimmed() == (2,)


# -- verification -----------------------------------------------------------


def test_verify_circle():
    rep = verify_domination(parse_formula("x0^2 + x1^2 - 1 = 0"), box=2, resolution=32)
    assert rep.betti.trimmed() == (1, 1) and rep.bound.value == 6 and rep.passed
    assert rep.mode == "crossing" and not rep.stability_warning


def test_verify_three_disks_boolean_route():
    f = parse_formula("x0^2 + 4*x0 + x1^2 + 15/4 <= 0 | x0^2 + x1^2 - 1/4 <= 0 | x0^2 - 4*x0 + x1^2 + 15/4 <= 0")
    rep = verify_domination(f, route="boolean", box=3, resolution=36)
    assert rep.betti.trimmed() == (3,) and rep.bound.theorem == "boolean" and rep.passed


def test_verify_corrupted_bound_fails():
    rep = verify_domination(parse_formula("x0^2 + x1^2 - 1 = 0"), box=2, resolution=32, bound_override=1)
    assert not rep.passed and rep.as_dict()["passed"] is False


def test_verify_stability_warning():
    f = parse_formula("x0^2 + x1^2 - 1 >= 0 & x0^2 + x1^2 - 9/4 <= 0")
    rep = verify_domination(f, box=2, resolution=4)
    assert rep.stability_warning
    assert rep.stability.refined_resolution == 8
    assert "changed" in rep.notes[-1]


def test_verify_capability_limits():
    with pytest.raises(CapabilityError):
        verify_domination(parse_formula("x0 + x1 + x2 + x3 > 0"))
    with pytest.raises(CapabilityError):
        verify_domination(Atom(AbstractFunction((2,)), Rel.EQ))


def test_refinement_factors():
    assert refined(32) == 64
    assert refined(33) == 99
    assert refined(10, 5) == 50
