import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betti_bounds.complexity import (
    ArityError,
    ComplexityError,
    MeasureError,
    PfaffianComplexity,
    degree_measure,
    fold_complexity,
    fold_repeated,
    gamma,
    get_measure,
    kappa,
    khovanskii_tn,
    load_measure,
    measure_from_rules,
    measure_names,
    omega,
    omega_single,
    parse_rule_file,
    partial_complexity,
    pfaffian_measure,
    register_measure,
)

from oracles import degree_gamma, khovanskii, pfaffian_gamma, pfaffian_omega, thom_milnor

DEG = degree_measure()
PF = pfaffian_measure()


def test_fold_examples():
    assert fold_complexity(DEG, "times", [(2,), (2,), (2,)]) == (6,)
    assert fold_complexity(DEG, "plus", [(3,), (1,), (2,)]) == (3,)
    assert fold_complexity(PF, "plus", [(2, 3, 1)]) == (2, 3, 1)
    assert fold_repeated(DEG, "times", (3,), 4) == (12,)


def test_fold_errors():
    with pytest.raises(ArityError, match="vector #1"):
        fold_complexity(DEG, "plus", [(1,), (1, 2)])
    with pytest.raises(ComplexityError):
        fold_complexity(DEG, "plus", [])
    with pytest.raises(ValueError):
        fold_complexity(DEG, "minus", [(1,)])


def test_partial_and_kappa():
    assert partial_complexity(DEG, (5,)) == (4,)
    assert partial_complexity(DEG, (1,)) == (0,)
    assert partial_complexity(DEG, (0,)) == (0,)
    assert partial_complexity(PF, (2, 3, 1)) == (2, 4, 1)
    assert kappa(DEG, (4,)) == (3,)
    assert kappa(DEG, (1,)) == (0,)
    assert kappa(PF, (2, 3, 1)) == (2, 4, 1)


def test_gamma_examples():
    assert gamma(DEG, 3, (3,)) == 12
    assert gamma(DEG, 1, (7,)) == 7
    assert gamma(PF, 1, (1, 1, 1)) == 2
    with pytest.raises(ComplexityError):
        gamma(DEG, 0, (2,))


def test_khovanskii_examples():
    assert khovanskii_tn(1, [PfaffianComplexity(1, 2, 1)]) == 6
    assert khovanskii_tn(1, [(1, 1, 0)]) == 1
    assert khovanskii_tn(2, [(1, 1, 1), (1, 1, 1)]) == 2
    with pytest.raises(ComplexityError):
        khovanskii_tn(0, [])


def test_omega_examples():
    assert omega(DEG, 3, [(3,)]) == 75
    assert omega(DEG, 1, [(1,)]) == 1
    with pytest.raises(ComplexityError):
        omega(DEG, 2, [], [])


def test_degree_closed_forms_exhaustive():
    for d in range(1, 51):
        assert kappa(DEG, (d,)) == (d - 1,)
        for n in range(1, 11):
            assert gamma(DEG, n, (d,)) == degree_gamma(d, n)


def test_degree_omega_is_thom_milnor():
    for d in range(1, 8):
        for n in range(1, 6):
            fs = [(k,) for k in range(1, d + 1)]
            assert omega(DEG, n, fs, [(1,)] * (d % 3)) == thom_milnor(d, n)


def test_pfaffian_gamma_and_omega_closed_forms():
    for a, b, r, n in itertools.product(range(1, 6), range(1, 6), range(0, 5), range(1, 5)):
        assert kappa(PF, (a, b, r)) == (a, a + b - 1, r)
        assert gamma(PF, n, (a, b, r)) == pfaffian_gamma(n, a, b, r)
        assert omega(PF, n, [(a, b, r)]) == pfaffian_omega(n, a, b, r)


def test_khovanskii_matches_printed_form():
    for n, r, a in itertools.product(range(1, 4), range(0, 4), range(1, 4)):
        for betas in itertools.product(range(1, 4), repeat=n):
            cs = [(a, b, r) for b in betas]
            assert khovanskii_tn(n, cs) == khovanskii(n, r, a, list(betas))


def test_unshared_chain_adds_orders():
    un = pfaffian_measure(shared_chain=False)
    assert un.plus((1, 2, 1), (2, 1, 2)) == (2, 2, 3)
    assert PF.plus((1, 2, 1), (2, 1, 2)) == (2, 2, 2)
    assert un.times((1, 2, 1), (2, 1, 2)) == (2, 3, 3)


def test_norm_squared_complexity():
    assert DEG.norm_squared(3) == (2,)
    assert PF.norm_squared(3) == (1, 2, 0)


def test_omega_single_quantified_example():
    # F = {g, |x|^2} with deg g = 2 over R^5: gamma(5, 4) / 2 = 4 * 3^4 / 2
    assert omega_single(DEG, 5, [(2,), DEG.norm_squared(5)]) == 162


vec1 = st.integers(0, 30).map(lambda x: (x,))
vec3 = st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 4))


@given(vec1, vec1, vec1)
def test_degree_folds_associative(a, b, c):
    for op in ("plus", "times"):
        rule = DEG.plus if op == "plus" else DEG.times
        assert rule(rule(a, b), c) == rule(a, rule(b, c))
        assert fold_complexity(DEG, op, [a, b, c]) == rule(rule(a, b), c)


@given(st.sampled_from([DEG, PF]), st.data())
def test_constants_absorb(measure, data):
    v = data.draw(vec1 if measure.arity == 1 else vec3)
    assert fold_complexity(measure, "plus", [v, measure.zero]) == v
    assert fold_complexity(measure, "plus", [measure.zero, v]) == v
    assert measure.times(measure.zero, v) == v


@settings(max_examples=200)
@given(
    st.integers(1, 5),
    st.tuples(st.integers(1, 5), st.integers(1, 5), st.integers(0, 3)),
    st.integers(0, 2),
    st.integers(0, 2),
)
def test_pfaffian_gamma_monotone(n, c, axis, bump):
    bigger = list(c)
    bigger[axis] += bump
    assert gamma(PF, n, c) <= gamma(PF, n, tuple(bigger))
    assert gamma(PF, n, c) <= gamma(PF, n + 1, c)


@given(st.integers(2, 40), st.integers(1, 8))
def test_degree_gamma_monotone(d, n):
    assert gamma(DEG, n, (d,)) <= gamma(DEG, n, (d + 1,))
    assert gamma(DEG, n, (d,)) <= gamma(DEG, n + 1, (d,))


def test_degree_gamma_not_monotone_in_n_for_linear():
    # d = 1: a linear function has no critical points beyond dimension 1
    assert gamma(DEG, 1, (1,)) == 1
    assert gamma(DEG, 2, (1,)) == 0


@given(vec3, vec3)
def test_pfaffian_rules_monotone(a, b):
    for rule in (PF.plus, PF.times):
        out = rule(a, b)
        for i in range(3):
            grown = list(a)
            grown[i] += 1
            assert all(x <= y for x, y in zip(out, rule(tuple(grown), b)))


RULES = """
[measure]
name = degree-copy
arity = 1
coordinate = 1
polynomial = d
plus = max(a1, b1)
times = a1 + b1
partial = max(a1 - 1, 0)
solutions = prod(col(1))
"""


def test_user_measure_reproduces_degree():
    m = measure_from_rules(parse_rule_file(RULES))
    for d in range(1, 8):
        for n in range(1, 5):
            assert gamma(m, n, (d,)) == gamma(DEG, n, (d,))
    assert omega(m, 2, [(2,)]) == 6


def test_user_measure_file_and_registry(tmp_path):
    path = tmp_path / "m.rules"
    path.write_text(RULES.replace("degree-copy", "degree-file"))
    m = load_measure(path)
    register_measure(m)
    assert "degree-file" in measure_names()
    assert get_measure("degree-file") is m
    with pytest.raises(MeasureError, match="unknown measure"):
        get_measure("nope")


@pytest.mark.parametrize(
    "patch, message",
    [
        (("coordinate = 1", "coordinate = 2"), "coordinate"),
        (("plus = max(a1, b1)", "plus = a1 + b1 + 1"), "constant"),
        (("times = a1 + b1", "times = __import__('os')"), "not allowed"),
        (("solutions = prod(col(1))", "solutions = -1"), "t_1"),
        (("arity = 1", "arity = 1\nbogus = 3"), "unknown keys"),
    ],
)
def test_user_measure_rejections(patch, message):
    with pytest.raises(MeasureError, match=message):
        measure_from_rules(parse_rule_file(RULES.replace(*patch)))


def test_rule_file_header_required():
    with pytest.raises(MeasureError, match="header"):
        parse_rule_file("name = x\n")
