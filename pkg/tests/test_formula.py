import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from betti_bounds.complexity import degree_measure, pfaffian_measure
from betti_bounds.formula import (
    FALSE,
    TRUE,
    AbstractFunction,
    And,
    Atom,
    FormulaClass,
    FormulaSyntaxError,
    MixedRecipe,
    Not,
    NormTimesProduct,
    Or,
    Quantifier,
    QuantifiedFormula,
    Rel,
    SumSquaresPlusNorm,
    atoms_of,
    classify,
    composite_complexity,
    evaluate,
    expand_recipe,
    iter_atoms,
    looks_quantified,
    normalize,
    parse_formula,
    parse_quantified,
    to_text,
)
from betti_bounds.lab.corpus import DOMINATION_CORPUS
from betti_bounds.polynomial import Polynomial

DEG = degree_measure()


def test_parse_single_equation():
    f = parse_formula("x0^2 + x1^2 - 1 = 0")
    assert isinstance(f, Atom) and f.rel is Rel.EQ
    assert f.fn.degree == 2 and f.fn.n_vars == 2
    assert f.fn.evaluate([1, 0]) == 0


def test_parse_tree_shape():
    f = parse_formula("(x0 >= 0 & x1 > 0) | !(x0 = 0)")
    assert isinstance(f, Or)
    left, right = f.children
    assert isinstance(left, And) and [a.rel for a in left.children] == [Rel.GE, Rel.GT]
    assert isinstance(right, Not) and right.child.rel is Rel.EQ


def test_shared_descriptors():
    f = parse_formula("x0 - 1 > 0 & x0 - 1 < 0 | x0 - 1 = 0")
    fns = {id(a.fn) for a in iter_atoms(f)}
    assert len(fns) == 1


def test_dangling_operator_offset():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("x0^2 +")
    assert info.value.offset == 5
    assert info.value.line == 1 and info.value.column == 6


def test_multiline_error_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("x0 > 0 &\n  x1 >> 0")
    assert info.value.line == 2


@pytest.mark.parametrize("text", ["x0 > 1", "x0 ? 0", "x2 > 0 & ", "(x0 > 0", "x0 > 0)", "y0 > 0", "1/0*x0 > 0"])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text, n_vars=2)


def test_unknown_variable_index():
    with pytest.raises(FormulaSyntaxError, match="x3"):
        parse_formula("x3 > 0", n_vars=2)


def test_rational_coefficients_and_juxtaposition():
    f = parse_formula("3/4*x0^2x1 - x1 + 1/2 >= 0")
    assert f.fn.evaluate([2, 1]) == Fraction(3) - 1 + Fraction(1, 2)


def test_constants_print():
    assert to_text(TRUE) == "0 = 0"
    assert to_text(FALSE) == "1 = 0"
    assert evaluate(parse_formula(to_text(TRUE)), [0])
    assert not evaluate(parse_formula(to_text(FALSE)), [0])


def test_normalize_examples():
    p = parse_formula("x0 > 0").fn
    assert normalize(Not(Atom(p, Rel.GT))) == Atom(p, Rel.LE)
    assert normalize(Not(Atom(p, Rel.EQ))) == Or((Atom(p, Rel.GT), Atom(p, Rel.LT)))
    tree = And((Atom(p, Rel.GE), Or((Atom(p, Rel.LT), Atom(p, Rel.EQ)))))
    assert normalize(tree) == tree


def test_classify_examples():
    assert classify(parse_formula("x0 >= 0 & x1 >= 0")) is FormulaClass.CLOSED
    assert classify(parse_formula("x0 > 0 | x1 < 0")) is FormulaClass.OPEN
    assert classify(parse_formula("x0 >= 0 & x1 > 0")) is FormulaClass.MIXED
    assert classify(parse_formula("!(x0 > 0)")) is FormulaClass.CLOSED


def test_atoms_of_counts_functions():
    assert atoms_of(parse_formula("x0 = 0 & x0 > 0"))[0] == 1
    assert atoms_of(parse_formula("x0 = 0 & x1 > 0"))[0] == 2
    assert atoms_of(And(()))[0] == 0
    assert atoms_of(parse_formula("!(x0 = 0)"))[0] == 1


def test_quantified_parse():
    qf = parse_quantified("E(1) A(2) : x0^2 + x1 - x2*x3 >= 0", free_dim=1)
    assert qf.nu == 2 and qf.widths == (1, 1, 2)
    assert list(qf.block_indices(2)) == [2, 3]
    assert qf.blocks[1][0] is Quantifier.FORALL
    assert parse_quantified(qf.to_text(), 1) == qf
    assert looks_quantified(" E(1): x0 > 0") and not looks_quantified("x0 > 0")


def test_quantified_validation():
    with pytest.raises(ValueError, match="alternate"):
        QuantifiedFormula(((Quantifier.EXISTS, 1), (Quantifier.EXISTS, 1)), 1, parse_formula("x0 > 0"))
    with pytest.raises(FormulaSyntaxError):
        parse_quantified("E(1): x3 > 0", free_dim=1)


def test_composite_examples():
    p2 = Polynomial.norm_squared(2) - 1
    assert composite_complexity(DEG, SumSquaresPlusNorm((p2,)), 2) == (4,)
    pf = pfaffian_measure()
    for a, b, r in [(1, 1, 0), (2, 3, 1), (3, 1, 2)]:
        f = AbstractFunction((a, b, r))
        assert composite_complexity(pf, SumSquaresPlusNorm((f,)), 4) == (a, 2 * b, r)
    for p, d in itertools.product(range(1, 5), range(1, 5)):
        fs = tuple(AbstractFunction((d,)) for _ in range(p))
        assert composite_complexity(DEG, NormTimesProduct(fs), 3) == (2 + p * d,)
    assert composite_complexity(DEG, MixedRecipe((p2,), ()), 2) == (10,)
    with pytest.raises(ValueError):
        composite_complexity(DEG, SumSquaresPlusNorm(()), 2)


# -- generated formulas -----------------------------------------------------

monomials = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 1))
coeffs = st.fractions(min_value=-3, max_value=3, max_denominator=4).filter(lambda c: c != 0)
polys = st.dictionaries(monomials, coeffs, min_size=1, max_size=4).map(lambda d: Polynomial.from_dict(3, d))
rels = st.sampled_from(list(Rel))
atoms = st.builds(Atom, polys, rels)


def _trees(children):
    return st.one_of(
        st.lists(children, min_size=0, max_size=3).map(lambda cs: And(tuple(cs))),
        st.lists(children, min_size=0, max_size=3).map(lambda cs: Or(tuple(cs))),
        children.map(Not),
    )


formulas = st.recursive(atoms, _trees, max_leaves=6)
points = st.tuples(*[st.fractions(min_value=-2, max_value=2, max_denominator=3)] * 3)


def _reparse(f):
    return parse_formula(to_text(f), n_vars=3)


@settings(max_examples=150, deadline=None)
@given(formulas)
def test_print_parse_round_trip(f):
    once = _reparse(f)
    assert _reparse(once) == once


@settings(max_examples=150, deadline=None)
@given(formulas, st.lists(points, min_size=1, max_size=8))
def test_printing_preserves_membership(f, pts):
    g = _reparse(f)
    for p in pts:
        assert evaluate(f, p) == evaluate(g, p)


@settings(max_examples=150, deadline=None)
@given(formulas, st.lists(points, min_size=1, max_size=8))
def test_normalize_idempotent_and_equivalent(f, pts):
    nf = normalize(f)
    assert normalize(nf) == nf
    assert not any(isinstance(x, Not) for x in _nodes(nf))
    for p in pts:
        assert evaluate(f, p) == evaluate(nf, p)


def _nodes(f):
    yield f
    if isinstance(f, Not):
        yield from _nodes(f.child)
    elif isinstance(f, (And, Or)):
        for c in f.children:
            yield from _nodes(c)


pure_closed = st.recursive(
    st.builds(Atom, polys, st.sampled_from([Rel.EQ, Rel.GE, Rel.LE])),
    lambda ch: st.one_of(
        st.lists(ch, min_size=1, max_size=3).map(lambda cs: And(tuple(cs))),
        st.lists(ch, min_size=1, max_size=3).map(lambda cs: Or(tuple(cs))),
    ),
    max_leaves=5,
)


@given(pure_closed)
def test_classify_flips_under_negation(f):
    assert classify(f) is FormulaClass.CLOSED
    assert classify(normalize(Not(f))) is FormulaClass.OPEN
    assert classify(normalize(Not(Not(f)))) is FormulaClass.CLOSED


def test_normalize_equivalent_on_grid():
    grid = [Fraction(k, 4) for k in range(-8, 9)]
    for case in DOMINATION_CORPUS:
        f = case.formula
        n = max(a.fn.n_vars for a in iter_atoms(f))
        if n > 3:
            continue
        nf = normalize(f)
        for pt in itertools.product(grid, repeat=n):
            assert evaluate(f, pt) == evaluate(nf, pt), (case.name, pt)


# -- sympy expansion oracle ------------------------------------------------

X = sympy.symbols("x0:3")


def _sympy_of(terms):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([x**e for x, e in zip(X, exp)]) for exp, c in terms.items())


def _text_of(terms):
    parts = []
    for exp, c in terms.items():
        mono = "*".join(f"x{i}^{e}" for i, e in enumerate(exp) if e)
        parts.append(f"({c.numerator}/{c.denominator})" if not mono else f"{c.numerator}/{c.denominator}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


poly_terms = st.dictionaries(
    st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)).filter(lambda e: 0 < sum(e) <= 4),
    st.fractions(min_value=1, max_value=5, max_denominator=3),
    min_size=1,
    max_size=3,
)


@settings(max_examples=60, deadline=None)
@given(st.lists(poly_terms, min_size=1, max_size=3), st.integers(0, 2), st.sampled_from(["sos", "prod", "mixed"]))
def test_composite_degree_matches_expansion(fs, split, kind):
    polys_ = [parse_formula(_text_of(t) + " = 0", n_vars=3).fn for t in fs]
    syms = [_sympy_of(t) for t in fs]
    norm = sum(x**2 for x in X)
    if kind == "sos":
        recipe, expr = SumSquaresPlusNorm(tuple(polys_)), sum(s**2 for s in syms) + norm
    elif kind == "prod":
        recipe, expr = NormTimesProduct(tuple(polys_)), norm * sympy.prod(syms)
    else:
        k = min(split, len(polys_))
        eqs, ineqs = polys_[:k], polys_[k:]
        sq = sum(s**2 for s in syms[:k]) if k else 1
        recipe, expr = MixedRecipe(tuple(eqs), tuple(ineqs)), norm * sq**2 * sympy.prod(syms[k:])
    expected = sympy.Poly(sympy.expand(expr), *X).total_degree()
    assert composite_complexity(DEG, recipe, 3) == (expected,)
    assert expand_recipe(recipe, 3).degree == expected
