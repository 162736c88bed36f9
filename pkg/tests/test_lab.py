import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from betti_bounds.formula import FALSE, TRUE, evaluate, parse_formula
from betti_bounds.lab import cubical_io
from betti_bounds.lab.corpus import solid_torus_text
from betti_bounds.lab.homology import BettiVector, betti, betti_by_complement, euler_characteristic
from betti_bounds.lab.raster import CubicalSet, RasterError, rasterize, thread_count
from betti_bounds.lab.verify import stability


def shape(text, box, res, mode="center"):
    return rasterize(parse_formula(text), box, res, mode=mode)


def test_rasterize_constants():
    assert rasterize(TRUE, 2, 5, dim=2).count == 25
    assert rasterize(FALSE, 2, 5, dim=2).count == 0


def test_rasterize_disk_matches_center_enumeration():
    cs = shape("x0^2 + x1^2 - 1 <= 0", 2, 8)
    f = parse_formula("x0^2 + x1^2 - 1 <= 0")
    centers = [Fraction(-2) + Fraction(1, 2) * (i + Fraction(1, 2)) for i in range(8)]
    expected = np.array([[evaluate(f, (a, b)) for b in centers] for a in centers])
    assert np.array_equal(cs.occupancy, expected)
    assert cs.count == 12


def test_crossing_mode_keeps_curves():
    center = shape("x0^2 + x1^2 - 1 = 0", 2, 30)
    crossing = shape("x0^2 + x1^2 - 1 = 0", 2, 30, mode="crossing")
    assert center.count < crossing.count
    assert betti(crossing).trimmed() == (1, 1)


def test_rasterize_errors():
    with pytest.raises(RasterError):
        shape("x0 > 0", 2, 4, mode="bogus")
    with pytest.raises(RasterError):
        rasterize(parse_formula("x0 > 0"), 2, 4, dim=4)
    with pytest.raises(RasterError):
        rasterize(parse_formula("x0 > 0"), 0, 4)


def test_thread_env(monkeypatch):
    monkeypatch.setenv("BETTI_BOUNDS_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("BETTI_BOUNDS_THREADS", "many")
    assert thread_count() == 1
    base = shape("x0^2 + x1^2 - 1 <= 0", 2, 20)
    monkeypatch.setenv("BETTI_BOUNDS_THREADS", "4")
    assert shape("x0^2 + x1^2 - 1 <= 0", 2, 20) == base


def test_cubical_set_is_immutable():
    cs = shape("x0 > 0", 1, 4)
    with pytest.raises(ValueError):
        cs.occupancy[0] = True


REGRESSION = [
    ("disk", "x0^2 + x1^2 - 1 <= 0", 2, 32, "center", (1,)),
    ("circle band", "x0^2 + x1^2 - 1 >= 0 & x0^2 + x1^2 - 9/4 <= 0", 2, 32, "center", (1, 1)),
    ("circle curve", "x0^2 + x1^2 - 1 = 0", 2, 32, "crossing", (1, 1)),
    ("two disks", "x0^2 + 2*x0 + x1^2 + 3/4 <= 0 | x0^2 - 2*x0 + x1^2 + 3/4 <= 0", 2, 32, "center", (2,)),
    ("annulus", "x0^2 + x1^2 - 1 >= 0 & x0^2 + x1^2 - 4 <= 0", 3, 32, "center", (1, 1)),
    ("interval pair", "x0^2 - 1 >= 0", 2, 16, "center", (2,)),
    ("sphere shell", "x0^2 + x1^2 + x2^2 - 1 >= 0 & x0^2 + x1^2 + x2^2 - 4 <= 0", 3, 32, "center", (1, 0, 1)),
    ("solid torus", solid_torus_text(), 2, 48, "center", (1, 1)),
]


@pytest.mark.parametrize("name, text, box, res, mode, expected", REGRESSION, ids=[r[0] for r in REGRESSION])
def test_oracle_regression(name, text, box, res, mode, expected):
    cs = shape(text, box, res, mode)
    b2 = betti(cs, "GF2")
    bp = betti(cs, "GF(32003)")
    assert b2.trimmed() == expected
    assert b2.same_ranks(bp)
    assert betti_by_complement(cs) == b2.ranks
    assert len(b2.ranks) == cs.dim + 1


def test_sphere_shell_stable_under_doubling():
    check = stability(parse_formula(REGRESSION[6][1]), 3, 32, mode="center", dim=3)
    assert check.stable and check.refined_resolution == 64


def test_betti_vector_helpers():
    b = BettiVector((1, 1, 0))
    assert b.total == 2 and b[5] == 0 and b.trimmed() == (1, 1)
    assert b.same_ranks(BettiVector((1, 1)))
    with pytest.raises(ValueError):
        BettiVector((-1,))


def test_betti_field_validation():
    cs = shape("x0 > 0", 1, 4)
    with pytest.raises(ValueError):
        betti(cs, "GF(4)")
    with pytest.raises(ValueError):
        betti(cs, "Q")
    assert betti(cs, 3).field == "GF(3)"


def test_empty_set():
    assert betti(np.zeros((3, 3), dtype=bool)).ranks == (0, 0, 0)


@settings(max_examples=60, deadline=None)
@given(arrays(bool, st.tuples(st.integers(1, 7), st.integers(1, 7))))
def test_random_2d_sets_agree(occ):
    b = betti(occ)
    assert b.ranks == betti_by_complement(occ)
    assert b[0] - b[1] + b[2] == euler_characteristic(occ)
    assert betti(occ, 5).same_ranks(b)


@settings(max_examples=40, deadline=None)
@given(arrays(bool, st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))))
def test_random_3d_sets_agree(occ):
    b = betti(occ)
    assert b.ranks == betti_by_complement(occ)
    assert b[0] - b[1] + b[2] - b[3] == euler_characteristic(occ)


def test_cubical_io_round_trip(tmp_path):
    for text, box, res in [("x0^2 + x1^2 - 1 <= 0", Fraction(3, 2), 13), ("x0 - x1*x2 > 0", 2, 5), ("x0 > 0", 1, 9)]:
        cs = shape(text, box, res)
        data = cubical_io.dumps(cs)
        assert cubical_io.loads(data) == cs
        path = tmp_path / "s.bbcs"
        cubical_io.save(cs, path)
        assert cubical_io.load(path) == cs
        assert cubical_io.dumps(cubical_io.load(path)) == data


def test_cubical_io_rejects_corruption():
    data = cubical_io.dumps(shape("x0 > 0", 1, 9))
    with pytest.raises(cubical_io.CubicalFormatError):
        cubical_io.loads(b"XXXX" + data[4:])
    with pytest.raises(cubical_io.CubicalFormatError):
        cubical_io.loads(data[:-1])
    with pytest.raises(cubical_io.CubicalFormatError):
        cubical_io.loads(data[:4] + bytes([9]) + data[5:])


@settings(max_examples=40, deadline=None)
@given(arrays(bool, st.tuples(st.integers(1, 9), st.integers(1, 9))), st.integers(1, 50), st.integers(1, 50))
def test_cubical_io_property(occ, p, q):
    cs = CubicalSet(Fraction(p, q), occ.shape, occ)
    assert cubical_io.loads(cubical_io.dumps(cs)) == cs
