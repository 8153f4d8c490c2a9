import importlib.util
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ROOT, model
from dtangent.dga import (
    Budget,
    ResourceLimitError,
    cotangent_fiber,
    koszul_stage,
    minimize_at_origin,
    resolve_through,
)
from dtangent.poly import PointedModel, Polynomial


def load_oracle():
    found = importlib.util.spec_from_file_location("deviation_oracle", ROOT / "scripts" / "deviation_oracle.py")
    mod = importlib.util.module_from_spec(found)
    found.loader.exec_module(mod)
    return mod


def oracle_deviations(denominator, order):
    mod = load_oracle()
    return mod.deviations(mod.series_inverse([Fraction(c) for c in denominator], order), order)


def test_oracle_itself_on_known_series():
    # complete intersection of one quadric in two variables: P = (1 + t)^2 / (1 - t^2)
    mod = load_oracle()
    num = [Fraction(1), Fraction(2), Fraction(1)]
    inv = mod.series_inverse([Fraction(1), Fraction(0), Fraction(-1)], 6)
    assert mod.deviations(mod.series_mul(num, inv, 6), 4) == [2, 1, 0, 0]


def test_koszul_stage_differentials(fat_point):
    res = koszul_stage(fat_point)
    assert [g.name for g in res.generators] == ["e1", "e2", "e3"]
    assert [res.format_element(g.differential) for g in res.generators] == ["x^2", "x*y", "y^2"]


def test_fat_point_resolution_matches_deviation_oracle(fat_point):
    res = resolve_through(fat_point, 4)
    assert res.counts(4)[1:] == [3, 2, 3, 6]
    fiber = cotangent_fiber(res, 4)
    assert fiber.homology_dims(3) == oracle_deviations([1, -2], 4)


def test_three_variable_fat_point_matches_oracle():
    m = model("xyz", ["x^2", "x*y", "x*z", "y^2", "y*z", "z^2"])
    fiber = cotangent_fiber(resolve_through(m, 4), 4)
    assert fiber.homology_dims(3) == oracle_deviations([1, -3], 4) == [3, 6, 8, 18]


def test_dump_lists_generators(fat_point):
    text = resolve_through(fat_point, 3).dump().splitlines()
    assert "T2_1 : 2 : y*e1 - x*e2" in text
    assert "T3_1 : 3 : e1*e2 + x*T2_1" in text


def test_graded_commutativity_and_exterior_squares(fat_point):
    res = resolve_through(fat_point, 3)
    e1, e2 = (res.mono_element(((i, 1),)) for i in (0, 1))
    e1e2, e2e1 = res.mul(e1, e2), res.mul(e2, e1)
    assert e1e2 and e1e2.keys() == e2e1.keys()
    for mono, poly in e1e2.items():
        assert {k: -v for k, v in poly.items()} == e2e1[mono]
    assert not res.mul(e1, e1)


def test_smooth_point_of_the_same_curve():
    m = model("xy", ["x*y - x - y + 1"], ["1", "0"])
    fiber = cotangent_fiber(resolve_through(m, 3), 3)
    assert fiber.homology_dims(2) == [1, 0, 0]


def test_hypersurface_resolution_stops():
    res = resolve_through(model("xy", ["x*y"]), 4)
    assert res.counts(4)[1:] == [1, 0, 0, 0]


def test_minimal_model_counts_equal_homology(fat_point):
    res = resolve_through(fat_point, 4)
    mm = minimize_at_origin(res)
    assert mm.counts() == cotangent_fiber(res, 4).homology_dims(3)


def test_minimal_model_of_nonminimal_resolution():
    # generators x and x^2: the Koszul stage is not minimal
    res = resolve_through(model("x", ["x", "x^2"]), 3)
    mm = minimize_at_origin(res)
    assert mm.counts() == [0, 0, 0]


def test_generator_cap_is_enforced():
    m = model("xyz", ["x^2", "x*y", "x*z", "y^2", "y*z", "z^2"])
    with pytest.raises(ResourceLimitError):
        resolve_through(m, 4, Budget(generators=10))


def test_point_away_from_origin_is_translated():
    # (x - 1)(y - 1) has its node at (1, 1)
    m = model("xy", ["x*y - x - y + 1"], ["1", "1"])
    fiber = cotangent_fiber(resolve_through(m, 3), 3)
    assert fiber.homology_dims(2) == [2, 1, 0]


exps = st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda e: sum(e) >= 1)
monomial_ideals = st.lists(exps, min_size=1, max_size=3, unique=True)


@settings(max_examples=15, deadline=None)
@given(monomial_ideals)
def test_d_squared_vanishes_and_composites_vanish(gens):
    polys = [Polynomial(("x", "y"), {e: Fraction(1)}) for e in gens]
    res = resolve_through(PointedModel(("x", "y"), tuple(polys), (0, 0)), 3)
    res.check_d_squared()
    cotangent_fiber(res, 3).check_composites()
