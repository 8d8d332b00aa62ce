import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from weightlab.params import (CORNER, NONTRIVIAL, ONE_WEIGHT, TRIVIAL, Setting, SettingError, admissible_upper,
                              classify_region, conjugate, default_delta_tilde_window, inverse,
                              one_weight_delta, region_grid, to_exponent, to_fraction)

BASE = Setting(1, F(1, 2), F(3, 10), 1, 1, 4, F(1, 5))


def test_derived_quantities():
    assert BASE.alpha_tilde == F(4, 5)
    assert BASE.r_conj == F(4, 3)
    assert BASE.inv_r == F(1, 4)
    assert BASE.gamma == F(1, 2)
    assert one_weight_delta(BASE) == F(11, 20)


def test_conjugate_endpoints():
    assert is_inf_value(conjugate(1))
    assert conjugate(math.inf) == 1
    assert inverse(math.inf) == 0
    assert to_exponent("inf") == math.inf


def is_inf_value(x):
    return isinstance(x, float) and math.isinf(x)


@given(st.fractions(min_value=F(101, 100), max_value=F(100)))
def test_conjugate_is_an_involution(r):
    assert conjugate(conjugate(r)) == r
    assert inverse(r) + inverse(conjugate(r)) == 1


def test_float_inputs_are_read_by_repr():
    assert to_fraction(0.3) == F(3, 10)
    assert Setting(1, 0.5, 0.3, 1, 1, 4.0, 0.2).from_float
    assert not BASE.from_float


@pytest.mark.parametrize("kw", [dict(n=3, alpha=0, delta=F(1, 2)), dict(n=1, alpha=1, delta=F(1, 2)),
                                dict(n=1, alpha=0, delta=F(3, 2)), dict(n=1, alpha=F(1, 2), delta=F(1, 2), m=1),
                                dict(n=1, alpha=0, delta=F(1, 2), r=F(1, 2)), dict(n=1, alpha=0, delta=0)])
def test_invalid_settings_raise(kw):
    with pytest.raises(SettingError):
        Setting(**kw)


def test_bool_is_not_a_number():
    with pytest.raises(TypeError):
        to_fraction(True)


def test_region_tags_on_known_points():
    assert classify_region(BASE).tag == NONTRIVIAL
    assert classify_region(BASE.with_(delta_tilde=F(2, 5))).tag == TRIVIAL
    s = BASE.with_(r=F(8, 5))
    assert classify_region(s.with_(delta_tilde=one_weight_delta(s))).tag == ONE_WEIGHT
    corner = BASE.with_(r=2, delta_tilde=F(3, 10))  # 0.8 - 1/2 = 0.3 = delta
    assert classify_region(corner).tag == CORNER
    # on the delta line but under the one-weight line: still nontrivial
    assert classify_region(BASE.with_(delta_tilde=F(3, 10))).tag == NONTRIVIAL


@given(st.fractions(min_value=0, max_value=1), st.fractions(min_value=-3, max_value=1))
def test_region_tag_matches_min_rule(ri, dt):
    r = math.inf if ri == 0 else 1 / ri
    s = BASE.with_(r=r, delta_tilde=dt)
    tag = classify_region(s).tag
    top = admissible_upper(s, ri)
    if dt > top:
        assert tag == TRIVIAL
    elif dt == s.alpha_tilde - ri:
        assert tag in (ONE_WEIGHT, CORNER)
    else:
        assert tag == NONTRIVIAL


def test_snapping_only_for_float_settings():
    s = Setting(1, 0.5, 0.3, 1, 1, 1.6, 0.8 - 0.625)
    c = classify_region(s)
    assert c.tag == ONE_WEIGHT and c.snapped
    exact = Setting(1, F(1, 2), F(3, 10), 1, 1, F(8, 5), F(7, 40) + F(1, 10**14))
    assert classify_region(exact).tag == TRIVIAL


def test_region_grid_shape_and_csv():
    g = region_grid(BASE, (0, 1), None, (5, 7))
    rows = list(g.rows())
    assert len(rows) == 35
    assert g.delta_tilde[0] == default_delta_tilde_window(BASE)[0]
    csv = g.to_csv().splitlines()
    assert csv[0] == "r_inv,delta_tilde,class,reason" and len(csv) == 36


def test_region_grid_rejects_bad_ranges():
    with pytest.raises(ValueError):
        region_grid(BASE, (0, 2), None, 10)
    with pytest.raises(ValueError):
        region_grid(BASE, (1, 0), None, 10)


def test_to_dict_round_trip():
    for s in (BASE, BASE.with_(r=math.inf), BASE.with_(r=1)):
        assert Setting.from_dict(s.to_dict()) == s
