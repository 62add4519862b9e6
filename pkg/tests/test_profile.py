import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zas.errors import ValidationError
from zas.models import ModelSpec, build, parse_model
from zas.profile import (
    FOUR_PI,
    RadialProfile,
    Tail,
    cylinder_segment,
    flat_segment,
    hermite_segment,
    isotropic_segment,
    power_segment,
)


def invariant_of(segs, tail=Tail("flat"), exponent=None):
    with pytest.raises(ValidationError) as info:
        RadialProfile(tuple(segs), tail, exponent)
    return info.value.invariant


def test_empty_profile():
    assert invariant_of([]) == "segments_nonempty"


def test_must_start_at_zero():
    assert invariant_of([flat_segment(1.0, math.inf)]) == "segments_contiguous"


def test_last_segment_infinite():
    assert invariant_of([flat_segment(0.0, 5.0, 1.0)]) == "segments_contiguous"


def test_area_jump_rejected():
    segs = [cylinder_segment(0, 1, FOUR_PI), flat_segment(1, math.inf, 1.0)]
    assert invariant_of(segs) == "area_continuous"


def test_tail_not_flat_rejected():
    segs = [power_segment(0, 1, 2.0), cylinder_segment(1, math.inf, FOUR_PI)]
    assert invariant_of(segs) == "tail_asymptotically_flat"


def test_wrong_declared_exponent():
    segs = [power_segment(0, 1, 2.0), flat_segment(1, math.inf)]
    assert invariant_of(segs, exponent=1.0) == "origin_exponent"


def test_flat_tail_mass_must_vanish():
    with pytest.raises(ValidationError):
        Tail("flat", 1.0)
    with pytest.raises(ValidationError):
        Tail("conical")


def test_c1_flag():
    kinked = RadialProfile((cylinder_segment(0, 1, FOUR_PI), flat_segment(1, math.inf, 0.0)), Tail("flat"))
    assert not kinked.c1_joins
    smooth = build(ModelSpec("power_law_zas", {"alpha": 1.5})).profile
    assert smooth.c1_joins


def test_hermite_matches_end_data():
    seg = hermite_segment(1.0, 3.0, 2.0, -1.0, 5.0, 4.0)
    assert seg.area(1.0) == pytest.approx(2.0)
    assert seg.area(3.0) == pytest.approx(5.0)
    assert seg.darea(1.0) == pytest.approx(-1.0)
    assert seg.darea(3.0) == pytest.approx(4.0)
    h = 1e-5
    for t in (1.3, 2.2):
        assert seg.d2area(t) == pytest.approx((seg.darea(t + h) - seg.darea(t - h)) / (2 * h), rel=1e-7)


def test_isotropic_area_derivatives():
    seg = isotropic_segment(0.0, math.inf, -1.0, 0.5)
    h = 1e-6
    for t in (0.2, 1.0, 7.0):
        assert seg.darea(t) == pytest.approx((seg.area(t + h) - seg.area(t - h)) / (2 * h), rel=1e-7)
        assert seg.d2area(t) == pytest.approx((seg.darea(t + h) - seg.darea(t - h)) / (2 * h), rel=1e-6)
        assert seg.dw(t) == pytest.approx((seg.w(t + h) - seg.w(t - h)) / (2 * h), rel=1e-7)


@given(st.sampled_from(["schwarzschild:m=-1", "schwarzschild:m=2", "schwarzschild_with_cylinder:mbar=1,L=3",
                        "power_law_zas:alpha=0.7", "sin_bump:eps=0.3"]),
       st.floats(1e-6, 50.0))
def test_arclength_inversion(label, s):
    p = build(parse_model(label)).profile
    t = p.t_at(s)
    assert p.arclength_t(t) == pytest.approx(s, rel=1e-9)


def test_inverse_area_integral_flat():
    p = build(parse_model("flat")).profile
    for rho in (1e-3, 0.5, 20.0):
        assert p.inverse_area_integral_t(rho) == pytest.approx(1 / (FOUR_PI * rho), rel=1e-12)
