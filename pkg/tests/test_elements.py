import math

import numpy as np
import pytest

from mapforge import (
    BASE_RANGE,
    CLASS_ORDER,
    CLOSED_CLASSES,
    LONG_RANGE,
    ClassLabel,
    EgoPose,
    MapElement,
    PerceptionRange,
    make_element,
    wrap_angle,
)

SEG = [(0.0, 0.0), (10.0, 0.0)]
SQUARE = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)]


def test_class_order_and_closed_set():
    assert [c.value for c in CLASS_ORDER] == [
        "ped_crossing",
        "divider",
        "boundary",
        "centerline",
    ]
    assert CLOSED_CLASSES == {ClassLabel.PED_CROSSING}


def test_make_element_sets_closed_flag():
    assert make_element(ClassLabel.PED_CROSSING, SQUARE).closed is True
    for label in (ClassLabel.DIVIDER, ClassLabel.BOUNDARY, ClassLabel.CENTERLINE):
        assert make_element(label, SEG).closed is False


def test_closed_flag_must_match_class():
    with pytest.raises(ValueError):
        MapElement(ClassLabel.DIVIDER, SEG, True)
    with pytest.raises(ValueError):
        MapElement(ClassLabel.PED_CROSSING, SQUARE, False)


def test_rejects_too_few_points():
    with pytest.raises(ValueError):
        make_element(ClassLabel.DIVIDER, [(0.0, 0.0)])


def test_rejects_nonfinite_points():
    with pytest.raises(ValueError):
        make_element(ClassLabel.DIVIDER, [(0.0, 0.0), (np.nan, 1.0)])
    with pytest.raises(ValueError):
        make_element(ClassLabel.DIVIDER, [(0.0, 0.0), (np.inf, 1.0)])


def test_rejects_coincident_consecutive_points():
    with pytest.raises(ValueError, match="1 and 2"):
        make_element(ClassLabel.DIVIDER, [(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (2.0, 0.0)])
    # separation right at the floor is also rejected
    with pytest.raises(ValueError):
        make_element(ClassLabel.DIVIDER, [(0.0, 0.0), (1e-9, 0.0)])
    # but non-consecutive repeats are fine (self-crossing allowed)
    make_element(ClassLabel.DIVIDER, [(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)])


def test_points_coerced_to_float64():
    e = make_element(ClassLabel.DIVIDER, [[0, 0], [3, 4]])
    assert e.points.dtype == np.float64
    assert e.points.shape == (2, 2)


def test_bad_shape_rejected():
    with pytest.raises(ValueError):
        make_element(ClassLabel.DIVIDER, [0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        make_element(ClassLabel.DIVIDER, [[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]])


def test_with_points_preserves_class():
    e = make_element(ClassLabel.BOUNDARY, SEG)
    e2 = e.with_points([(0.0, 0.0), (5.0, 5.0)])
    assert e2.class_label is ClassLabel.BOUNDARY
    assert e2.closed is False
    np.testing.assert_array_equal(e2.points, [(0.0, 0.0), (5.0, 5.0)])


def test_wrap_angle_examples():
    assert wrap_angle(0.5) == 0.5
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3.0 * math.pi) == pytest.approx(math.pi, abs=1e-12)
    assert wrap_angle(2.0 * math.pi) == pytest.approx(0.0, abs=1e-12)
    assert abs(wrap_angle(-7.5)) <= math.pi


def test_wrap_angle_range_sweep():
    for k in range(-20, 21):
        a = 0.37 * k + 6.0 * k
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi
        # same direction modulo 2*pi
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-12)
        assert math.isclose(math.sin(w), math.sin(a), abs_tol=1e-12)


def test_perception_range_presets():
    assert (BASE_RANGE.x_min, BASE_RANGE.x_max) == (-15.0, 15.0)
    assert (BASE_RANGE.y_min, BASE_RANGE.y_max) == (-30.0, 30.0)
    assert BASE_RANGE.x_extent == 30.0
    assert BASE_RANGE.y_extent == 60.0
    assert (LONG_RANGE.x_extent, LONG_RANGE.y_extent) == (60.0, 90.0)


def test_perception_range_validation():
    with pytest.raises(ValueError):
        PerceptionRange(1.0, 1.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        PerceptionRange(0.0, 1.0, 5.0, -5.0)


def test_contains_with_tolerance():
    r = PerceptionRange(-1.0, 1.0, -2.0, 2.0)
    pts = np.array([[0.0, 0.0], [1.0, 2.0], [1.0 + 1e-7, 0.0], [5.0, 0.0]])
    np.testing.assert_array_equal(r.contains(pts), [True, True, False, False])
    np.testing.assert_array_equal(r.contains(pts, tol=1e-6), [True, True, True, False])


def test_ego_pose_wraps_yaw():
    p = EgoPose(1.0, 2.0, 3.0 * math.pi)
    assert p.yaw == pytest.approx(math.pi, abs=1e-12)
    assert EgoPose(0.0, 0.0).yaw == 0.0
