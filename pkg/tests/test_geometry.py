import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlcloc.geometry import (
    AnchorKind,
    Orientation,
    OrientationMode,
    RoomConfig,
    Vec3,
    corner_ap_layout,
    grid_led_layout,
    normal_vector,
    receiver_grid,
    sample_orientation,
)

ROOM = RoomConfig(10, 10, 3)


def test_reference_room_has_81_interior_leds():
    leds = grid_led_layout(ROOM, 1.0)
    assert len(leds) == 81
    xs = sorted({a.position.x for a in leds})
    ys = sorted({a.position.y for a in leds})
    assert xs == ys == [float(i) for i in range(1, 10)]
    assert all(a.position.z == 3 and a.kind is AnchorKind.VLC_LED for a in leds)
    assert [a.index for a in leds] == list(range(81))


def test_led_grid_is_row_major_x_fastest():
    leds = grid_led_layout(ROOM, 1.0)
    assert (leds[0].position.x, leds[0].position.y) == (1, 1)
    assert (leds[1].position.x, leds[1].position.y) == (2, 1)
    assert (leds[9].position.x, leds[9].position.y) == (1, 2)


def test_small_room_led_grid():
    leds = grid_led_layout(RoomConfig(3, 3, 3), 1.0)
    assert {(a.position.x, a.position.y) for a in leds} == {(1, 1), (2, 1), (1, 2), (2, 2)}


def test_led_spacing_too_large_rejected():
    with pytest.raises(ValueError):
        grid_led_layout(ROOM, 11)


def test_corner_aps():
    aps = corner_ap_layout(ROOM, 2.5)
    pts = [(a.position.x, a.position.y) for a in aps]
    assert pts == [(2.5, 2.5), (2.5, 7.5), (7.5, 2.5), (7.5, 7.5)]
    d = [math.dist(p, q) for i, p in enumerate(pts) for q in pts[i + 1:]]
    assert min(d) == 5.0
    assert all(a.kind is AnchorKind.RF_AP for a in aps)


def test_corner_aps_small_room():
    aps = corner_ap_layout(RoomConfig(4, 4, 3), 1)
    assert [(a.position.x, a.position.y) for a in aps] == [(1, 1), (1, 3), (3, 1), (3, 3)]


def test_corner_margin_half_room_rejected():
    with pytest.raises(ValueError):
        corner_ap_layout(ROOM, 5)


def test_receiver_grid_full_size():
    pts = receiver_grid(ROOM, 0.1, 1.0)
    assert len(pts) == 9801
    assert pts[0].x == pytest.approx(0.1) and pts[0].y == pytest.approx(0.1)
    assert pts[-1].x == pytest.approx(9.9) and pts[-1].y == pytest.approx(9.9)
    assert all(p.z == 1.0 for p in pts)
    assert all(ROOM.contains_xy(p.x, p.y) for p in pts)


def test_receiver_grid_single_point():
    assert receiver_grid(ROOM, 5, 1.0) == [Vec3(5, 5, 1)]


def test_receiver_grid_desk_scale_is_33_by_33():
    assert len(receiver_grid(ROOM, 0.3, 1.0)) == 33 * 33


def test_receiver_above_ceiling_rejected():
    with pytest.raises(ValueError):
        receiver_grid(ROOM, 0.1, 3.5)


def test_layouts_reproducible():
    assert grid_led_layout(ROOM, 1.0) == grid_led_layout(ROOM, 1.0)
    assert receiver_grid(ROOM, 0.1, 1.0) == receiver_grid(ROOM, 0.1, 1.0)


def test_invalid_room_and_vec():
    with pytest.raises(ValueError):
        RoomConfig(0, 10, 3)
    with pytest.raises(ValueError):
        Vec3(math.nan, 0, 0)


def test_sample_orientation_replay():
    a = [sample_orientation(np.random.default_rng(0)) for _ in range(3)]
    rng = np.random.default_rng(0)
    b = [sample_orientation(rng) for _ in range(3)]
    assert a[0] == b[0]
    rng2 = np.random.default_rng(0)
    assert [sample_orientation(rng2) for _ in range(3)] == b


def test_sample_orientation_support_monte_carlo():
    rng = np.random.default_rng(123)
    tilts, azs = [], []
    for _ in range(100_000):
        o = sample_orientation(rng, OrientationMode.TILT)
        tilts.append(o.tilt)
        azs.append(o.azimuth)
    tilts, azs = np.array(tilts), np.array(azs)
    assert tilts.min() >= 0 and tilts.max() <= math.pi / 3
    assert azs.min() >= 0 and azs.max() < 2 * math.pi
    # |U(-a, a)| is U(0, a): mean a/2
    assert tilts.mean() == pytest.approx(math.pi / 6, rel=0.01)
    hist, _ = np.histogram(azs, bins=8, range=(0, 2 * math.pi))
    assert hist.min() > 0.95 * 100_000 / 8


def test_strict_azimuth_mode_keeps_fixed_tilt():
    rng = np.random.default_rng(5)
    for _ in range(200):
        o = sample_orientation(rng, OrientationMode.STRICT_AZIMUTH, fixed_tilt=0.2)
        assert o.tilt == 0.2
        a = o.azimuth if o.azimuth <= math.pi else o.azimuth - 2 * math.pi
        assert -math.pi / 3 <= a <= math.pi / 3


def test_modes_consume_same_number_of_draws():
    r1, r2 = np.random.default_rng(9), np.random.default_rng(9)
    sample_orientation(r1, OrientationMode.TILT)
    sample_orientation(r2, OrientationMode.STRICT_AZIMUTH)
    assert r1.standard_normal() == r2.standard_normal()


def test_zero_theta_gives_vertical_normal():
    class ZeroRng:
        def uniform(self, lo, hi):
            return 0.0

    o = sample_orientation(ZeroRng(), OrientationMode.TILT)
    assert o.tilt == 0.0
    assert normal_vector(o) == Vec3(0.0, 0.0, 1.0)


def test_normal_vector_closed_forms():
    assert normal_vector(Orientation(0.0, 1.234)) == Vec3(0.0, 0.0, 1.0)
    n = normal_vector(Orientation(math.pi / 3, 0.0))
    assert n.x == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    assert n.y == 0.0
    assert n.z == pytest.approx(0.5, abs=1e-15)


@given(st.floats(0, math.pi / 2, exclude_max=True), st.floats(0, 2 * math.pi, exclude_max=True))
def test_normal_vector_unit_norm(tilt, azimuth):
    assert abs(normal_vector(Orientation(tilt, azimuth)).norm() - 1.0) < 1e-12


@given(st.floats(0, 2 * math.pi, exclude_max=True), st.floats(0, 2 * math.pi, exclude_max=True))
def test_zero_tilt_is_azimuth_invariant(a1, a2):
    assert normal_vector(Orientation(0.0, a1)) == normal_vector(Orientation(0.0, a2))
