"""Room, anchor layouts, receiver grid and receiver orientation sampling."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List

import numpy as np

__all__ = [
    "Vec3",
    "RoomConfig",
    "AnchorKind",
    "Anchor",
    "Orientation",
    "ReceiverPose",
    "OrientationMode",
    "grid_led_layout",
    "corner_ap_layout",
    "receiver_grid",
    "grid_shape",
    "sample_orientation",
    "normal_vector",
]

MAX_TILT = math.pi / 3


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"Vec3 components must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class RoomConfig:
    width: float = 10.0
    length: float = 10.0
    height: float = 3.0

    def __post_init__(self):
        for name in ("width", "length", "height"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"room {name} must be positive, got {v}")

    def contains_xy(self, x: float, y: float) -> bool:
        return 0.0 < x < self.width and 0.0 < y < self.length

    def to_dict(self) -> dict:
        return {"width": self.width, "length": self.length, "height": self.height}


class AnchorKind(str, enum.Enum):
    VLC_LED = "vlc_led"
    RF_AP = "rf_ap"


@dataclass(frozen=True)
class Anchor:
    position: Vec3
    kind: AnchorKind
    index: int

    def to_dict(self) -> dict:
        p = self.position
        return {"index": self.index, "kind": self.kind.value, "x": p.x, "y": p.y, "z": p.z}

    @classmethod
    def from_dict(cls, d: dict) -> "Anchor":
        return cls(Vec3(float(d["x"]), float(d["y"]), float(d["z"])), AnchorKind(d["kind"]), int(d["index"]))


@dataclass(frozen=True)
class Orientation:
    """Receiver normal direction.

    ``tilt`` is the polar angle of the normal measured from the vertical and
    ``azimuth`` rotates the tilt plane about the vertical axis.
    """

    tilt: float = 0.0
    azimuth: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.tilt < math.pi / 2):
            raise ValueError(f"tilt must lie in [0, pi/2), got {self.tilt}")
        if not (0.0 <= self.azimuth < 2 * math.pi):
            raise ValueError(f"azimuth must lie in [0, 2pi), got {self.azimuth}")


@dataclass(frozen=True)
class ReceiverPose:
    position: Vec3
    orientation: Orientation = Orientation()


class OrientationMode(str, enum.Enum):
    """How the drawn angle in [-max_angle, max_angle] is applied to a receiver.

    TILT: the angle is a polar tilt of the normal, with a uniformly random
    tilt plane. STRICT_AZIMUTH: the angle is used as the azimuth only and the
    tilt is held at a fixed value.
    """

    TILT = "tilt"
    STRICT_AZIMUTH = "strict_azimuth"


def _interior_count(extent: float, spacing: float) -> int:
    # ceil(extent/spacing) - 1, with a guard against 10/0.1 = 100.00000000000001
    ratio = extent / spacing
    nearest = round(ratio)
    if abs(ratio - nearest) < 1e-9 * max(1.0, ratio):
        return int(nearest) - 1
    return math.ceil(ratio) - 1


def grid_shape(room: RoomConfig, spacing: float) -> tuple:
    """Number of interior grid points along x and y for ``spacing``."""
    if not (math.isfinite(spacing) and spacing > 0):
        raise ValueError(f"spacing must be positive, got {spacing}")
    return _interior_count(room.width, spacing), _interior_count(room.length, spacing)


def _grid_xy(room: RoomConfig, spacing: float) -> np.ndarray:
    nx, ny = grid_shape(room, spacing)
    if nx < 1 or ny < 1:
        raise ValueError(f"spacing {spacing} leaves no interior grid points in {room}")
    xs = np.arange(1, nx + 1) * spacing
    ys = np.arange(1, ny + 1) * spacing
    # row-major with x varying fastest
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    return np.column_stack([gx.ravel(), gy.ravel()])


def grid_led_layout(room: RoomConfig, spacing: float = 1.0) -> List[Anchor]:
    """LEDs on the ceiling at every interior multiple of ``spacing``.

    A 10 m x 10 m room with 1 m spacing yields the 9 x 9 = 81 LED grid.
    """
    if not (0 < spacing < min(room.width, room.length)):
        raise ValueError(f"LED spacing must lie in (0, {min(room.width, room.length)}), got {spacing}")
    xy = _grid_xy(room, spacing)
    return [
        Anchor(Vec3(float(x), float(y), room.height), AnchorKind.VLC_LED, i)
        for i, (x, y) in enumerate(xy)
    ]


def corner_ap_layout(room: RoomConfig, wall_margin: float = 2.5,
                     kind: AnchorKind = AnchorKind.RF_AP) -> List[Anchor]:
    """Four ceiling anchors, each ``wall_margin`` away from the two nearest walls."""
    half = min(room.width, room.length) / 2
    if not (0 < wall_margin < half):
        raise ValueError(f"wall margin must lie in (0, {half}), got {wall_margin}")
    m, W, L = wall_margin, room.width, room.length
    corners = [(m, m), (m, L - m), (W - m, m), (W - m, L - m)]
    return [Anchor(Vec3(x, y, room.height), kind, i) for i, (x, y) in enumerate(corners)]


def receiver_grid(room: RoomConfig, spacing: float = 0.1, rx_height: float = 1.0) -> List[Vec3]:
    """Receiver positions on a horizontal plane, row-major (x fastest)."""
    if not (0 < rx_height < room.height):
        raise ValueError(f"receiver height must lie in (0, {room.height}), got {rx_height}")
    xy = _grid_xy(room, spacing)
    return [Vec3(float(x), float(y), rx_height) for x, y in xy]


def receiver_grid_array(room: RoomConfig, spacing: float = 0.1, rx_height: float = 1.0) -> np.ndarray:
    """Same as :func:`receiver_grid` as an ``(n, 3)`` array."""
    if not (0 < rx_height < room.height):
        raise ValueError(f"receiver height must lie in (0, {room.height}), got {rx_height}")
    xy = _grid_xy(room, spacing)
    return np.column_stack([xy, np.full(len(xy), float(rx_height))])


def sample_orientation(rng: np.random.Generator,
                       mode: OrientationMode = OrientationMode.TILT,
                       max_angle: float = MAX_TILT,
                       fixed_tilt: float = 0.0) -> Orientation:
    """Draw one receiver orientation from ``rng``.

    Exactly two uniforms are consumed in either mode, so downstream draws
    from the same stream do not depend on the mode.
    """
    theta = rng.uniform(-max_angle, max_angle)
    phi = rng.uniform(0.0, 2 * math.pi)
    mode = OrientationMode(mode)
    if mode is OrientationMode.TILT:
        azimuth = phi + math.pi if theta < 0 else phi
        return Orientation(tilt=abs(theta), azimuth=_wrap(azimuth))
    return Orientation(tilt=fixed_tilt, azimuth=_wrap(theta))


def _wrap(angle: float) -> float:
    a = math.fmod(angle, 2 * math.pi)
    if a < 0:
        a += 2 * math.pi
    if a >= 2 * math.pi:
        a = 0.0
    return a


def normal_vector(o: Orientation) -> Vec3:
    st = math.sin(o.tilt)
    return Vec3(st * math.cos(o.azimuth), st * math.sin(o.azimuth), math.cos(o.tilt))


def normals_array(tilt: np.ndarray, azimuth: np.ndarray) -> np.ndarray:
    """Vectorized :func:`normal_vector` over arrays of angles, shape ``(n, 3)``."""
    st = np.sin(tilt)
    return np.column_stack([st * np.cos(azimuth), st * np.sin(azimuth), np.cos(tilt)])
