"""Campaign configuration and the three preset room scenarios."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Tuple

from .channel import ChannelParams
from .geometry import (
    MAX_TILT,
    Anchor,
    AnchorKind,
    OrientationMode,
    RoomConfig,
    corner_ap_layout,
    grid_led_layout,
    grid_shape,
)

__all__ = ["SCHEMA_VERSION", "LayoutSpec", "Scenario", "PRESETS", "preset", "load_scenario"]

SCHEMA_VERSION = 1

LAYOUT_TYPES = ("grid_led", "corner_ap", "corner_led", "explicit")


@dataclass(frozen=True)
class LayoutSpec:
    type: str = "grid_led"
    spacing: float = 1.0
    wall_margin: float = 2.5
    anchors: Tuple[Anchor, ...] = ()

    def __post_init__(self):
        if self.type not in LAYOUT_TYPES:
            raise ValueError(f"unknown layout type {self.type!r}; expected one of {LAYOUT_TYPES}")
        if self.type == "explicit":
            if not self.anchors:
                raise ValueError("explicit layout needs at least one anchor")
            if sorted(a.index for a in self.anchors) != list(range(len(self.anchors))):
                raise ValueError("explicit anchor indices must be unique and contiguous from 0")

    def build(self, room: RoomConfig) -> List[Anchor]:
        if self.type == "grid_led":
            return grid_led_layout(room, self.spacing)
        if self.type == "corner_ap":
            return corner_ap_layout(room, self.wall_margin, AnchorKind.RF_AP)
        if self.type == "corner_led":
            return corner_ap_layout(room, self.wall_margin, AnchorKind.VLC_LED)
        anchors = sorted(self.anchors, key=lambda a: a.index)
        for a in anchors:
            if not room.contains_xy(a.position.x, a.position.y) or a.position.z != room.height:
                raise ValueError(f"anchor {a.index} is not on the ceiling inside the room")
        return anchors

    def to_dict(self) -> dict:
        d = {"type": self.type}
        if self.type == "grid_led":
            d["spacing"] = self.spacing
        elif self.type in ("corner_ap", "corner_led"):
            d["wall_margin"] = self.wall_margin
        else:
            d["anchors"] = [a.to_dict() for a in self.anchors]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LayoutSpec":
        anchors = tuple(Anchor.from_dict(a) for a in d.get("anchors", ()))
        return cls(type=d.get("type", "grid_led"), spacing=float(d.get("spacing", 1.0)),
                   wall_margin=float(d.get("wall_margin", 2.5)), anchors=anchors)


@dataclass(frozen=True)
class Scenario:
    """Single source of truth for a fingerprint campaign."""

    name: str = "vlc81"
    room: RoomConfig = field(default_factory=RoomConfig)
    layout: LayoutSpec = field(default_factory=LayoutSpec)
    channel: ChannelParams = field(default_factory=ChannelParams)
    grid_spacing: float = 0.1
    rx_height: float = 1.0
    orientation_mode: OrientationMode = OrientationMode.STRICT_AZIMUTH
    max_angle: float = MAX_TILT
    fixed_tilt: float = 0.0
    n_runs: int = 50
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "orientation_mode", OrientationMode(self.orientation_mode))
        if not (isinstance(self.n_runs, int) and self.n_runs >= 1):
            raise ValueError(f"n_runs must be a positive integer, got {self.n_runs}")
        if not (isinstance(self.base_seed, int) and 0 <= self.base_seed < 2 ** 64):
            raise ValueError(f"base_seed must be a 64-bit unsigned integer, got {self.base_seed}")
        if not (0 <= self.max_angle < math.pi / 2):
            raise ValueError(f"max_angle must lie in [0, pi/2), got {self.max_angle}")
        if not (0 <= self.fixed_tilt < math.pi / 2):
            raise ValueError(f"fixed_tilt must lie in [0, pi/2), got {self.fixed_tilt}")
        if not (0 < self.rx_height < self.room.height):
            raise ValueError(f"receiver height must lie in (0, {self.room.height}), got {self.rx_height}")
        nx, ny = grid_shape(self.room, self.grid_spacing)
        if nx < 1 or ny < 1:
            raise ValueError(f"grid spacing {self.grid_spacing} leaves an empty receiver grid")
        self.anchors()  # validates layout against the room

    def anchors(self) -> List[Anchor]:
        return self.layout.build(self.room)

    @property
    def grid_size(self) -> int:
        nx, ny = grid_shape(self.room, self.grid_spacing)
        return nx * ny

    def with_overrides(self, **kw) -> "Scenario":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "room": self.room.to_dict(),
            "layout": self.layout.to_dict(),
            "receivers": {"spacing": self.grid_spacing, "height": self.rx_height},
            "orientation": {"mode": self.orientation_mode.value, "max_angle": self.max_angle,
                            "fixed_tilt": self.fixed_tilt},
            "channel": self.channel.to_dict(),
            "n_runs": self.n_runs,
            "base_seed": self.base_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported scenario schema_version {version}")
        rx = d.get("receivers", {})
        ori = d.get("orientation", {})
        return cls(
            name=d.get("name", "scenario"),
            room=RoomConfig(**d.get("room", {})),
            layout=LayoutSpec.from_dict(d.get("layout", {})),
            channel=ChannelParams.from_dict(d.get("channel")),
            grid_spacing=float(rx.get("spacing", 0.1)),
            rx_height=float(rx.get("height", 1.0)),
            orientation_mode=OrientationMode(ori.get("mode", OrientationMode.STRICT_AZIMUTH.value)),
            max_angle=float(ori.get("max_angle", MAX_TILT)),
            fixed_tilt=float(ori.get("fixed_tilt", 0.0)),
            n_runs=int(d.get("n_runs", 50)),
            base_seed=int(d.get("base_seed", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def digest(self) -> str:
        """Stable sha256 over the canonical JSON form."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _vlc81(**kw) -> Scenario:
    return Scenario(name="VLC-81", layout=LayoutSpec("grid_led", spacing=1.0), **kw)


def _vlc4(**kw) -> Scenario:
    return Scenario(name="VLC-4", layout=LayoutSpec("corner_led", wall_margin=2.5), **kw)


def _wifi(**kw) -> Scenario:
    return Scenario(name="WiFi", layout=LayoutSpec("corner_ap", wall_margin=2.5), **kw)


PRESETS = {"vlc81": _vlc81, "vlc4": _vlc4, "wifi": _wifi}


def preset(name: str, **kw) -> Scenario:
    """One of the three case-study rooms: ``vlc81``, ``vlc4`` or ``wifi``."""
    try:
        return PRESETS[name.lower()](**kw)
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}") from None


def load_scenario(path) -> Scenario:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        return Scenario.from_dict(json.load(fh))


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(scenario.to_json() + "\n", encoding="utf-8")
