"""Per-anchor received signal strength.

Optical anchors use a line-of-sight Lambertian channel, radio anchors a
log-distance path loss with log-normal shadowing. All powers leave this
module in dBm.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import Anchor, AnchorKind, ReceiverPose, normal_vector, normals_array

__all__ = [
    "VlcEmitterParams",
    "VlcReceiverParams",
    "RfParams",
    "NoiseConfig",
    "ChannelParams",
    "lambertian_order",
    "vlc_los_gain",
    "vlc_los_gain_array",
    "watts_to_dbm",
    "vlc_rss",
    "rf_rss",
    "rf_mean_rss",
    "rss_vector",
    "rss_matrix",
]


@dataclass(frozen=True)
class VlcEmitterParams:
    tx_power: float = 1.0
    half_power_semi_angle: float = math.pi / 3

    def __post_init__(self):
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be positive, got {self.tx_power}")
        if not 0 < self.half_power_semi_angle < math.pi / 2:
            raise ValueError(f"half-power semi-angle must lie in (0, pi/2), got {self.half_power_semi_angle}")


@dataclass(frozen=True)
class VlcReceiverParams:
    detector_area: float = 1e-4
    fov: float = 0.7854
    filter_gain: float = 1.0
    concentrator_index: float = 1.5

    def __post_init__(self):
        if not self.detector_area > 0:
            raise ValueError(f"detector_area must be positive, got {self.detector_area}")
        if not 0 < self.fov <= math.pi / 2:
            raise ValueError(f"fov must lie in (0, pi/2], got {self.fov}")
        if not self.filter_gain > 0:
            raise ValueError(f"filter_gain must be positive, got {self.filter_gain}")
        if not self.concentrator_index >= 1:
            raise ValueError(f"concentrator_index must be >= 1, got {self.concentrator_index}")

    @property
    def concentrator_gain(self) -> float:
        return self.concentrator_index ** 2 / math.sin(self.fov) ** 2


@dataclass(frozen=True)
class RfParams:
    tx_power: float = 20.0
    ref_distance: float = 1.0
    ref_loss: float = 40.0
    path_loss_exponent: float = 2.2
    shadowing_sigma: float = 3.0

    def __post_init__(self):
        if not self.ref_distance > 0:
            raise ValueError(f"ref_distance must be positive, got {self.ref_distance}")
        if not self.path_loss_exponent > 0:
            raise ValueError(f"path_loss_exponent must be positive, got {self.path_loss_exponent}")
        if not self.shadowing_sigma >= 0:
            raise ValueError(f"shadowing_sigma must be >= 0, got {self.shadowing_sigma}")


@dataclass(frozen=True)
class NoiseConfig:
    vlc_relative_sigma: float = 0.05
    rss_floor: float = -130.0

    def __post_init__(self):
        if not self.vlc_relative_sigma >= 0:
            raise ValueError(f"vlc_relative_sigma must be >= 0, got {self.vlc_relative_sigma}")
        if not math.isfinite(self.rss_floor):
            raise ValueError("rss_floor must be finite")


@dataclass(frozen=True)
class ChannelParams:
    """Everything the channel needs besides geometry."""

    emitter: VlcEmitterParams = field(default_factory=VlcEmitterParams)
    receiver: VlcReceiverParams = field(default_factory=VlcReceiverParams)
    rf: RfParams = field(default_factory=RfParams)
    noise: NoiseConfig = field(default_factory=NoiseConfig)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "ChannelParams":
        d = d or {}
        return cls(
            emitter=VlcEmitterParams(**d.get("emitter", {})),
            receiver=VlcReceiverParams(**d.get("receiver", {})),
            rf=RfParams(**d.get("rf", {})),
            noise=NoiseConfig(**d.get("noise", {})),
        )


def lambertian_order(half_power_semi_angle: float) -> float:
    """m = -ln 2 / ln(cos(half_power_semi_angle))."""
    if not 0 < half_power_semi_angle < math.pi / 2:
        raise ValueError(f"half-power semi-angle must lie in (0, pi/2), got {half_power_semi_angle}")
    m = -math.log(2.0) / math.log(math.cos(half_power_semi_angle))
    # cos(pi/3) evaluates to 0.5000000000000001; snap rounding noise to integer orders
    if abs(m - round(m)) < 1e-12:
        return float(round(m))
    return m


def vlc_los_gain_array(emitters: np.ndarray, receivers: np.ndarray, normals: np.ndarray,
                       emitter: VlcEmitterParams, receiver: VlcReceiverParams) -> np.ndarray:
    """DC gain for every (receiver, emitter) pair, shape ``(n_rx, n_led)``.

    Emitters point straight down. ``normals`` are unit receiver normals.
    """
    emitters = np.asarray(emitters, dtype=float).reshape(-1, 3)
    receivers = np.asarray(receivers, dtype=float).reshape(-1, 3)
    normals = np.asarray(normals, dtype=float).reshape(-1, 3)
    diff = emitters[None, :, :] - receivers[:, None, :]
    d2 = np.einsum("rak,rak->ra", diff, diff)
    if np.any(d2 == 0):
        raise ValueError("emitter and receiver positions coincide")
    d = np.sqrt(d2)
    cos_phi = diff[..., 2] / d
    cos_psi = np.einsum("rak,rk->ra", diff, normals) / d
    psi = np.arccos(np.clip(cos_psi, -1.0, 1.0))

    m = lambertian_order(emitter.half_power_semi_angle)
    visible = (cos_phi > 0) & (psi <= receiver.fov)
    cos_phi_pos = np.where(cos_phi > 0, cos_phi, 0.0)
    gain = ((m + 1) * receiver.detector_area / (2 * math.pi * d2)
            * cos_phi_pos ** m * receiver.filter_gain * receiver.concentrator_gain
            * np.maximum(cos_psi, 0.0))
    return np.where(visible, gain, 0.0)


def vlc_los_gain(emitter: Anchor, receiver: ReceiverPose,
                 emitter_params: VlcEmitterParams = VlcEmitterParams(),
                 receiver_params: VlcReceiverParams = VlcReceiverParams()) -> float:
    """Line-of-sight gain from one LED to one receiver pose.

    Zero when the incidence angle exceeds the receiver field of view or the
    receiver sits at or above the emitter plane.
    """
    n = normal_vector(receiver.orientation).as_array()
    g = vlc_los_gain_array(emitter.position.as_array(), receiver.position.as_array(), n,
                           emitter_params, receiver_params)
    return float(g[0, 0])


def watts_to_dbm(power, floor: float):
    power = np.asarray(power, dtype=float)
    with np.errstate(divide="ignore"):
        dbm = 10.0 * np.log10(power * 1000.0)
    return np.where(power > 0, dbm, floor)


def _noisy_vlc_dbm(gain: np.ndarray, eps: np.ndarray, tx_power: float, noise: NoiseConfig) -> np.ndarray:
    power = np.maximum(tx_power * gain * (1.0 + noise.vlc_relative_sigma * eps), 0.0)
    return watts_to_dbm(power, noise.rss_floor)


def vlc_rss(emitter: Anchor, receiver: ReceiverPose, params: ChannelParams = ChannelParams(),
            rng: Optional[np.random.Generator] = None) -> float:
    """Received optical power in dBm with multiplicative Gaussian noise.

    ``rng`` may be omitted when the noise sigma is zero.
    """
    gain = vlc_los_gain(emitter, receiver, params.emitter, params.receiver)
    eps = rng.standard_normal() if rng is not None else 0.0
    return float(_noisy_vlc_dbm(np.array(gain), np.array(eps), params.emitter.tx_power, params.noise))


def rf_mean_rss(distance, params: RfParams = RfParams()):
    distance = np.asarray(distance, dtype=float)
    if np.any(~(distance > 0)):
        raise ValueError("distance must be positive")
    return (params.tx_power - params.ref_loss
            - 10.0 * params.path_loss_exponent * np.log10(distance / params.ref_distance))


def rf_rss(distance: float, params: RfParams = RfParams(),
           rng: Optional[np.random.Generator] = None) -> float:
    """Log-distance path loss RSS in dBm plus log-normal shadowing."""
    mean = float(rf_mean_rss(distance, params))
    x = rng.standard_normal() if rng is not None else 0.0
    return mean + params.shadowing_sigma * x


def rss_matrix(receivers: np.ndarray, normals: np.ndarray, anchors: Sequence[Anchor],
               params: ChannelParams, eps: Optional[np.ndarray] = None) -> np.ndarray:
    """RSS in dBm for every receiver (rows) and anchor (columns).

    ``eps`` holds standard-normal draws of shape ``(n_rx, n_anchors)``; the
    column of an anchor is scaled by that anchor's noise model. ``None``
    means noise free.
    """
    receivers = np.asarray(receivers, dtype=float).reshape(-1, 3)
    normals = np.asarray(normals, dtype=float).reshape(-1, 3)
    n_rx = len(receivers)
    if len(anchors) == 0:
        raise ValueError("anchor list is empty")
    if eps is None:
        eps = np.zeros((n_rx, len(anchors)))
    out = np.empty((n_rx, len(anchors)))
    pos = np.array([a.position.as_array() for a in anchors])
    vlc = np.array([a.kind is AnchorKind.VLC_LED for a in anchors])
    if vlc.any():
        gain = vlc_los_gain_array(pos[vlc], receivers, normals, params.emitter, params.receiver)
        out[:, vlc] = _noisy_vlc_dbm(gain, eps[:, vlc], params.emitter.tx_power, params.noise)
    if (~vlc).any():
        dist = np.linalg.norm(pos[~vlc][None, :, :] - receivers[:, None, :], axis=2)
        out[:, ~vlc] = rf_mean_rss(dist, params.rf) + params.rf.shadowing_sigma * eps[:, ~vlc]
    return out


def rss_vector(receiver: ReceiverPose, anchors: Sequence[Anchor], params: ChannelParams = ChannelParams(),
               rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """RSS from each anchor at one receiver, ordered by anchor index."""
    anchors = sorted(anchors, key=lambda a: a.index)
    eps = rng.standard_normal((1, len(anchors))) if rng is not None else None
    n = normals_array(np.array([receiver.orientation.tilt]), np.array([receiver.orientation.azimuth]))
    return rss_matrix(receiver.position.as_array(), n, anchors, params, eps)[0]
