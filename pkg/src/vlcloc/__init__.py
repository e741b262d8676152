"""Indoor localization from simulated visible-light and WiFi RSS fingerprints."""

from .channel import ChannelParams, NoiseConfig, RfParams, VlcEmitterParams, VlcReceiverParams
from .dataset import FingerprintDataset, generate_campaign, generate_run, load_csv, save_csv, subsample
from .estimators import AxisLocalizer, ClassicLocalizer, EstimatorSpec, KNNRegressor, MLPRegressor, SVR
from .evaluation import EvalReport, accuracy_curve, accuracy_rate, ped, render_report
from .geometry import Anchor, AnchorKind, Orientation, OrientationMode, RoomConfig, Vec3
from .scenario import Scenario, preset

__version__ = "0.1.0"

__all__ = [
    "Anchor", "AnchorKind", "AxisLocalizer", "ChannelParams", "ClassicLocalizer", "EstimatorSpec", "EvalReport",
    "FingerprintDataset", "KNNRegressor", "MLPRegressor", "NoiseConfig", "Orientation", "OrientationMode",
    "RfParams", "RoomConfig", "SVR", "Scenario", "Vec3", "VlcEmitterParams", "VlcReceiverParams",
    "accuracy_curve", "accuracy_rate", "generate_campaign", "generate_run", "load_csv", "ped", "preset",
    "render_report", "save_csv", "subsample",
]
