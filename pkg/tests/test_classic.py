import numpy as np
import pytest

from vlcloc.channel import ChannelParams, NoiseConfig, RfParams, rss_vector
from vlcloc.estimators import EstimatorSpec, fit
from vlcloc.estimators.classic import InsufficientAnchorsError, classic_locate
from vlcloc.geometry import Anchor, AnchorKind, ReceiverPose, RoomConfig, Vec3, corner_ap_layout, grid_led_layout

QUIET = ChannelParams(noise=NoiseConfig(vlc_relative_sigma=0.0), rf=RfParams(shadowing_sigma=0.0))
ROOM = RoomConfig()


def measure(anchors, x, y, params=QUIET):
    return rss_vector(ReceiverPose(Vec3(x, y, 1.0)), anchors, params)


def test_rf_round_trip_known_point():
    aps = corner_ap_layout(ROOM, 2.5)
    res = classic_locate(measure(aps, 3.0, 4.0), aps, QUIET, rx_height=1.0)
    assert res.converged
    assert np.allclose(res.position, [3.0, 4.0], atol=1e-4)


@pytest.mark.parametrize("x,y", [(5.0, 5.0), (1.3, 8.2), (6.66, 2.1), (9.5, 9.5)])
def test_vlc_round_trip(x, y):
    leds = grid_led_layout(ROOM, 1.0)
    res = classic_locate(measure(leds, x, y), leds, QUIET, rx_height=1.0)
    assert np.hypot(*(res.position - [x, y])) < 1e-3


def test_centre_of_symmetric_layout():
    aps = corner_ap_layout(ROOM, 2.5)
    res = classic_locate(measure(aps, 5.0, 5.0), aps, QUIET, rx_height=1.0)
    assert np.allclose(res.position, [5.0, 5.0], atol=1e-6)


def test_two_usable_anchors_rejected():
    anchors = [Anchor(Vec3(2, 2, 3), AnchorKind.RF_AP, 0), Anchor(Vec3(8, 8, 3), AnchorKind.RF_AP, 1),
               Anchor(Vec3(2, 8, 3), AnchorKind.RF_AP, 2)]
    rss = measure(anchors, 4, 4)
    rss[2] = QUIET.noise.rss_floor
    with pytest.raises(InsufficientAnchorsError):
        classic_locate(rss, anchors, QUIET, rx_height=1.0)


@pytest.mark.filterwarnings("ignore::sklearn.exceptions.ConvergenceWarning")
def test_estimator_wrapper_on_dataset(small_wifi):
    model = fit(EstimatorSpec("classic_rf"), small_wifi)
    P = model.predict(small_wifi.features)
    assert P.shape == (len(small_wifi), 2)
    assert np.isfinite(P).all()


def test_wrong_anchor_kind_rejected(small_wifi):
    with pytest.raises(ValueError):
        fit(EstimatorSpec("classic_vlc"), small_wifi)
