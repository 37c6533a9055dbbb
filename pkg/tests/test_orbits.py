import numpy as np
import pytest

from cyclelab import full_wage_led, goodwin, integrate, minsky, minsky_reserve_army
from cyclelab.analysis import CycleClass, Orientation, Trend, amplitude_trend, classify_cycle, orbit_orientation
from cyclelab.analysis.orbits import amplitude_ratio, local_maxima, signed_area, swing_amplitudes, winding_turns


def test_goodwin_field_turns_counterclockwise():
    # right of the centre (y > 1, w = 1) the wage share rises; above it (w > 1, y = 1) output falls
    m = goodwin(1, 1)
    assert m.rhs(1.5, 1.0, 0.0)[1] > 0
    assert m.rhs(1.0, 1.5, 0.0)[0] < 0


def test_orientation_goodwin(goodwin_orbit):
    assert orbit_orientation(goodwin_orbit) is Orientation.COUNTERCLOCKWISE


def test_orientation_reversed(goodwin_orbit):
    assert orbit_orientation(goodwin_orbit.reversed()) is Orientation.CLOCKWISE


@pytest.mark.parametrize("every", [2, 7, 25])
def test_orientation_invariant_under_resampling(goodwin_orbit, every):
    assert orbit_orientation(goodwin_orbit.resampled(every)) is Orientation.COUNTERCLOCKWISE


def test_orientation_needs_a_full_turn():
    short = integrate(goodwin(1, 1), (0.6, 0.5), 3.0)
    assert abs(winding_turns(short.column("y"), short.column("w"))) < 1
    assert orbit_orientation(short) is Orientation.UNDETERMINED


def test_signed_area_unit_circle():
    theta = np.linspace(0, 2 * np.pi, 2001)
    assert signed_area(np.cos(theta), np.sin(theta)) == pytest.approx(2 * np.pi, rel=1e-5)
    assert winding_turns(np.cos(theta), np.sin(theta)) == pytest.approx(1.0)


def test_fig8_orientation(fig8_orbit):
    assert orbit_orientation(fig8_orbit, ("y", "w")) is Orientation.COUNTERCLOCKWISE


def test_minsky_orientation(minsky_orbit):
    assert orbit_orientation(minsky_orbit, ("y", "f")) is Orientation.COUNTERCLOCKWISE


class TestAmplitude:
    def test_goodwin_steady(self, goodwin_orbit):
        assert amplitude_trend(goodwin_orbit, "y") is Trend.STEADY
        assert amplitude_trend(goodwin_orbit, "w") is Trend.STEADY
        swings = swing_amplitudes(goodwin_orbit, "y")
        assert np.ptp(swings) <= 1e-3 * max(swings)

    def test_growing(self, appendix_orbits):
        assert amplitude_trend(appendix_orbits[0.03], "y") is Trend.GROWING
        assert amplitude_ratio(appendix_orbits[0.03], "y") > 1.05

    def test_damped(self, appendix_orbits):
        assert amplitude_trend(appendix_orbits[-0.01], "y") is Trend.DAMPED

    def test_centre(self, appendix_orbits):
        for v in ("y", "w", "f"):
            assert amplitude_trend(appendix_orbits[0.0], v) is Trend.STEADY

    def test_too_few_maxima(self):
        short = integrate(goodwin(1, 1), (0.6, 0.5), 10.0)
        assert len(local_maxima(short, "y")) < 3
        assert amplitude_trend(short, "y") is Trend.UNDETERMINED

    def test_maxima_match_period(self, goodwin_orbit):
        times = [t for t, _ in local_maxima(goodwin_orbit, "y")]
        gaps = np.diff(times)
        assert np.ptp(gaps) <= 0.02


class TestClassify:
    def test_goodwin_cycle(self, goodwin_orbit):
        rep = classify_cycle(goodwin(1, 1), goodwin_orbit)
        assert rep.classification is CycleClass.GOODWIN_CYCLE
        assert rep.orientation is Orientation.COUNTERCLOCKWISE
        assert rep.enslaved == frozenset()
        assert rep.closure_gap < 1e-6
        assert 5.0 < rep.period_estimate < 8.0

    def test_minsky(self, minsky_orbit):
        rep = classify_cycle(minsky(1), minsky_orbit)
        assert rep.plane == ("y", "f")
        assert rep.orientation is Orientation.COUNTERCLOCKWISE
        assert set(rep.amplitude_trend.values()) == {Trend.STEADY}
        assert rep.classification is CycleClass.GOODWIN_CYCLE

    def test_pseudo_goodwin_at_hopf_point(self, appendix_orbits):
        model = full_wage_led(2, 5, 1.5, 0.0)
        rep = classify_cycle(model, appendix_orbits[0.0])
        assert rep.classification is CycleClass.PSEUDO_GOODWIN_CYCLE
        assert rep.enslaved == frozenset({"w"})
        assert rep.drivers == ("f",)

    def test_outward_spiral(self, appendix_orbits):
        rep = classify_cycle(full_wage_led(2, 5, 1.5, 0.03), appendix_orbits[0.03])
        assert rep.classification is CycleClass.OUTWARD_SPIRAL

    def test_damped(self, appendix_orbits, fig8_orbit):
        assert classify_cycle(full_wage_led(2, 5, 1.5, -0.01), appendix_orbits[-0.01]).classification \
            is CycleClass.DAMPED_OSCILLATION
        assert classify_cycle(full_wage_led(1, 1, 1, 1), fig8_orbit).classification is CycleClass.DAMPED_OSCILLATION

    def test_reserve_army_model(self, fig5b_orbit):
        rep = classify_cycle(minsky_reserve_army(2, 5, 1.5), fig5b_orbit)
        assert rep.classification is CycleClass.PSEUDO_GOODWIN_CYCLE
        assert "w" in rep.enslaved

    def test_stationary_is_no_cycle(self):
        traj = integrate(goodwin(1, 1), (1.0, 1.0), 40.0)
        assert classify_cycle(goodwin(1, 1), traj).classification is CycleClass.NO_CYCLE

    def test_report_serializes(self, goodwin_orbit):
        d = classify_cycle(goodwin(1, 1), goodwin_orbit).to_dict()
        assert d["classification"] == "goodwin_cycle"
        assert d["amplitude_trend"] == {"y": "steady", "w": "steady"}
