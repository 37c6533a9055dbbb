import numpy as np
import pytest

from cyclelab import full_wage_led, goodwin, minsky, minsky_reserve_army
from cyclelab.analysis import Definition, check_definition
from cyclelab.errors import ContractViolation


def test_goodwin_profit_squeeze():
    rep = check_definition(goodwin(1, 1), "profit_squeeze")
    assert rep.holds and rep.threshold == 1.0 and rep.n_tested > 0


def test_goodwin_reserve_army():
    rep = check_definition(goodwin(1, 2), Definition.RESERVE_ARMY)
    assert rep.holds and rep.threshold == pytest.approx(2.0)


def test_inverted_threshold_fails():
    # wdot > 0 needs y > c/r; using r/c = 0.5 leaves 0.5 < y <= 2 uncovered
    rep = check_definition(goodwin(1, 2), Definition.RESERVE_ARMY, threshold=0.5)
    assert not rep.holds
    y = rep.witness["point"]["y"]
    assert 0.5 < y <= 2.0 and rep.witness["value"] <= 0


def test_minsky_effects():
    for d in ("minsky_effect", "inverse_output_fragility"):
        assert check_definition(minsky(2), d).holds


def test_profit_led_goodwin_degenerate():
    # dydot/dw = -y < 0 everywhere in the interior
    assert check_definition(goodwin(1, 1), "profit_led").holds
    assert not check_definition(goodwin(1, 1), "wage_led").holds


def test_wage_led_full_model():
    model = full_wage_led(1, 1, 1, 1)
    assert check_definition(model, "wage_led", grid_density=20).holds
    rep = check_definition(model, "profit_led", grid_density=20)
    assert not rep.holds
    assert rep.witness["quantity"] == "dydot_dw"
    # dydot/dw = s y at the first grid corner
    assert rep.witness["value"] == pytest.approx(0.01)
    again = check_definition(model, "profit_led", grid_density=20)
    assert again.to_dict() == rep.to_dict()


def test_state_dependent_threshold():
    rep = check_definition(minsky_reserve_army(2, 5, 1.5), "reserve_army", grid_density=30)
    assert rep.threshold == "(c + w)/r" and rep.holds


def test_profit_squeeze_needs_threshold_outside_goodwin():
    model = full_wage_led(2, 5, 1.5, 0.0)
    with pytest.raises(ContractViolation):
        check_definition(model, "profit_squeeze")
    # ydot = y(1 - f) does not depend on w at s = 0
    assert not check_definition(model, "profit_squeeze", threshold=1.0, grid_density=20).holds


def test_inapplicable():
    with pytest.raises(ContractViolation):
        check_definition(minsky(1), "reserve_army")
    with pytest.raises(ContractViolation):
        check_definition(goodwin(1, 1), "minsky_effect")


def test_region_validation():
    with pytest.raises(ContractViolation):
        check_definition(goodwin(1, 1), "profit_led", region={"f": (0.1, 1)})
    with pytest.raises(ContractViolation):
        check_definition(goodwin(1, 1), "profit_led", region={"y": (2, 1)})
    rep = check_definition(goodwin(1, 1), "profit_led", region={"y": (0.5, 1.5)}, grid_density=11)
    assert rep.region == {"y": (0.5, 1.5), "w": (0.01, 5.0)}
    assert rep.n_tested == 121


def test_counts_match_brute_force():
    model = goodwin(1, 1)
    rep = check_definition(model, "profit_squeeze", grid_density=50)
    w = np.linspace(0.01, 5, 50)
    assert rep.n_tested == 50 * int((w > 1).sum())
