import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclelab import (
    ContractViolation,
    DomainError,
    StateVec,
    conserved_quantity,
    coupling_graph,
    eval_field,
    eval_jacobian_analytic,
    eval_jacobian_fd,
    full_wage_led,
    goodwin,
    interior_fixed_point_closed_form,
    make_model,
    minsky,
    minsky_reserve_army,
)
from cyclelab.models import conserved_gradient, sampled_edge_signs

ALL_MODELS = [goodwin(1, 1), minsky(1), minsky_reserve_army(2, 5, 1.5), full_wage_led(2, 5, 1.5, 0.3)]


def random_model(rng):
    p, r, c = rng.uniform(0.5, 3.0, size=3)
    return [goodwin(r, c), minsky(p), minsky_reserve_army(p, r, c), full_wage_led(p, r, c, rng.uniform(-2, 2))][
        rng.integers(4)
    ]


def random_interior(model, rng, low=0.1, high=3.0):
    x = np.zeros(3)
    x[list(model.active_indices)] = rng.uniform(low, high, size=model.dimension)
    return x


class TestConstruction:
    def test_dimensions_and_layout(self):
        assert goodwin().variable_names == ("y", "w")
        assert minsky().variable_names == ("y", "f")
        assert full_wage_led().dimension == 3

    @pytest.mark.parametrize("bad", [dict(r=0.0, c=1.0), dict(r=1.0, c=-1.0), dict(r=float("nan"), c=1.0)])
    def test_positive_parameters_required(self, bad):
        with pytest.raises(ContractViolation):
            goodwin(**bad)

    def test_s_may_be_negative(self):
        assert full_wage_led(s=-2.0).params.s == -2.0

    def test_make_model_names_offending_key(self):
        with pytest.raises(ContractViolation, match="'q'"):
            make_model("goodwin", {"r": 1, "c": 1, "q": 2})
        with pytest.raises(ContractViolation, match="s"):
            make_model("full", {"p": 1, "r": 1, "c": 1})

    def test_statevec_invariants(self):
        with pytest.raises(ContractViolation):
            StateVec(y=-0.1, w=1.0, mask={"y", "w"})
        with pytest.raises(ContractViolation):
            StateVec(y=1.0, w=1.0, f=0.5, mask={"y", "w"})
        with pytest.raises(ContractViolation):
            StateVec(y=math.inf, w=1.0, f=1.0)

    def test_mask_mismatch_is_contract_violation(self):
        x = minsky().state(y=0.6, f=0.5)
        with pytest.raises(ContractViolation):
            eval_field(goodwin(), x)


class TestField:
    def test_goodwin_substitution(self):
        d = eval_field(goodwin(1, 1), goodwin().state(y=0.6, w=0.5))
        np.testing.assert_allclose(d, [0.30, -0.20, 0.0], atol=1e-15)

    def test_minsky_substitution(self):
        d = eval_field(minsky(1), minsky().state(y=0.6, f=0.5))
        np.testing.assert_allclose(d, [0.30, 0.0, -0.20], atol=1e-15)
        assert d[1] == 0.0

    def test_full_at_fixed_point_is_zero(self):
        assert np.all(eval_field(full_wage_led(2, 5, 1.5, 0), (0.5, 1, 1)) == 0)

    def test_axis_invariance(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            model = random_model(rng)
            x = random_interior(model, rng, 0.0, 3.0)
            zeroed = model.active_indices[rng.integers(model.dimension)]
            x[zeroed] = 0.0
            assert eval_field(model, x)[zeroed] == 0.0

    @given(p=st.floats(0.1, 5), y=st.floats(0.01, 5), z=st.floats(0.01, 5))
    @settings(max_examples=200, derandomize=True)
    def test_minsky_is_relabelled_goodwin(self, p, y, z):
        dm = eval_field(minsky(p), (y, 0.0, z))
        dg = eval_field(goodwin(r=p, c=1.0), (y, z, 0.0))
        assert dm[0] == dg[0] and dm[2] == dg[1]


class TestJacobian:
    def test_full_at_reference_fixed_point(self):
        J = eval_jacobian_analytic(full_wage_led(2, 5, 1.5, 0), (0.5, 1, 1))
        np.testing.assert_array_equal(J, [[0, 0, -0.5], [5, -1, 0], [2, 0, 0]])

    def test_goodwin_block(self):
        J = eval_jacobian_analytic(goodwin(1, 1), (1, 1))
        np.testing.assert_array_equal(J[:2, :2], [[0, -1], [1, 0]])
        assert np.all(J[2] == 0) and np.all(J[:, 2] == 0)

    @pytest.mark.parametrize("model,x", [(full_wage_led(2, 5, 1.5, 0), (0.5, 1, 1)), (goodwin(1, 1), (1, 1))])
    def test_fd_matches_analytic(self, model, x):
        np.testing.assert_allclose(eval_jacobian_fd(model, x, 1e-5), eval_jacobian_analytic(model, x), atol=1e-7)

    def test_fd_padding_exact_zero(self):
        J = eval_jacobian_fd(minsky(1), (0.6, 0, 0.5))
        assert np.all(J[1] == 0) and np.all(J[:, 1] == 0)

    def test_fd_near_axis_is_domain_error(self):
        with pytest.raises(DomainError):
            eval_jacobian_fd(goodwin(), (1e-6, 1.0), h=1e-5)

    def test_agreement_on_random_points(self):
        rng = np.random.default_rng(2)
        worst = 0.0
        for _ in range(1000):
            model = random_model(rng)
            x = random_interior(model, rng)
            worst = max(worst, np.abs(eval_jacobian_analytic(model, x) - eval_jacobian_fd(model, x, 1e-5)).max())
        assert worst <= 1e-6


class TestFixedPoints:
    def test_reference_parameters(self):
        fp = interior_fixed_point_closed_form(full_wage_led(2, 5, 1.5, 0))
        assert (fp.y, fp.w, fp.f) == (0.5, 1.0, 1.0)

    def test_reference_s_003(self):
        fp = interior_fixed_point_closed_form(full_wage_led(2, 5, 1.5, 0.03))
        np.testing.assert_allclose(fp.as_array(), [0.5, 1.0, 1.03], rtol=0, atol=1e-15)

    def test_goodwin(self):
        fp = interior_fixed_point_closed_form(goodwin(1, 1))
        assert (fp.y, fp.w, fp.f) == (1.0, 1.0, 0.0)
        fp = interior_fixed_point_closed_form(goodwin(r=4, c=2))
        assert fp.y == 0.5

    def test_minsky_and_mra(self):
        assert interior_fixed_point_closed_form(minsky(4)).active() == {"y": 0.25, "f": 1.0}
        assert interior_fixed_point_closed_form(minsky_reserve_army(2, 5, 1.5)).active() == {"y": 0.5, "w": 1.0, "f": 1.0}

    def test_non_interior_is_none(self):
        assert interior_fixed_point_closed_form(minsky_reserve_army(1, 1, 1)) is None  # w* = 0
        assert interior_fixed_point_closed_form(full_wage_led(2, 5, 1.5, -1.5)) is None  # f* < 0

    def test_field_vanishes(self):
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(500):
            model = random_model(rng)
            fp = interior_fixed_point_closed_form(model)
            if fp is None:
                continue
            checked += 1
            assert np.abs(eval_field(model, fp)).max() <= 1e-12
        assert checked > 200


class TestConservedQuantity:
    def test_at_fixed_point(self):
        assert conserved_quantity(goodwin(1, 1), (1, 1)) == 2.0

    def test_at_fig1_initial_condition(self):
        # 0.6 - ln 0.6 + 0.5 - ln 0.5 = 1.1 - ln 0.3
        assert conserved_quantity(goodwin(1, 1), (0.6, 0.5)) == pytest.approx(1.1 - math.log(0.3), abs=1e-15)
        assert conserved_quantity(goodwin(1, 1), (0.6, 0.5)) == pytest.approx(2.303972804325936, abs=1e-14)

    def test_three_d_models_have_none(self):
        assert conserved_quantity(full_wage_led(), (0.5, 0.5, 0.5)) is None
        assert conserved_quantity(minsky_reserve_army(), (0.5, 0.5, 0.5)) is None

    def test_axis_is_domain_error(self):
        with pytest.raises(DomainError):
            conserved_quantity(goodwin(), (0.0, 0.5))

    @given(r=st.floats(0.1, 5), c=st.floats(0.1, 5), y=st.floats(0.05, 5), z=st.floats(0.05, 5),
           use_minsky=st.booleans())
    @settings(max_examples=300, derandomize=True)
    def test_stationary_along_field(self, r, c, y, z, use_minsky):
        model = minsky(r) if use_minsky else goodwin(r, c)
        x = (y, 0.0, z) if use_minsky else (y, z, 0.0)
        grad = conserved_gradient(model, x)
        field = eval_field(model, x)
        scale = 1.0 + np.abs(grad).max() * np.abs(field).max()
        assert abs(grad @ field) <= 1e-12 * scale


class TestCouplingGraph:
    def test_goodwin(self):
        g = coupling_graph(goodwin(1, 1))
        assert g.edge("y", "w").sign == "+" and g.edge("w", "y").sign == "-"
        assert g.enslaved == frozenset()

    def test_full_s0_enslaves_w(self):
        g = coupling_graph(full_wage_led(2, 5, 1.5, 0))
        assert not g.has_edge("w", "y") and not g.has_edge("w", "f")
        assert g.has_edge("y", "w")
        assert g.enslaved == frozenset({"w"})

    def test_full_s1_wage_feedback(self):
        g = coupling_graph(full_wage_led(1, 1, 1, 1))
        assert g.edge("w", "y").sign == "+"
        assert g.enslaved == frozenset()

    def test_negative_s_edge_sign(self):
        assert coupling_graph(full_wage_led(s=-0.5)).edge("w", "y").sign == "-"

    def test_mra_and_minsky(self):
        assert coupling_graph(minsky_reserve_army()).enslaved == frozenset({"w"})
        assert coupling_graph(minsky()).enslaved == frozenset()

    def test_self_loops_ignored_for_enslavement(self):
        g = coupling_graph(minsky_reserve_army())
        assert any(e.source == "w" and e.target == "w" for e in g.self_loops)
        assert "w" in g.enslaved

    @pytest.mark.parametrize("model", ALL_MODELS + [full_wage_led(2, 5, 1.5, 0)])
    def test_declared_edges_match_sampling(self, model):
        g = coupling_graph(model, validate=False)
        sampled = sampled_edge_signs(model, n_points=100, seed=11)
        assert sampled == {(e.source, e.target): e.sign for e in g.edges}
