import json

import numpy as np
import pytest
from hypothesis import given, settings

from battery import P3, PT3, pmf_pairs, random_grid_pairs, random_pmf_pairs
from onestep.dist import DiscreteDist, GridDensity, integrate
from onestep.errors import ShapeError, SupportError, UnsupportedError
from onestep.functionals import ISD, MEAN, influence_derivative
from onestep.paths import Path, pathwise_derivative_at_one
from onestep.scorepath import discrete_chain_rule_derivative, score_at_zero, score_identity_check


class TestScore:
    def test_same_distribution(self, beta22):
        s, flagged = score_at_zero(beta22, beta22)
        assert np.all(s == 0) and not flagged.any()

    def test_uniform_to_linear(self, uniform, linear):
        s, _ = score_at_zero(uniform, linear)
        np.testing.assert_allclose(s, 2 * uniform.support - 1, atol=1e-12)

    def test_discrete_hand_value(self):
        s, _ = score_at_zero(DiscreteDist(P3), DiscreteDist(PT3))
        np.testing.assert_allclose(s, [0.2, 0.0, -0.5], atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(pmf_pairs())
    def test_centred(self, pair):
        G, Q = pair
        s, flagged = score_at_zero(G, Q)
        assert not flagged.any()
        assert abs(integrate(s * G.density, G)) < 1e-10


class TestScoreIdentity:
    def test_same_distribution(self, beta22):
        c = score_identity_check(ISD, beta22, beta22)
        assert c.lhs == 0.0 and c.rhs == 0.0

    def test_discrete_hand_value(self):
        c = score_identity_check(ISD, DiscreteDist(P3), DiscreteDist(PT3))
        assert c.rhs == pytest.approx(0.06, abs=1e-12)
        assert c.residual < 1e-6

    def test_uniform_base(self, uniform, twobump):
        c = score_identity_check(ISD, uniform, twobump)
        assert abs(c.rhs) < 1e-12
        assert abs(c.lhs) < 1e-8

    @pytest.mark.parametrize("T", [ISD, MEAN], ids=lambda T: T.name)
    def test_battery(self, T):
        for G, Q in random_pmf_pairs(20, 61) + random_grid_pairs(10, 62):
            c = score_identity_check(T, G, Q)
            assert c.residual < 1e-6
            assert abs(c.rhs - influence_derivative(T, G, Q)) < 1e-10

    def test_flagged_mass_raises(self):
        G = DiscreteDist([0.5, 0.5, 0.0])
        Q = DiscreteDist([0.2, 0.2, 0.6])
        with pytest.raises(SupportError):
            score_identity_check(ISD, G, Q)

    def test_zero_density_without_new_mass(self):
        G = DiscreteDist([0.5, 0.5, 0.0])
        Q = DiscreteDist([0.3, 0.7, 0.0])
        c = score_identity_check(ISD, G, Q)
        assert c.flagged_mass == 0.0
        assert c.residual < 1e-6

    def test_grid_density_with_empty_region(self, beta22):
        g = np.where(beta22.support < 0.5, beta22.values, 0.0)
        G = GridDensity(g)
        with pytest.raises(SupportError):
            score_identity_check(ISD, G, beta22)

    def test_to_json(self, pair3):
        c = score_identity_check(ISD, *pair3)
        d = json.loads(c.to_json())
        assert d["rhs"] == c.rhs and len(d["score0"]) == 3


class TestChainRule:
    def test_same_distribution(self, pair3):
        P, _ = pair3
        assert discrete_chain_rule_derivative(P, P, ISD) == 0.0

    def test_hand_value(self, pair3):
        P, Pt = pair3
        assert discrete_chain_rule_derivative(P, Pt, ISD) == pytest.approx(0.1, abs=1e-12)

    def test_uniform_initial(self, pair3):
        P, _ = pair3
        U = DiscreteDist([1 / 3] * 3)
        assert discrete_chain_rule_derivative(P, U, ISD) == pytest.approx(0.0, abs=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(pmf_pairs())
    def test_matches_pathwise_derivative(self, pair):
        P, Pt = pair
        chain = discrete_chain_rule_derivative(P, Pt, ISD)
        assert abs(chain - pathwise_derivative_at_one(Path(P, Pt), ISD)) < 1e-12

    def test_shape_mismatch(self, pair3):
        with pytest.raises(ShapeError):
            discrete_chain_rule_derivative(pair3[0], DiscreteDist([0.5, 0.5]), ISD)

    def test_grid_densities_rejected(self, beta22, linear):
        with pytest.raises(UnsupportedError):
            discrete_chain_rule_derivative(beta22, linear, ISD)
