"""Domain types and the Bayes/expectation primitives."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from twoarm import (Arm, BanditInstance, Belief, FiniteDistribution,
                    Hypothesis, Identity, ImpossibleObservation,
                    IndicatorThreshold, Negated, PiecewiseLinear,
                    expectation_under, mixture_outcome_prob, posterior_update)
from helpers import bern, disjoint_support, three_letter


class TestFiniteDistribution:
    def test_canonical_ordering(self):
        d = FiniteDistribution(((1.0, 0.7), (0.0, 0.3)))
        assert d.values == (0.0, 1.0)
        assert d.probs == (0.3, 0.7)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            FiniteDistribution(())

    def test_rejects_duplicate_values(self):
        with pytest.raises(ValueError):
            FiniteDistribution(((1.0, 0.5), (1.0, 0.5)))

    def test_rejects_nonpositive_probs(self):
        with pytest.raises(ValueError):
            FiniteDistribution(((0.0, 0.0), (1.0, 1.0)))
        with pytest.raises(ValueError):
            FiniteDistribution(((0.0, -0.2), (1.0, 1.2)))

    def test_rejects_bad_total(self):
        with pytest.raises(ValueError):
            FiniteDistribution(((0.0, 0.5), (1.0, 0.6)))

    def test_bernoulli_and_point(self):
        b = FiniteDistribution.bernoulli(0.7)
        assert b.prob_of(1.0) == 0.7 and b.prob_of(0.0) == pytest.approx(0.3)
        assert b.prob_of(2.0) == 0.0
        assert FiniteDistribution.bernoulli(1.0).values == (1.0,)
        assert FiniteDistribution.bernoulli(0.0).values == (0.0,)
        assert FiniteDistribution.point(-2.5).support == ((-2.5, 1.0),)

    def test_mean(self):
        assert FiniteDistribution.bernoulli(0.7).mean() == pytest.approx(0.7)


class TestBelief:
    def test_xi(self):
        assert Belief(0.7, 0.3).xi == pytest.approx(0.7)
        assert Belief(2.0, 2.0).xi == 0.5

    def test_from_prior(self):
        assert Belief.from_prior(1.0).xi == 1.0
        assert Belief.from_prior(0.0).xi == 0.0
        with pytest.raises(ValueError):
            Belief.from_prior(1.5)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            Belief(0.0, 0.0)
        with pytest.raises(ValueError):
            Belief(-0.1, 0.5)

    def test_normalized(self):
        b = Belief(3.0, 1.0).normalized()
        assert b.w1 + b.w2 == pytest.approx(1.0)
        assert b.xi == pytest.approx(0.75)


class TestBanditInstance:
    def test_alphabet_is_union(self):
        inst = disjoint_support(0.5)
        assert inst.alphabet == (0.0, 1.0, 2.0)
        assert inst.mass1 == (0.5, 0.0, 0.5)
        assert inst.mass2 == (0.0, 1.0, 0.0)

    def test_prior_bounds(self):
        with pytest.raises(ValueError):
            bern(0.7, 0.3, -0.1)
        with pytest.raises(ValueError):
            bern(0.7, 0.3, 1.1)

    def test_index_of_unknown_value(self):
        with pytest.raises(ImpossibleObservation):
            bern(0.7, 0.3, 0.5).index_of(0.25)


class TestUtilities:
    def test_identity(self):
        assert Identity()(3.25) == 3.25

    def test_indicator_boundary(self):
        u = IndicatorThreshold(2.0)
        assert u(2.0) == 1.0
        assert u(1.9999999) == 0.0
        assert u(5.0) == 1.0

    def test_negated(self):
        assert Negated(Identity())(1.5) == -1.5
        assert Negated(IndicatorThreshold(1.0))(3.0) == -1.0

    def test_piecewise_interpolation(self):
        u = PiecewiseLinear(((0.0, 0.0), (2.0, 1.0)))
        assert u(1.0) == pytest.approx(0.5)
        assert u(0.5) == pytest.approx(0.25)

    def test_piecewise_constant_extension(self):
        u = PiecewiseLinear(((0.0, 0.0), (2.0, 1.0)))
        assert u(-100.0) == 0.0
        assert u(100.0) == 1.0

    def test_piecewise_single_point_is_constant(self):
        u = PiecewiseLinear.constant(4.5)
        assert u(-1e9) == 4.5 and u(0.0) == 4.5 and u(1e9) == 4.5

    def test_piecewise_rejects_unordered_breakpoints(self):
        with pytest.raises(ValueError):
            PiecewiseLinear(((1.0, 0.0), (1.0, 1.0)))

    @given(st.floats(min_value=-1e12, max_value=1e12, allow_nan=False))
    def test_total_and_deterministic_on_reals(self, x):
        for u in (Identity(), IndicatorThreshold(1.0),
                  PiecewiseLinear(((-1.0, 2.0), (0.5, -1.0), (3.0, 0.0))),
                  Negated(PiecewiseLinear.constant(2.0))):
            first = u(x)
            assert math.isfinite(first)
            assert u(x) == first


class TestPosteriorUpdate:
    def test_bernoulli_success_pull_x(self):
        # 0.5 * 0.7 / (0.5 * 0.7 + 0.5 * 0.3) = 0.7
        b = posterior_update(Belief(0.5, 0.5), Arm.X, 1.0, bern(0.7, 0.3, 0.5))
        assert b.xi == pytest.approx(0.7, abs=1e-15)
        assert b.w1 + b.w2 == pytest.approx(1.0, abs=1e-15)

    def test_equal_arms_leave_belief_unchanged(self):
        inst = BanditInstance(FiniteDistribution.bernoulli(0.4),
                              FiniteDistribution.bernoulli(0.4), 0.3)
        for arm in (Arm.X, Arm.Y):
            for outcome in (0.0, 1.0):
                b = posterior_update(Belief(0.3, 0.7), arm, outcome, inst)
                assert b.xi == pytest.approx(0.3, abs=1e-15)

    def test_degenerate_prior_absorbs(self):
        b = posterior_update(Belief(1.0, 0.0), Arm.X, 1.0, bern(0.7, 0.3, 1.0))
        assert b.xi == 1.0

    def test_outcome_outside_alphabet(self):
        with pytest.raises(ImpossibleObservation):
            posterior_update(Belief(0.5, 0.5), Arm.X, 7.0, bern(0.7, 0.3, 0.5))

    def test_zero_mass_under_both_hypotheses(self):
        # certain of hypothesis one, but the observation is impossible there
        inst = disjoint_support(1.0)
        with pytest.raises(ImpossibleObservation):
            posterior_update(Belief(1.0, 0.0), Arm.X, 1.0, inst)

    @given(st.integers(0, 100), st.integers(0, 100))
    def test_monotone_in_prior(self, a, b):
        """For a fixed arm and outcome the posterior grows with the prior."""
        lo, hi = sorted((a / 100, b / 100))
        inst = three_letter(0.5)
        for arm in (Arm.X, Arm.Y):
            for outcome in (0.0, 1.0, 2.0):
                post_lo = posterior_update(Belief.from_prior(lo), arm, outcome,
                                           inst).xi
                post_hi = posterior_update(Belief.from_prior(hi), arm, outcome,
                                           inst).xi
                assert post_lo <= post_hi + 1e-15

    @given(st.floats(0.01, 0.99), st.floats(1e-6, 1e6))
    @settings(max_examples=50)
    def test_bayes_consistency_from_scratch(self, xi0, scale):
        """Weight-pair updates reproduce the one-shot Bayes ratio."""
        inst = three_letter(xi0)
        for arm in (Arm.X, Arm.Y):
            for outcome in (0.0, 2.0):
                got = posterior_update(Belief(xi0 * scale, (1 - xi0) * scale),
                                       arm, outcome, inst).xi
                i = inst.index_of(outcome)
                m1, m2 = ((inst.mass1[i], inst.mass2[i]) if arm is Arm.X
                          else (inst.mass2[i], inst.mass1[i]))
                direct = xi0 * m1 / (xi0 * m1 + (1 - xi0) * m2)
                assert abs(got - direct) <= 1e-14


class TestExpectationUnder:
    def test_mass_assignment(self):
        inst = bern(0.7, 0.3, 0.5)
        ident = lambda s: s
        assert expectation_under(Hypothesis.H1, Arm.X, ident, inst) == pytest.approx(0.7)
        assert expectation_under(Hypothesis.H1, Arm.Y, ident, inst) == pytest.approx(0.3)
        assert expectation_under(Hypothesis.H2, Arm.X, ident, inst) == pytest.approx(0.3)
        assert expectation_under(Hypothesis.H2, Arm.Y, ident, inst) == pytest.approx(0.7)

    def test_general_function(self):
        inst = three_letter(0.5)
        sq = lambda s: s * s
        assert expectation_under(Hypothesis.H1, Arm.X, sq, inst) == \
            pytest.approx(0.3 + 4 * 0.5)


class TestMixtureOutcomeProb:
    def test_even_mixture(self):
        inst = bern(0.7, 0.3, 0.5)
        assert mixture_outcome_prob(Belief(0.5, 0.5), Arm.X, 1.0, inst) == \
            pytest.approx(0.5)

    def test_pure_hypothesis(self):
        inst = bern(0.7, 0.3, 1.0)
        assert mixture_outcome_prob(Belief(1.0, 0.0), Arm.X, 1.0, inst) == \
            pytest.approx(0.7)

    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    @settings(max_examples=50)
    def test_normalization_over_alphabet(self, xi, w):
        for inst in (bern(0.7, 0.3, 0.5), three_letter(0.5),
                     disjoint_support(0.5)):
            belief = Belief(xi * (w + 0.5), (1 - xi) * (w + 0.5) + 1e-9)
            for arm in (Arm.X, Arm.Y):
                total = sum(mixture_outcome_prob(belief, arm, v, inst)
                            for v in inst.alphabet)
                assert total == pytest.approx(1.0, abs=1e-12)
