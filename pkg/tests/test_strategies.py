"""Named strategies, tree enumeration, and the exhaustive maximization oracle."""

import json

import pytest
from hypothesis import given, strategies as st

from twoarm import (Arm, Belief, DecisionTree, EnumerationTooLarge,
                    HorizonTooSmall, PiecewiseLinear, PolicyHorizonMismatch,
                    PolicySpec, ValueQuery, all_strategy_values,
                    brute_force_value, enumerate_strategies, evaluate_policy,
                    expand_policy, myopic_decision, optimal_value, policy_arm,
                    posterior_update, tree_at_index, tree_count, tree_from_dict,
                    tree_to_dict)
from helpers import IDENTITY, NEG_IDENTITY, bern, disjoint_support, three_letter
from oracles import path_enum_value

X_LEAF = DecisionTree(Arm.X)
Y_LEAF = DecisionTree(Arm.Y)


class TestMyopicDecision:
    def test_threshold_cases(self):
        assert myopic_decision(Belief(0.7, 0.3)) is Arm.X
        assert myopic_decision(Belief(0.5, 0.5)) is Arm.X  # boundary goes to X
        assert myopic_decision(Belief(0.2, 0.8)) is Arm.Y

    @given(st.floats(0.0, 1.0), st.floats(1e-9, 1e9))
    def test_scale_invariant(self, xi, scale):
        base = Belief(xi + 1e-12, 1 - xi + 1e-12)
        scaled = Belief(base.w1 * scale, base.w2 * scale)
        assert myopic_decision(base) is myopic_decision(scaled)


class TestPolicyArm:
    def test_forced_prefixes(self):
        high = Belief(0.9, 0.1)
        low = Belief(0.1, 0.9)
        assert policy_arm(PolicySpec.l_first(), 0, low) is Arm.X
        assert policy_arm(PolicySpec.r_first(), 0, high) is Arm.Y
        assert policy_arm(PolicySpec.u_swap(), 0, low) is Arm.X
        assert policy_arm(PolicySpec.u_swap(), 1, high) is Arm.Y
        assert policy_arm(PolicySpec.v_swap(), 0, high) is Arm.Y
        assert policy_arm(PolicySpec.v_swap(), 1, low) is Arm.X
        # after the prefix every variant follows the posterior threshold
        for spec in (PolicySpec.l_first(), PolicySpec.u_swap()):
            assert policy_arm(spec, 2, low) is Arm.Y
            assert policy_arm(spec, 2, high) is Arm.X

    def test_explicit_not_supported(self):
        with pytest.raises(ValueError):
            policy_arm(PolicySpec.explicit(X_LEAF), 0, Belief(1.0, 0.0))


class TestPolicySpec:
    def test_explicit_requires_tree(self):
        with pytest.raises(ValueError):
            PolicySpec(kind=PolicySpec.myopic().kind, tree=X_LEAF)

    def test_min_horizon(self):
        assert PolicySpec.myopic().min_horizon() == 1
        assert PolicySpec.l_first().min_horizon() == 1
        assert PolicySpec.u_swap().min_horizon() == 2


class TestExpandPolicy:
    def test_myopic_single_trial(self):
        assert expand_policy(PolicySpec.myopic(), bern(0.7, 0.3, 0.6), 1) == X_LEAF

    def test_myopic_equals_l_first_for_confident_priors(self):
        """With prior at or above one half the root rule already picks X."""
        for xi in (0.5, 0.6, 0.8, 1.0):
            inst = bern(0.7, 0.3, xi)
            for n in range(1, 7):
                assert expand_policy(PolicySpec.myopic(), inst, n) == \
                    expand_policy(PolicySpec.l_first(), inst, n)

    def test_u_swap_two_trials(self):
        tree = expand_policy(PolicySpec.u_swap(), bern(0.7, 0.3, 0.6), 2)
        assert tree.arm is Arm.X
        assert all(c.arm is Arm.Y for c in tree.children)

    def test_swap_needs_two_trials(self):
        with pytest.raises(HorizonTooSmall):
            expand_policy(PolicySpec.u_swap(), bern(0.7, 0.3, 0.6), 1)

    def test_explicit_passthrough_and_mismatch(self):
        inst = bern(0.7, 0.3, 0.6)
        assert expand_policy(PolicySpec.explicit(X_LEAF), inst, 1) is X_LEAF
        with pytest.raises(PolicyHorizonMismatch):
            expand_policy(PolicySpec.explicit(X_LEAF), inst, 2)

    def test_myopic_nodes_track_posterior_threshold(self):
        """Each reachable node pulls X exactly when its posterior is >= 1/2."""
        inst = three_letter(0.4)
        n = 3
        tree = expand_policy(PolicySpec.myopic(), inst, n)

        def walk(node, belief, depth):
            assert node.arm is (Arm.X if belief.xi >= 0.5 else Arm.Y)
            if depth < n - 1:
                for i, v in enumerate(inst.alphabet):
                    walk(node.children[i],
                         posterior_update(belief, node.arm, v, inst), depth + 1)

        walk(tree, Belief.from_prior(0.4), 0)

    def test_expansion_matches_rule_evaluation(self):
        inst = disjoint_support(0.3)
        for n in (2, 3):
            for policy in (PolicySpec.myopic(), PolicySpec.r_first(),
                           PolicySpec.v_swap()):
                q = ValueQuery(inst, IDENTITY, n, 0.0)
                tree = expand_policy(policy, inst, n)
                assert evaluate_policy(q, PolicySpec.explicit(tree)) == \
                    pytest.approx(evaluate_policy(q, policy), abs=1e-12)


class TestEnumeration:
    def test_counts(self):
        assert tree_count(2, 1) == 2
        assert tree_count(2, 2) == 8
        assert tree_count(2, 3) == 128
        assert tree_count(2, 4) == 32768
        assert tree_count(3, 2) == 16
        assert tree_count(3, 3) == 8192

    def test_stream_is_complete_and_distinct(self):
        for n in (1, 2, 3):
            trees = list(enumerate_strategies(2, n))
            assert len(trees) == tree_count(2, n)
            assert len(set(trees)) == len(trees)
            assert all(t.depth() == n for t in trees)

    def test_cap_enforced_with_count(self):
        with pytest.raises(EnumerationTooLarge) as err:
            list(enumerate_strategies(2, 5))
        assert err.value.count == 2 * 32768**2
        assert err.value.cap == 10**6

    def test_cap_override(self):
        assert len(list(enumerate_strategies(2, 2, cap=8))) == 8
        with pytest.raises(EnumerationTooLarge):
            list(enumerate_strategies(2, 2, cap=7))

    def test_tree_at_index_matches_stream(self):
        for alphabet_size, n in ((2, 1), (2, 2), (2, 3), (3, 2)):
            for i, tree in enumerate(enumerate_strategies(alphabet_size, n)):
                assert tree_at_index(alphabet_size, n, i) == tree
        with pytest.raises(IndexError):
            tree_at_index(2, 2, 8)


class TestAllStrategyValues:
    def test_matches_per_tree_evaluation(self):
        """Vectorized sweep equals both package and path-enumeration values."""
        cases = [
            (bern(0.7, 0.3, 0.6), IDENTITY, 3, 0.0),
            (bern(0.2, 0.9, 0.45), NEG_IDENTITY, 3, 1.5),
            (three_letter(0.5), PiecewiseLinear(((0.0, 0.0), (3.0, 1.0))), 2, 0.0),
            (disjoint_support(1.0), IDENTITY, 3, -2.0),
        ]
        for inst, utility, n, x in cases:
            q = ValueQuery(inst, utility, n, x)
            vec = all_strategy_values(q)
            trees = list(enumerate_strategies(len(inst.alphabet), n))
            assert len(vec) == len(trees)
            for value, tree in zip(vec, trees):
                assert value == pytest.approx(
                    evaluate_policy(q, PolicySpec.explicit(tree)), abs=1e-12)
                assert value == pytest.approx(
                    path_enum_value(inst, utility, n, x, tree), abs=1e-12)


class TestBruteForce:
    def test_single_pull(self):
        q = ValueQuery(bern(0.7, 0.3, 0.6), IDENTITY, 1, 0.0)
        value, tree = brute_force_value(q)
        assert value == pytest.approx(0.54, abs=1e-15)
        assert tree == X_LEAF

    def test_equal_arms_tie_to_first_enumerated(self):
        inst = bern(0.4, 0.4, 0.6)
        value, tree = brute_force_value(ValueQuery(inst, IDENTITY, 2, 0.0))
        assert tree == tree_at_index(2, 2, 0)
        assert value == pytest.approx(0.8, abs=1e-12)

    def test_constant_utility(self):
        q = ValueQuery(bern(0.7, 0.3, 0.6), PiecewiseLinear.constant(-3.0), 3, 0.0)
        assert brute_force_value(q).value == pytest.approx(-3.0, abs=1e-12)

    def test_best_tree_achieves_value(self):
        q = ValueQuery(three_letter(0.35), IDENTITY, 2, 0.0)
        value, tree = brute_force_value(q)
        assert evaluate_policy(q, PolicySpec.explicit(tree)) == \
            pytest.approx(value, abs=1e-12)

    def test_agrees_with_backward_induction(self):
        # a three-letter alphabet already has ~1e12 depth-4 trees, so the
        # disjoint-support case stops at depth 3
        for inst, utility, n_top in ((bern(0.7, 0.3, 0.6), IDENTITY, 4),
                                     (bern(0.3, 0.7, 0.8), IDENTITY, 4),
                                     (bern(0.8, 0.2, 0.25), NEG_IDENTITY, 4),
                                     (disjoint_support(0.65), IDENTITY, 3)):
            for n in range(1, n_top + 1):
                q = ValueQuery(inst, utility, n, 0.0)
                assert brute_force_value(q).value == pytest.approx(
                    optimal_value(q).value, abs=1e-12)

    def test_cap(self):
        q = ValueQuery(bern(0.7, 0.3, 0.6), IDENTITY, 5, 0.0)
        with pytest.raises(EnumerationTooLarge):
            brute_force_value(q)


class TestTreeSerialization:
    def test_round_trip_every_small_tree(self):
        for n in (1, 2, 3):
            for tree in enumerate_strategies(2, n):
                data = tree_to_dict(tree)
                assert tree_from_dict(data) == tree
                assert tree_from_dict(json.loads(json.dumps(data))) == tree

    def test_wire_shape(self):
        tree = DecisionTree(Arm.X, (X_LEAF, Y_LEAF))
        assert tree_to_dict(tree) == {
            "arm": "X",
            "children": [{"arm": "X", "children": []},
                         {"arm": "Y", "children": []}]}
