"""Exact strategy evaluation and backward-induction optimal values.

Everything reduces through the first-trial decomposition: the worth of
playing on from a state is the predictive-probability-weighted average of
the worths one trial later, with the utility of final wealth as the base
case. ``evaluate_policy`` follows a fixed strategy through that recursion;
``optimal_value`` maximizes over the arm at every step instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, NamedTuple, Optional

from ._states import State, StateStepper, wealth_key
from .errors import HorizonTooSmall, PolicyHorizonMismatch
from .model import Arm, BanditInstance, Belief, UtilityFn
from .strategies import (DecisionTree, PolicyKind, PolicySpec, policy_arm,
                         validate_tree_shape)


@dataclass(frozen=True)
class ValueQuery:
    """One bandit evaluation problem: instance, utility, trials, start wealth."""

    instance: BanditInstance
    utility: UtilityFn
    horizon: int
    wealth: float

    def __post_init__(self):
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ValueError("horizon must be a positive integer")


@dataclass
class ValueTable:
    """Memo of state values keyed by (belief key, remaining trials, wealth key).

    Entries are immutable once stored; under CPython's GIL dict writes are
    atomic whole-entry inserts, so a table may be shared by concurrent
    sweeps over the same query.
    """

    entries: dict[tuple[Hashable, int, float], float] = field(default_factory=dict)

    def get(self, key) -> Optional[float]:
        return self.entries.get(key)

    def put(self, key, value: float) -> None:
        self.entries[key] = value

    def __len__(self) -> int:
        return len(self.entries)


class OptimalValue(NamedTuple):
    value: float
    first_arm: Arm


def evaluate_policy(query: ValueQuery, policy: PolicySpec) -> float:
    """Expected utility of final wealth when playing ``policy``.

    Explicit trees must have the query's depth and the instance's branching
    factor; rule-based variants must fit the horizon. Raises
    PolicyHorizonMismatch (or its HorizonTooSmall refinement) otherwise.
    """
    if policy.kind is PolicyKind.EXPLICIT:
        assert policy.tree is not None
        depth = validate_tree_shape(policy.tree, len(query.instance.alphabet))
        if depth != query.horizon:
            raise PolicyHorizonMismatch(
                f"explicit tree has depth {depth}, expected {query.horizon}")
        return _evaluate_tree(query, policy.tree)
    if query.horizon < policy.min_horizon():
        raise HorizonTooSmall(
            f"{policy.kind.value} needs at least {policy.min_horizon()} trials")
    return _evaluate_rule(query, policy)


def _evaluate_tree(query: ValueQuery, tree: DecisionTree) -> float:
    stepper = StateStepper(query.instance)
    values = query.instance.alphabet
    utility = query.utility

    def rec(node: DecisionTree, state: State, wealth: float, remaining: int) -> float:
        total = 0.0
        for i, v in enumerate(values):
            prob, child = stepper.step(state, node.arm, i)
            if prob == 0.0:
                continue
            if remaining == 1:
                total += prob * utility(wealth + v)
            else:
                total += prob * rec(node.children[i], child, wealth + v, remaining - 1)
        return total

    return rec(tree, stepper.root(), query.wealth, query.horizon)


def _evaluate_rule(query: ValueQuery, policy: PolicySpec) -> float:
    # Rule-based variants decide from (depth, belief) alone, and depth is
    # horizon - remaining, so states may be memoized exactly like the DP's.
    stepper = StateStepper(query.instance)
    values = query.instance.alphabet
    utility = query.utility
    horizon = query.horizon
    memo: dict = {}

    def rec(state: State, wealth: float, remaining: int) -> float:
        if remaining == 0:
            return utility(wealth)
        mkey = (state[2], remaining, wealth_key(wealth))
        hit = memo.get(mkey)
        if hit is not None:
            return hit
        arm = policy_arm(policy, horizon - remaining, Belief(state[0], state[1]))
        total = 0.0
        for i, v in enumerate(values):
            prob, child = stepper.step(state, arm, i)
            if prob > 0.0:
                total += prob * rec(child, wealth + v, remaining - 1)
        memo[mkey] = total
        return total

    return rec(stepper.root(), query.wealth, query.horizon)


def _arm_continuation(stepper: StateStepper, values, utility, table: ValueTable,
                      state: State, wealth: float, remaining: int, arm: Arm) -> float:
    total = 0.0
    for i, v in enumerate(values):
        prob, child = stepper.step(state, arm, i)
        if prob > 0.0:
            total += prob * _optimal_rec(stepper, values, utility, table,
                                         child, wealth + v, remaining - 1)
    return total


def _optimal_rec(stepper: StateStepper, values, utility, table: ValueTable,
                 state: State, wealth: float, remaining: int) -> float:
    key = (state[2], remaining, wealth_key(wealth))
    hit = table.get(key)
    if hit is not None:
        return hit
    if remaining == 0:
        best = utility(wealth)
    else:
        vx = _arm_continuation(stepper, values, utility, table,
                               state, wealth, remaining, Arm.X)
        vy = _arm_continuation(stepper, values, utility, table,
                               state, wealth, remaining, Arm.Y)
        best = vx if vx >= vy else vy
    table.put(key, best)
    return best


def optimal_value(query: ValueQuery,
                  table: Optional[ValueTable] = None) -> OptimalValue:
    """Supremum of expected utility over all strategies, by backward induction.

    Also reports the maximizing first arm, X on ties. A ``table`` may be
    supplied to share memoized state values across calls for the same query.
    """
    if table is None:
        table = ValueTable()
    stepper = StateStepper(query.instance)
    values = query.instance.alphabet
    root = stepper.root()
    vx = _arm_continuation(stepper, values, query.utility, table,
                           root, query.wealth, query.horizon, Arm.X)
    vy = _arm_continuation(stepper, values, query.utility, table,
                           root, query.wealth, query.horizon, Arm.Y)
    best, arm = (vx, Arm.X) if vx >= vy else (vy, Arm.Y)
    table.put((root[2], query.horizon, wealth_key(query.wealth)), best)
    return OptimalValue(best, arm)


def optimal_policy_tree(query: ValueQuery,
                        table: Optional[ValueTable] = None) -> DecisionTree:
    """An explicit depth-n tree achieving the optimal value.

    Every node's arm is the argmax of the one-step comparison at that
    node's belief and wealth, X on ties. Unreachable branches keep the
    parent belief, mirroring expand_policy.
    """
    if table is None:
        table = ValueTable()
    stepper = StateStepper(query.instance)
    values = query.instance.alphabet
    utility = query.utility

    def build(state: State, wealth: float, remaining: int) -> DecisionTree:
        vx = _arm_continuation(stepper, values, utility, table,
                               state, wealth, remaining, Arm.X)
        vy = _arm_continuation(stepper, values, utility, table,
                               state, wealth, remaining, Arm.Y)
        arm = Arm.X if vx >= vy else Arm.Y
        if remaining == 1:
            return DecisionTree(arm)
        children = []
        for i, v in enumerate(values):
            _, child = stepper.step(state, arm, i)
            children.append(build(child if child is not None else state,
                                  wealth + v, remaining - 1))
        return DecisionTree(arm, tuple(children))

    return build(stepper.root(), query.wealth, query.horizon)
