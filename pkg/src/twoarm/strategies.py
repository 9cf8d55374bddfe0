"""Named strategies, explicit decision trees, and the exhaustive enumeration oracle.

A deterministic strategy for an n-trial bandit is a depth-n tree: each node
names the arm to pull and holds one subtree per letter of the shared value
alphabet (leaves at the final trial hold none). The named variants are the
posterior-threshold rule and its forced-prefix relatives; the enumeration
oracle streams every distinct tree so small horizons can be maximized
exhaustively, independent of the backward-induction engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterator, NamedTuple

import numpy as np

from ._states import StateStepper, wealth_key
from .errors import EnumerationTooLarge, HorizonTooSmall, PolicyHorizonMismatch
from .model import Arm, BanditInstance, Belief

if TYPE_CHECKING:
    from .dp import ValueQuery

#: Largest tree count enumerate/brute-force will touch unless overridden.
DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class DecisionTree:
    """One node of an explicit strategy; ``children`` is empty at leaves."""

    arm: Arm
    children: tuple["DecisionTree", ...] = ()

    def depth(self) -> int:
        node, d = self, 1
        while node.children:
            node, d = node.children[0], d + 1
        return d


def validate_tree_shape(tree: DecisionTree, alphabet_size: int) -> int:
    """Check uniform branching and equal path lengths; return the depth."""

    def rec(node: DecisionTree) -> int:
        if not node.children:
            return 1
        if len(node.children) != alphabet_size:
            raise PolicyHorizonMismatch(
                f"internal node has {len(node.children)} children, expected "
                f"{alphabet_size}")
        depths = {rec(c) for c in node.children}
        if len(depths) != 1:
            raise PolicyHorizonMismatch("root-to-leaf paths have unequal lengths")
        return 1 + depths.pop()

    return rec(tree)


class PolicyKind(Enum):
    MYOPIC = "myopic"
    L_FIRST = "l-first"
    R_FIRST = "r-first"
    U_SWAP = "u-swap"
    V_SWAP = "v-swap"
    EXPLICIT = "explicit"


#: Forced opening arms for each rule-based variant; the threshold rule
#: takes over once the prefix is exhausted.
_FORCED_PREFIX = {
    PolicyKind.MYOPIC: (),
    PolicyKind.L_FIRST: (Arm.X,),
    PolicyKind.R_FIRST: (Arm.Y,),
    PolicyKind.U_SWAP: (Arm.X, Arm.Y),
    PolicyKind.V_SWAP: (Arm.Y, Arm.X),
}


@dataclass(frozen=True)
class PolicySpec:
    kind: PolicyKind
    tree: DecisionTree | None = None

    def __post_init__(self):
        if (self.kind is PolicyKind.EXPLICIT) != (self.tree is not None):
            raise ValueError("a tree is required for explicit policies only")

    @classmethod
    def myopic(cls) -> "PolicySpec":
        return cls(PolicyKind.MYOPIC)

    @classmethod
    def l_first(cls) -> "PolicySpec":
        return cls(PolicyKind.L_FIRST)

    @classmethod
    def r_first(cls) -> "PolicySpec":
        return cls(PolicyKind.R_FIRST)

    @classmethod
    def u_swap(cls) -> "PolicySpec":
        return cls(PolicyKind.U_SWAP)

    @classmethod
    def v_swap(cls) -> "PolicySpec":
        return cls(PolicyKind.V_SWAP)

    @classmethod
    def explicit(cls, tree: DecisionTree) -> "PolicySpec":
        return cls(PolicyKind.EXPLICIT, tree)

    def min_horizon(self) -> int:
        return max(1, len(_FORCED_PREFIX.get(self.kind, ())))


def myopic_decision(belief: Belief) -> Arm:
    """X when the first hypothesis is at least as likely, else Y.

    The boundary goes to X, so only the weight ratio matters: scaling both
    weights by a positive constant never changes the decision.
    """
    return Arm.X if belief.w1 >= belief.w2 else Arm.Y


def policy_arm(policy: PolicySpec, depth: int, belief: Belief) -> Arm:
    """Arm pulled by a rule-based policy at ``depth`` pulls into the game."""
    if policy.kind is PolicyKind.EXPLICIT:
        raise ValueError("explicit policies are walked through their tree")
    prefix = _FORCED_PREFIX[policy.kind]
    if depth < len(prefix):
        return prefix[depth]
    return myopic_decision(belief)


def expand_policy(policy: PolicySpec, instance: BanditInstance,
                  horizon: int) -> DecisionTree:
    """Materialize a policy as an explicit depth-``horizon`` tree.

    Beliefs are simulated along every outcome path; zero-probability
    branches (possible under degenerate beliefs) keep the parent belief so
    the tree stays uniformly shaped — their subtrees never influence value.
    """
    if horizon < 1:
        raise HorizonTooSmall("horizon must be at least 1")
    if policy.kind is PolicyKind.EXPLICIT:
        assert policy.tree is not None
        depth = validate_tree_shape(policy.tree, len(instance.alphabet))
        if depth != horizon:
            raise PolicyHorizonMismatch(
                f"explicit tree has depth {depth}, expected {horizon}")
        return policy.tree
    if horizon < policy.min_horizon():
        raise HorizonTooSmall(
            f"{policy.kind.value} needs at least {policy.min_horizon()} trials")

    stepper = StateStepper(instance)
    n_out = len(instance.alphabet)

    def build(state, depth: int) -> DecisionTree:
        arm = policy_arm(policy, depth, Belief(state[0], state[1]))
        if depth == horizon - 1:
            return DecisionTree(arm)
        children = []
        for i in range(n_out):
            _, child = stepper.step(state, arm, i)
            children.append(build(child if child is not None else state, depth + 1))
        return DecisionTree(arm, tuple(children))

    return build(stepper.root(), 0)


# ---------------------------------------------------------------------------
# Exhaustive enumeration.

def tree_count(alphabet_size: int, horizon: int) -> int:
    """Number of distinct depth-``horizon`` trees: 2 at horizon one, then
    2 * count^alphabet_size per extra trial."""
    if alphabet_size < 1 or horizon < 1:
        raise ValueError("alphabet_size and horizon must be positive")
    count = 2
    for _ in range(horizon - 1):
        count = 2 * count**alphabet_size
    return count


def enumerate_strategies(alphabet_size: int, horizon: int,
                         cap: int = DEFAULT_ENUMERATION_CAP
                         ) -> Iterator[DecisionTree]:
    """Yield every distinct depth-``horizon`` tree exactly once.

    Order: X-rooted trees before Y-rooted ones; child combinations advance
    last outcome fastest. Subtrees are shared between yielded trees, so
    consumers must treat them as immutable (they are frozen anyway).
    """
    total = tree_count(alphabet_size, horizon)
    if total > cap:
        raise EnumerationTooLarge(total, cap)

    def level(m: int) -> list[DecisionTree]:
        if m == 1:
            return [DecisionTree(Arm.X), DecisionTree(Arm.Y)]
        subs = level(m - 1)
        return [DecisionTree(arm, combo)
                for arm in (Arm.X, Arm.Y)
                for combo in itertools.product(subs, repeat=alphabet_size)]

    if horizon == 1:
        yield from level(1)
        return
    subs = level(horizon - 1)
    for arm in (Arm.X, Arm.Y):
        for combo in itertools.product(subs, repeat=alphabet_size):
            yield DecisionTree(arm, combo)


def tree_at_index(alphabet_size: int, horizon: int, index: int) -> DecisionTree:
    """The ``index``-th tree in enumeration order, built directly."""
    total = tree_count(alphabet_size, horizon)
    if not 0 <= index < total:
        raise IndexError(f"tree index {index} out of range [0, {total})")

    def build(m: int, idx: int) -> DecisionTree:
        half = tree_count(alphabet_size, m) // 2
        arm = Arm.X if idx < half else Arm.Y
        idx %= half
        if m == 1:
            return DecisionTree(arm)
        base = tree_count(alphabet_size, m - 1)
        children = []
        for slot in range(alphabet_size):
            power = base ** (alphabet_size - 1 - slot)
            children.append(build(m - 1, idx // power))
            idx %= power
        return DecisionTree(arm, tuple(children))

    return build(horizon, index)


def all_strategy_values(query: "ValueQuery",
                        cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Expected utility of every enumerable tree, in enumeration order.

    Computed by propagating whole value vectors through the first-trial
    decomposition: the entry for tree (arm, children) at a state is the
    probability-weighted sum of its children's entries at the successor
    states. No maximization happens anywhere, so the result is an
    exhaustive per-strategy evaluation, not a backward induction.
    """
    total = tree_count(len(query.instance.alphabet), query.horizon)
    if total > cap:
        raise EnumerationTooLarge(total, cap)

    stepper = StateStepper(query.instance)
    values = query.instance.alphabet
    n_out = len(values)
    utility = query.utility
    counts = {m: tree_count(n_out, m) for m in range(1, query.horizon + 1)}
    memo: dict = {}

    def rec(state, wealth: float, remaining: int) -> np.ndarray:
        mkey = (state[2], remaining, wealth_key(wealth))
        hit = memo.get(mkey)
        if hit is not None:
            return hit
        blocks = []
        for arm in (Arm.X, Arm.Y):
            if remaining == 1:
                acc = np.array(sum(
                    stepper.step(state, arm, i)[0] * utility(wealth + values[i])
                    for i in range(n_out)))
            else:
                acc = np.array(0.0)
                for i in range(n_out):
                    prob, child = stepper.step(state, arm, i)
                    if child is None:
                        vec = np.zeros(counts[remaining - 1])
                    else:
                        vec = prob * rec(child, wealth + values[i], remaining - 1)
                    acc = acc[..., np.newaxis] + vec
            blocks.append(np.ravel(acc))
        out = np.concatenate(blocks)
        memo[mkey] = out
        return out

    return rec(stepper.root(), query.wealth, query.horizon)


class BruteForceResult(NamedTuple):
    value: float
    best_tree: DecisionTree


def brute_force_value(query: "ValueQuery",
                      cap: int = DEFAULT_ENUMERATION_CAP) -> BruteForceResult:
    """Exhaustive supremum of expected utility over every depth-n tree.

    Ties go to the first maximizer in enumeration order (an X-rooted tree
    when both roots tie).
    """
    vals = all_strategy_values(query, cap)
    idx = int(np.argmax(vals))
    tree = tree_at_index(len(query.instance.alphabet), query.horizon, idx)
    return BruteForceResult(float(vals[idx]), tree)


# ---------------------------------------------------------------------------
# Wire format.

def tree_to_dict(tree: DecisionTree) -> dict:
    return {"arm": tree.arm.value,
            "children": [tree_to_dict(c) for c in tree.children]}


def tree_from_dict(data: dict) -> DecisionTree:
    arm = Arm(data["arm"])
    return DecisionTree(arm, tuple(tree_from_dict(c) for c in data["children"]))
