"""Seeded stochastic cross-check of exact expected utilities.

Each sample draws the hypothesis from the prior, then plays the policy for
the full horizon, drawing every pulled arm's payoff from its law under the
drawn hypothesis, and records the utility of final wealth. The uniform
stream is a PCG64 generator consumed as a (samples, horizon + 1) row-major
block: column 0 decides the hypothesis, column 1 + i the payoff of trial i
by inverse CDF over the active support in value order. That layout is part
of the contract, so identical inputs replay bit-identically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dp import ValueQuery
from .errors import PolicyHorizonMismatch
from .model import Arm, Belief, FiniteDistribution, posterior_update
from .strategies import PolicyKind, PolicySpec, policy_arm, validate_tree_shape

GENERATOR_ID = "numpy.random.PCG64"


@dataclass(frozen=True)
class SimConfig:
    samples: int
    seed: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimResult:
    mean: float
    std_error: float
    samples: int

    def to_dict(self, config: SimConfig) -> dict:
        return {"mean": self.mean, "std_error": self.std_error,
                "samples": self.samples, "seed": config.seed,
                "generator": GENERATOR_ID}

    def to_json(self, config: SimConfig) -> str:
        return json.dumps(self.to_dict(config))


def _inverse_cdf(dist: FiniteDistribution, u: float) -> float:
    cum = 0.0
    for v, p in dist.support:
        cum += p
        if u < cum:
            return v
    return dist.support[-1][0]  # guard against accumulated rounding at u ~ 1


def simulate_policy(query: ValueQuery, policy: PolicySpec,
                    config: SimConfig) -> SimResult:
    """Estimate the expected utility of playing ``policy`` by simulation."""
    instance = query.instance
    horizon = query.horizon
    utility = query.utility

    tree = policy.tree
    if policy.kind is PolicyKind.EXPLICIT:
        assert tree is not None
        depth = validate_tree_shape(tree, len(instance.alphabet))
        if depth != horizon:
            raise PolicyHorizonMismatch(
                f"explicit tree has depth {depth}, expected {horizon}")
    elif horizon < policy.min_horizon():
        raise PolicyHorizonMismatch(
            f"{policy.kind.value} needs at least {policy.min_horizon()} trials")

    rng = np.random.Generator(np.random.PCG64(config.seed))
    uniforms = rng.random((config.samples, horizon + 1))

    prior = instance.prior
    utilities = np.empty(config.samples)
    for j in range(config.samples):
        row = uniforms[j]
        under_h1 = row[0] < prior
        wealth = query.wealth
        node = tree
        belief = instance.root_belief() if tree is None else None
        for t in range(horizon):
            if node is not None:
                arm = node.arm
            else:
                arm = policy_arm(policy, t, belief)
            if (arm is Arm.X) == under_h1:
                dist = instance.f1
            else:
                dist = instance.f2
            payoff = _inverse_cdf(dist, row[1 + t])
            wealth += payoff
            if node is not None:
                if node.children:
                    node = node.children[instance.index_of(payoff)]
            else:
                belief = posterior_update(belief, arm, payoff, instance)
        utilities[j] = utility(wealth)

    mean = float(np.mean(utilities))
    if config.samples >= 2:
        std_error = float(np.std(utilities, ddof=1) / math.sqrt(config.samples))
    else:
        std_error = 0.0
    return SimResult(mean, std_error, config.samples)
