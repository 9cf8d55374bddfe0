"""Core domain types for the mirrored two-armed bandit.

Two experiments X and Y pay off according to a pair of finite-support
distributions. Under the first hypothesis X follows ``f1`` and Y follows
``f2``; under the second the assignment is swapped. The hypothesis is
unknown and carries a prior weight. All types here are immutable and safe
to share across workers; the operations are pure functions.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Union

from .errors import ImpossibleObservation

#: Absolute tolerance for "probabilities sum to one" (sums of <= dozens of doubles).
PROB_SUM_TOL = 1e-12


class Hypothesis(Enum):
    H1 = "H1"
    H2 = "H2"


class Arm(Enum):
    X = "X"
    Y = "Y"

    @property
    def other(self) -> "Arm":
        return Arm.Y if self is Arm.X else Arm.X


@dataclass(frozen=True)
class FiniteDistribution:
    """A finite-support payoff law, stored as (value, probability) pairs.

    Pairs may be given in any order; they are canonicalized to strictly
    increasing values. Every probability must be positive and the total
    must be one within ``PROB_SUM_TOL``.
    """

    support: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pairs = tuple(sorted((float(v), float(p)) for v, p in self.support))
        object.__setattr__(self, "support", pairs)
        if not pairs:
            raise ValueError("support must be nonempty")
        values = [v for v, _ in pairs]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("support values must be strictly increasing (distinct)")
        if any(p <= 0.0 for _, p in pairs):
            raise ValueError("all probabilities must be positive")
        total = sum(p for _, p in pairs)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def bernoulli(cls, p: float) -> "FiniteDistribution":
        """Law of a {0,1}-valued payoff with success probability ``p``."""
        if not 0.0 <= p <= 1.0:
            raise ValueError("bernoulli parameter must lie in [0, 1]")
        if p == 0.0:
            return cls(((0.0, 1.0),))
        if p == 1.0:
            return cls(((1.0, 1.0),))
        return cls(((0.0, 1.0 - p), (1.0, p)))

    @classmethod
    def point(cls, value: float) -> "FiniteDistribution":
        return cls(((value, 1.0),))

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.support)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.support)

    @cached_property
    def _by_value(self) -> dict[float, float]:
        return {v: p for v, p in self.support}

    def prob_of(self, value: float) -> float:
        """Mass at ``value``; zero for values outside the support."""
        return self._by_value.get(value, 0.0)

    def mean(self) -> float:
        return sum(v * p for v, p in self.support)


@dataclass(frozen=True)
class Belief:
    """Unnormalized nonnegative weight pair on the two hypotheses.

    The posterior probability of the first hypothesis is
    ``w1 / (w1 + w2)``; keeping the pair (rather than the ratio alone)
    lets updates renormalize at every step without losing the exact ratio.
    """

    w1: float
    w2: float

    def __post_init__(self):
        if self.w1 < 0.0 or self.w2 < 0.0:
            raise ValueError("belief weights must be nonnegative")
        if self.w1 + self.w2 <= 0.0:
            raise ValueError("belief weights must not both be zero")

    @property
    def xi(self) -> float:
        """Posterior probability of the first hypothesis."""
        return self.w1 / (self.w1 + self.w2)

    @classmethod
    def from_prior(cls, xi0: float) -> "Belief":
        if not 0.0 <= xi0 <= 1.0:
            raise ValueError("prior must lie in [0, 1]")
        return cls(xi0, 1.0 - xi0)

    def normalized(self) -> "Belief":
        s = self.w1 + self.w2
        return Belief(self.w1 / s, self.w2 / s)


@dataclass(frozen=True)
class BanditInstance:
    """A concrete bandit: distribution pair plus the prior on hypothesis one.

    The two distributions share a value alphabet (the sorted union of their
    supports); a value carried by only one of them has zero mass in the
    other, which is the only place zero masses appear.
    """

    f1: FiniteDistribution
    f2: FiniteDistribution
    prior: float

    def __post_init__(self):
        if not 0.0 <= self.prior <= 1.0:
            raise ValueError("prior must lie in [0, 1]")

    @classmethod
    def bernoulli(cls, alpha: float, beta: float, prior: float) -> "BanditInstance":
        return cls(FiniteDistribution.bernoulli(alpha),
                   FiniteDistribution.bernoulli(beta), prior)

    @cached_property
    def alphabet(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.f1.values) | set(self.f2.values)))

    @cached_property
    def _index(self) -> dict[float, int]:
        return {v: i for i, v in enumerate(self.alphabet)}

    @cached_property
    def mass1(self) -> tuple[float, ...]:
        """f1 masses aligned to the alphabet (zeros where absent)."""
        return tuple(self.f1.prob_of(v) for v in self.alphabet)

    @cached_property
    def mass2(self) -> tuple[float, ...]:
        return tuple(self.f2.prob_of(v) for v in self.alphabet)

    def index_of(self, outcome: float) -> int:
        try:
            return self._index[outcome]
        except KeyError:
            raise ImpossibleObservation(
                f"outcome {outcome!r} is not in the value alphabet") from None

    def with_prior(self, prior: float) -> "BanditInstance":
        return replace(self, prior=prior)

    def root_belief(self) -> Belief:
        return Belief.from_prior(self.prior)


# ---------------------------------------------------------------------------
# Utility functions: a closed, serializable set.

@dataclass(frozen=True)
class Identity:
    def __call__(self, wealth: float) -> float:
        return wealth


@dataclass(frozen=True)
class IndicatorThreshold:
    """1 at wealth >= threshold, else 0."""

    threshold: float

    def __call__(self, wealth: float) -> float:
        return 1.0 if wealth >= self.threshold else 0.0


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolation between breakpoints, constant outside them.

    Breakpoints are (x, value) pairs with strictly increasing x. A single
    breakpoint yields a constant function.
    """

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if not pts:
            raise ValueError("at least one breakpoint required")
        xs = [x for x, _ in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoint x-values must be strictly increasing")

    @classmethod
    def constant(cls, value: float) -> "PiecewiseLinear":
        return cls(((0.0, value),))

    def __call__(self, wealth: float) -> float:
        pts = self.breakpoints
        if wealth <= pts[0][0]:
            return pts[0][1]
        if wealth >= pts[-1][0]:
            return pts[-1][1]
        i = bisect.bisect_right([x for x, _ in pts], wealth)
        (x0, y0), (x1, y1) = pts[i - 1], pts[i]
        return y0 + (y1 - y0) * (wealth - x0) / (x1 - x0)


@dataclass(frozen=True)
class Negated:
    inner: "UtilityFn"

    def __call__(self, wealth: float) -> float:
        return -self.inner(wealth)


UtilityFn = Union[Identity, IndicatorThreshold, PiecewiseLinear, Negated]


# ---------------------------------------------------------------------------
# Operations.

def posterior_update(belief: Belief, arm: Arm, outcome: float,
                     instance: BanditInstance) -> Belief:
    """Bayes step after pulling ``arm`` and observing ``outcome``.

    Pulling X multiplies the weights by (f1, f2) at the outcome, pulling Y
    by (f2, f1); the result is renormalized to sum to one. Raises
    ImpossibleObservation when the outcome is outside the alphabet or has
    zero posterior mass under both hypotheses.
    """
    i = instance.index_of(outcome)
    if arm is Arm.X:
        a, b = instance.mass1[i], instance.mass2[i]
    else:
        a, b = instance.mass2[i], instance.mass1[i]
    nw1, nw2 = belief.w1 * a, belief.w2 * b
    total = nw1 + nw2
    if total <= 0.0:
        raise ImpossibleObservation(
            f"outcome {outcome!r} has zero probability under the current belief")
    return Belief(nw1 / total, nw2 / total)


def expectation_under(hypothesis: Hypothesis, arm: Arm,
                      g: Callable[[float], float],
                      instance: BanditInstance) -> float:
    """Expectation of g(payoff) for one pull of ``arm`` under ``hypothesis``."""
    if (hypothesis is Hypothesis.H1) == (arm is Arm.X):
        dist = instance.f1
    else:
        dist = instance.f2
    return sum(g(v) * p for v, p in dist.support)


def mixture_outcome_prob(belief: Belief, arm: Arm, outcome: float,
                         instance: BanditInstance) -> float:
    """Predictive probability of ``outcome`` for one pull of ``arm``."""
    i = instance.index_of(outcome)
    xi = belief.xi
    if arm is Arm.X:
        return xi * instance.mass1[i] + (1.0 - xi) * instance.mass2[i]
    return xi * instance.mass2[i] + (1.0 - xi) * instance.mass1[i]
