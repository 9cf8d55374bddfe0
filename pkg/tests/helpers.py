"""Shared instances and grids used across the test modules."""

from twoarm import BanditInstance, FiniteDistribution, Identity, Negated

XI_GRID = tuple(round(i / 10, 1) for i in range(11))


def bern(alpha, beta, prior):
    return BanditInstance.bernoulli(alpha, beta, prior)


def three_letter(prior):
    """Stochastically ordered pair on {0, 1, 2}; favors the f1 arm."""
    f1 = FiniteDistribution(((0.0, 0.2), (1.0, 0.3), (2.0, 0.5)))
    f2 = FiniteDistribution(((0.0, 0.5), (1.0, 0.3), (2.0, 0.2)))
    return BanditInstance(f1, f2, prior)


def disjoint_support(prior):
    """Equal means, different supports: f1 on {0, 2}, f2 a point mass at 1."""
    f1 = FiniteDistribution(((0.0, 0.5), (2.0, 0.5)))
    f2 = FiniteDistribution(((1.0, 1.0),))
    return BanditInstance(f1, f2, prior)


IDENTITY = Identity()
NEG_IDENTITY = Negated(Identity())
