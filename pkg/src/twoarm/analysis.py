"""Optimality diagnostics: the one-trial dominance condition, the first-pull
value difference and its weight-pair form, myopic-vs-optimal verdicts,
counterexample search, and the indicator-utility sweep for the
maximize-the-win-count question.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .dp import ValueQuery, evaluate_policy, optimal_value
from .errors import EmptyGrid, HorizonTooSmall, InvalidParameters
from .model import (BanditInstance, FiniteDistribution, IndicatorThreshold,
                    UtilityFn)
from .strategies import PolicySpec

#: Absolute slack allowed on algebraic identities (single expressions).
IDENTITY_TOL = 1e-12
#: Absolute slack allowed on myopic-vs-optimal gaps (accumulated rounding).
GAP_TOL = 1e-9


@dataclass(frozen=True)
class Verdict:
    """Outcome of a scan: pass/fail, the smallest slack seen, and where."""

    passed: bool
    margin: float
    witness: Optional[dict] = None

    def to_dict(self) -> dict:
        return {"passed": self.passed, "margin": self.margin,
                "witness": self.witness}


@dataclass(frozen=True)
class DeltaPoint:
    """First-pull value difference at one grid cell."""

    x: float
    xi0: float
    n: int
    delta: float


def _alphabet_union(f1: FiniteDistribution, f2: FiniteDistribution
                    ) -> list[tuple[float, float, float]]:
    values = sorted(set(f1.values) | set(f2.values))
    return [(v, f1.prob_of(v), f2.prob_of(v)) for v in values]


def condition_slack(f1: FiniteDistribution, f2: FiniteDistribution,
                    utility: UtilityFn, u: float) -> float:
    """One-trial dominance slack of the f1-arm at wealth ``u``.

    The slack is sum_s utility(u+s) * (f1(s) - f2(s)). For a {0, 1}
    alphabet the equivalent closed form
    (utility(u+1) - utility(u)) * (mean1 - mean2) is evaluated as well and
    the worse of the two is returned.
    """
    support = _alphabet_union(f1, f2)
    slack = sum(utility(u + v) * (p1 - p2) for v, p1, p2 in support)
    if [v for v, _, _ in support] == [0.0, 1.0]:
        closed = ((utility(u + 1.0) - utility(u))
                  * (f1.prob_of(1.0) - f2.prob_of(1.0)))
        slack = min(slack, closed)
    return slack


def check_condition_I(f1: FiniteDistribution, f2: FiniteDistribution,
                      utility: UtilityFn, u_grid: Sequence[float]) -> Verdict:
    """Check one-trial dominance of the f1-arm at every wealth in ``u_grid``."""
    if not u_grid:
        raise EmptyGrid("u_grid must be nonempty")
    margin = float("inf")
    witness_u = None
    for u in u_grid:
        slack = condition_slack(f1, f2, utility, u)
        if slack < margin:
            margin = slack
            witness_u = u
    return Verdict(margin >= -IDENTITY_TOL, margin, {"u": witness_u})


def delta_direct(instance: BanditInstance, utility: UtilityFn,
                 n: int, x: float) -> float:
    """Value of forcing X first minus forcing Y first (threshold rule after)."""
    ql = ValueQuery(instance, utility, n, x)
    return (evaluate_policy(ql, PolicySpec.l_first())
            - evaluate_policy(ql, PolicySpec.r_first()))


def delta_recursive(instance: BanditInstance, utility: UtilityFn,
                    n: int, x: float) -> float:
    """One-step recurrence for the first-pull difference.

    Sums the horizon-(n-1) differences at the posterior reached by each
    first outcome, restricted to outcomes where the forced first pull
    agrees with the threshold rule, weighted by the predictive outcome
    probabilities of each forced pull.
    """
    if n < 2:
        raise HorizonTooSmall("the recurrence needs a horizon of at least 2")
    xi = instance.prior
    total = 0.0
    for v, p1, p2 in _alphabet_union(instance.f1, instance.f2):
        weight_x = xi * p1 + (1.0 - xi) * p2
        if weight_x > 0.0:
            xi_x = xi * p1 / weight_x
            if xi_x >= 0.5:
                total += weight_x * delta_direct(
                    instance.with_prior(xi_x), utility, n - 1, x + v)
        weight_y = xi * p2 + (1.0 - xi) * p1
        if weight_y > 0.0:
            xi_y = xi * p2 / weight_y
            if xi_y < 0.5:
                total += weight_y * delta_direct(
                    instance.with_prior(xi_y), utility, n - 1, x + v)
    return total


def weighted_delta(f1: FiniteDistribution, f2: FiniteDistribution,
                   utility: UtilityFn, n: int, x: float,
                   t_x: float, t_y: float) -> float:
    """Homogeneous weight-pair form of the first-pull difference.

    Equals (t_x + t_y) times the difference at prior t_x / (t_x + t_y);
    zero when both weights vanish.
    """
    if t_x < 0.0 or t_y < 0.0:
        raise InvalidParameters("weights must be nonnegative")
    total = t_x + t_y
    if total == 0.0:
        return 0.0
    instance = BanditInstance(f1, f2, t_x / total)
    return total * delta_direct(instance, utility, n, x)


def d_monotonicity_scan(f1: FiniteDistribution, f2: FiniteDistribution,
                        utility: UtilityFn, n: int, x: float,
                        tx_grid: Sequence[float], t_y: float) -> Verdict:
    """Scan the weight-pair difference along ``tx_grid`` with ``t_y`` fixed.

    Passes when the values are nondecreasing in the first weight (within
    the identity tolerance), vanish on the diagonal, and flip sign under
    weight exchange. The margin is the worst slack across all three checks.
    """
    if not tx_grid:
        raise EmptyGrid("tx_grid must be nonempty")

    margin = float("inf")
    witness: Optional[dict] = None

    def consider(slack: float, info: dict) -> None:
        nonlocal margin, witness
        if slack < margin:
            margin = slack
            witness = info

    along = [weighted_delta(f1, f2, utility, n, x, t, t_y) for t in tx_grid]
    for t1, d0, d1 in zip(tx_grid[1:], along, along[1:]):
        consider(d1 - d0, {"check": "monotone", "tX": t1, "tY": t_y})
    for t in tx_grid:
        diag = weighted_delta(f1, f2, utility, n, x, t, t)
        consider(-abs(diag), {"check": "diagonal", "tX": t, "tY": t})
    for t, d in zip(tx_grid, along):
        swapped = weighted_delta(f1, f2, utility, n, x, t_y, t)
        consider(-abs(d + swapped), {"check": "antisymmetry", "tX": t, "tY": t_y})

    return Verdict(margin >= -IDENTITY_TOL, margin, witness)


def verify_myopic_optimality(query: ValueQuery) -> Verdict:
    """Gap between the threshold rule's value and the optimum for one query."""
    gap = (evaluate_policy(query, PolicySpec.myopic())
           - optimal_value(query).value)
    passed = gap >= -GAP_TOL
    witness = None if passed else {"xi0": query.instance.prior,
                                   "n": query.horizon, "x": query.wealth}
    return Verdict(passed, gap, witness)


def search_counterexample(f1: FiniteDistribution, f2: FiniteDistribution,
                          utility: UtilityFn, n_max: int,
                          xi_grid: Sequence[float],
                          x_grid: Sequence[float]) -> Optional[dict]:
    """First grid cell where the threshold rule is suboptimal, if any.

    Scans horizons upward and priors downward from one: violations (when
    they exist) surface at horizon 1 with a prior above one half, so this
    order finds them earliest.
    """
    if not xi_grid or not x_grid:
        raise EmptyGrid("xi_grid and x_grid must be nonempty")
    for n in range(1, n_max + 1):
        for xi in sorted(xi_grid, reverse=True):
            for x in x_grid:
                query = ValueQuery(BanditInstance(f1, f2, xi), utility, n, x)
                verdict = verify_myopic_optimality(query)
                if not verdict.passed:
                    return {"xi0": xi, "n": n, "x": x, "gap": verdict.margin}
    return None


def reachable_wealths(f1: FiniteDistribution, f2: FiniteDistribution,
                      x_grid: Iterable[float], depth: int) -> list[float]:
    """All wealths the play can visit: starts plus partial outcome sums."""
    values = sorted(set(f1.values) | set(f2.values))
    frontier = set(float(x) for x in x_grid)
    seen = set(frontier)
    for _ in range(depth):
        frontier = {w + v for w in frontier for v in values} - seen
        seen |= frontier
    return sorted(seen)


def conjecture_cells(alpha: float, beta: float, xi_grid: Sequence[float],
                     n_max: int):
    """Yield (xi0, n, k, gap) for the win-count sweep, in scan order.

    The utility at each cell is the indicator of reaching wealth k from
    zero in n trials, and gap is the threshold rule's value minus the
    optimum.
    """
    if not 1.0 > alpha > beta > 0.0:
        raise InvalidParameters("need 1 > alpha > beta > 0")
    if not xi_grid:
        raise EmptyGrid("xi_grid must be nonempty")
    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            utility = IndicatorThreshold(float(k))
            for xi in xi_grid:
                query = ValueQuery(BanditInstance.bernoulli(alpha, beta, xi),
                                   utility, n, 0.0)
                yield xi, n, k, verify_myopic_optimality(query).margin


def conjecture_harness(alpha: float, beta: float, xi_grid: Sequence[float],
                       n_max: int, tolerance: float = GAP_TOL) -> Verdict:
    """Sweep threshold-count utilities over a success-probability bandit.

    Passes when the worst gap across every horizon up to ``n_max``, every
    target count k in 1..horizon, and every prior stays within
    ``tolerance``; the witness marks the worst cell.
    """
    worst = float("inf")
    witness: Optional[dict] = None
    for xi, n, k, gap in conjecture_cells(alpha, beta, xi_grid, n_max):
        if gap < worst:
            worst = gap
            witness = {"xi0": xi, "n": n, "k": k}
    return Verdict(worst >= -tolerance, worst, witness)
