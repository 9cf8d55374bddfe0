"""Internal belief stepping with hashable memoization keys.

A state is ``(w1, w2, key)`` where the weights are kept normalized to sum
one and ``key`` is hashable and determines the posterior exactly (or up to
a 1e-12 quantization for general alphabets). For two-letter alphabets with
all four masses positive the key is the pair of integer exponents of the
per-letter likelihood-ratio factors accumulated along the path, which is
collision-free for a fixed root prior.
"""

from __future__ import annotations

from typing import Hashable, Optional

from .model import Arm, BanditInstance

State = tuple[float, float, Hashable]

#: Decimal digits kept when quantizing posteriors / wealths for memo keys.
KEY_DIGITS = 12


def wealth_key(wealth: float) -> float:
    return round(wealth, KEY_DIGITS)


class StateStepper:
    """Precomputed per-instance machinery for walking belief states."""

    def __init__(self, instance: BanditInstance):
        self.instance = instance
        self.alphabet = instance.alphabet
        self.m1 = instance.mass1
        self.m2 = instance.mass2
        # Exponent keys need every ratio f1/f2 to be finite and nonzero.
        self.exponent_keys = (
            len(self.alphabet) == 2
            and all(m > 0.0 for m in self.m1)
            and all(m > 0.0 for m in self.m2)
        )

    def root(self) -> State:
        xi = self.instance.prior
        key: Hashable = (0, 0) if self.exponent_keys else round(xi, KEY_DIGITS)
        return (xi, 1.0 - xi, key)

    def step(self, state: State, arm: Arm, outcome_index: int
             ) -> tuple[float, Optional[State]]:
        """Return (predictive probability, successor state).

        The successor is None exactly when the probability is zero, in
        which case no posterior exists.
        """
        w1, w2, key = state
        if arm is Arm.X:
            a, b = self.m1[outcome_index], self.m2[outcome_index]
        else:
            a, b = self.m2[outcome_index], self.m1[outcome_index]
        nw1 = w1 * a
        nw2 = w2 * b
        prob = nw1 + nw2
        if prob <= 0.0:
            return 0.0, None
        nw1 /= prob
        nw2 /= prob
        if self.exponent_keys:
            delta = 1 if arm is Arm.X else -1
            e0, e1 = key  # type: ignore[misc]
            nkey: Hashable = (e0 + delta, e1) if outcome_index == 0 else (e0, e1 + delta)
        else:
            nkey = round(nw1, KEY_DIGITS)
        return prob, (nw1, nw2, nkey)
