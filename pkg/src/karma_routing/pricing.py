"""Steady-state price design for the two-route network.

Karma is conserved in steady state only if p^T x* = 0, i.e. the toll/reward
pair must satisfy p1 / r2 = x2* / x1*.  That fixes prices up to a common
scale; `rationalize_prices` turns the real ratio into the integer pair the
chain and the simulator work with.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import DegenerateOptimumError, InfeasibleHorizonError


@dataclass(frozen=True)
class PriceVector:
    """Integer toll p1 on the fast route and reward r2 = -p2 on the slow one."""

    p1: int
    r2: int

    def __post_init__(self):
        if int(self.p1) != self.p1 or int(self.r2) != self.r2:
            raise ValueError("prices must be integers")
        if self.p1 < 1 or self.r2 < 1:
            raise ValueError("p1 and r2 must be >= 1")

    @property
    def total(self) -> int:
        """p1 + r2, the karma swing of one fast/slow round trip."""
        return self.p1 + self.r2

    @property
    def signed(self) -> tuple[int, int]:
        """(p1, p2) with p2 = -r2, matching the charge convention k -= p_j."""
        return (self.p1, -self.r2)

    def is_coprime(self) -> bool:
        return gcd(self.p1, self.r2) == 1

    def reduced(self) -> "PriceVector":
        """Canonical co-prime representative of the same price ratio."""
        g = gcd(self.p1, self.r2)
        return PriceVector(self.p1 // g, self.r2 // g)

    def feasible_for_horizon(self, horizon: int) -> bool:
        """Whether r2/p1 lies in [1/T, T], so karma-neutral plans exist."""
        ratio = self.r2 / self.p1
        return 1.0 / horizon <= ratio <= horizon


def conservation_prices(x_star) -> tuple[float, float]:
    """Real (p1, r2) pair with p^T x* = 0, normalized so r2 = 1.

    Unique up to scaling; raises DegenerateOptimumError if either component
    of x* is non-positive (no finite conserving ratio exists).
    """
    x = np.asarray(x_star, dtype=float)
    if x.shape != (2,):
        raise ValueError("x_star must be a pair")
    if x[0] <= 0.0 or x[1] <= 0.0:
        raise DegenerateOptimumError(
            f"target flow {x.tolist()} has a non-positive component; "
            "conserving prices need x* > 0 on both routes"
        )
    return (float(x[1] / x[0]), 1.0)


def rationalize_prices(ratio: tuple[float, float], max_price: int = 20,
                       horizon: int | None = None) -> PriceVector:
    """Integer price pair approximating the conserving ratio.

    The larger coordinate is pinned to ``max_price`` and the other is rounded,
    which is how the reference scenarios were priced; the result is reduced to
    co-prime form only when the rounding is exact (the ratio, and hence the
    dynamics, are invariant under common scaling).  With ``horizon`` given,
    raises InfeasibleHorizonError unless r2/p1 lies in [1/T, T].
    """
    if max_price < 2:
        raise ValueError("max_price must be >= 2")
    rho = ratio[0] / ratio[1]  # target p1/r2 = x2*/x1*
    if rho <= 0:
        raise ValueError("price ratio must be positive")
    if rho <= 1.0:
        pair = PriceVector(max(1, round(max_price * rho)), max_price)
    else:
        pair = PriceVector(max_price, max(1, round(max_price / rho)))
    if pair.p1 / pair.r2 == rho:
        pair = pair.reduced()
    if horizon is not None and not pair.feasible_for_horizon(horizon):
        raise InfeasibleHorizonError(
            f"prices ({pair.p1}, -{pair.r2}) violate the feasibility band "
            f"r2/p1 in [1/{horizon}, {horizon}]"
        )
    return pair


def best_coprime_ratio(ratio: tuple[float, float], max_price: int = 20) -> PriceVector:
    """Co-prime (p1, r2) with both <= max_price minimizing |p1/r2 - target|.

    Exhaustive search; ties break toward the smaller max(p1, r2).  This is
    the canonical best rational approximation of the conserving ratio and
    serves as the cross-check for `rationalize_prices`.
    """
    if max_price < 1:
        raise ValueError("max_price must be >= 1")
    rho = ratio[0] / ratio[1]
    best = None
    best_err = np.inf
    for r2 in range(1, max_price + 1):
        for p1 in range(1, max_price + 1):
            if gcd(p1, r2) != 1:
                continue
            err = abs(p1 / r2 - rho)
            if err < best_err - 1e-15 or (
                abs(err - best_err) <= 1e-15
                and best is not None
                and max(p1, r2) < max(best.p1, best.r2)
            ):
                best = PriceVector(p1, r2)
                best_err = err
    return best
