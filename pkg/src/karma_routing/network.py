"""Two-route parallel network: per-route discomfort, societal cost, and the
central operator's optimal split.

Flows are expressed as fractions of the whole population per day, so a full
daily assignment satisfies ``x1 + x2 = demand`` with demand <= 1.  Route
discomfort follows the standard volume-delay form
``d_j(x) = d0_j * (1 + alpha * (x / kappa_j)**beta)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .sensitivity import SensitivitySpec

SOCIETAL_DISCOMFORT = "discomfort"  # c(x) = d(x): cost is the sum of user costs
SOCIETAL_FLOW = "flow"              # c(x) = x:    cost is quadratic in flow

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ArcCostModel:
    """Per-route volume-delay parameters and the societal-cost family."""

    d0: tuple[float, float] = (1.0, 2.0)
    kappa: tuple[float, float] = (0.5, 2.0 / 3.0)
    alpha: float = 0.15
    beta: float = 4.0
    societal_cost_kind: str = SOCIETAL_DISCOMFORT

    def __post_init__(self):
        if len(self.d0) != 2 or len(self.kappa) != 2:
            raise ValueError("d0 and kappa must be pairs (two routes)")
        if min(self.d0) <= 0 or min(self.kappa) <= 0:
            raise ValueError("d0 and kappa must be positive")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        if self.societal_cost_kind not in (SOCIETAL_DISCOMFORT, SOCIETAL_FLOW):
            raise ValueError(f"unknown societal cost kind: {self.societal_cost_kind!r}")

    def discomfort(self, x) -> np.ndarray:
        """Per-route discomfort d(x) at the flow pair x."""
        x = as_flow(x)
        d0 = np.asarray(self.d0)
        kap = np.asarray(self.kappa)
        return d0 * (1.0 + self.alpha * (x / kap) ** self.beta)

    def societal_cost(self, x) -> float:
        """Aggregate societal cost c(x)^T x."""
        x = as_flow(x)
        if self.societal_cost_kind == SOCIETAL_DISCOMFORT:
            return float(self.discomfort(x) @ x)
        return float(x @ x)


@dataclass(frozen=True)
class Scenario:
    """Population and horizon parameters for a repeated-game run."""

    p_home: float
    horizon: int
    n_agents: int
    sensitivity: SensitivitySpec
    k_init: tuple[float, float]
    k_ref_init: tuple[float, float]
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_home <= 1.0:
            raise ValueError("p_home must lie in [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be a positive integer")
        if self.n_agents < 1:
            raise ValueError("n_agents must be a positive integer")
        for lo, hi in (self.k_init, self.k_ref_init):
            if lo < 0 or hi < lo:
                raise ValueError("karma init ranges must satisfy 0 <= low <= high")
        if self.sensitivity.s_bar <= 0:
            raise ValueError("mean sensitivity must be positive")

    @property
    def p_go(self) -> float:
        return 1.0 - self.p_home


def as_flow(x, demand: float | None = None, tol: float = 1e-9) -> np.ndarray:
    """Validate and return a flow pair as a float array.

    With ``demand`` given, also checks conservation |x1 + x2 - demand| <= tol.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise ValueError("flow must be a pair (x1, x2)")
    if np.any(x < -tol) or np.any(x > 1.0 + tol):
        raise ValueError(f"flow components must lie in [0, 1], got {x}")
    if demand is not None and abs(float(x.sum()) - demand) > tol:
        raise ValueError(f"flow {x} does not sum to demand {demand}")
    return x


def _split_objective(model: ArcCostModel, p_go: float):
    d01, d02 = model.d0
    k1, k2 = model.kappa
    a, b = model.alpha, model.beta
    if model.societal_cost_kind == SOCIETAL_DISCOMFORT:
        def g(x1):
            x2 = p_go - x1
            return (d01 * (1 + a * (x1 / k1) ** b) * x1
                    + d02 * (1 + a * (x2 / k2) ** b) * x2)
    else:
        def g(x1):
            x2 = p_go - x1
            return x1 * x1 + x2 * x2
    return g


def system_optimum(model: ArcCostModel, p_go: float, tol: float = 1e-6) -> np.ndarray:
    """Minimize c(x)^T x over splits of the total demand p_go.

    Golden-section search on x1 in [0, p_go], refined by a local grid sweep
    so flat stretches of the objective cannot hide a better split.  The
    returned pair conserves demand exactly by construction.
    """
    if not 0.0 < p_go <= 1.0:
        raise ValueError("p_go must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    g = _split_objective(model, p_go)

    lo, hi = 0.0, p_go
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    gc, gd = g(c), g(d)
    max_iter = int(np.ceil(np.log(max(tol / p_go, 1e-300)) / np.log(_GOLDEN))) + 4
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if gc < gd:
            hi, d, gd = d, c, gc
            c = hi - _GOLDEN * (hi - lo)
            gc = g(c)
        else:
            lo, c, gc = c, d, gd
            d = lo + _GOLDEN * (hi - lo)
            gd = g(d)
    else:
        raise ConvergenceError("golden-section search failed to bracket the optimum")

    # local sweep around the bracket midpoint guards against flat regions
    center = 0.5 * (lo + hi)
    grid = np.clip(center + tol * np.arange(-5, 6), 0.0, p_go)
    vals = [g(t) for t in grid]
    x1 = float(grid[int(np.argmin(vals))])
    return np.array([x1, p_go - x1])


def balanced_flow(model: ArcCostModel, p_go: float, tol: float = 1e-6) -> np.ndarray | None:
    """Split of p_go where both routes have equal discomfort, or None.

    Bisection on h(x1) = d1(x1) - d2(p_go - x1), which is non-decreasing for
    monotone costs; stops once |d1 - d2| <= tol at the midpoint.  Returns
    None when d1 < d2 over the whole range (no crossing), the regime where
    pricing alone dictates the split.
    """
    if not 0.0 < p_go <= 1.0:
        raise ValueError("p_go must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def h(x1):
        d = model.discomfort([x1, p_go - x1])
        return float(d[0] - d[1])

    lo, hi = 0.0, p_go
    h_lo, h_hi = h(lo), h(hi)
    if h_hi < 0.0:
        return None  # cheap route stays cheaper even fully loaded
    if h_lo >= 0.0:
        return None  # route 1 never becomes the cheaper one
    mid = 0.5 * (lo + hi)
    h_mid = h(mid)
    while abs(h_mid) > tol and hi - lo > 1e-14:
        if h_mid < 0.0:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        h_mid = h(mid)
    return np.array([mid, p_go - mid])
