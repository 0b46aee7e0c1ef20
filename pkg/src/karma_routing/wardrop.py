"""Daily route equilibrium of a finite population.

The equilibrium flow is the fixed point of the aggregate best response: each
traveler picks a route assuming today's flows, and the assumed flows must
reproduce themselves.  Because the individual rule depends on flows only
through the sign of d1 - d2, the fixed-point iteration settles in one or two
steps whenever the assumed ordering is confirmed.  When the population is
wealthy enough that the aggregate response overloads the fast route, the
equilibrium instead sits at the balanced flow (equal discomforts), realized
by splitting the indifferent agents deterministically by agent index.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import floor

import numpy as np

from .agent import ARC1, ARC2, STAY, D1_LESS, best_response_batch, discomfort_order
from .errors import ConvergenceError
from .network import ArcCostModel, balanced_flow
from .pricing import PriceVector

CONTROLLED = "controlled"      # best-response fixed point with d1 < d2
UNCONTROLLED = "uncontrolled"  # balanced-flow equilibrium (equal discomforts)


@dataclass
class WardropResult:
    flows: np.ndarray        # population shares (x1, x2)
    choices: np.ndarray      # per-agent STAY / ARC1 / ARC2
    regime: str
    iterations: int


def _flows_of(choices: np.ndarray) -> np.ndarray:
    m = choices.size
    return np.array([
        np.count_nonzero(choices == ARC1) / m,
        np.count_nonzero(choices == ARC2) / m,
    ])


def aggregate_best_response(k, k_ref, s, traveling, x_assumed,
                            model: ArcCostModel, p: PriceVector, horizon: int,
                            s_bar: float) -> tuple[np.ndarray, np.ndarray]:
    """One best-response sweep against assumed flows.

    Classifies the discomfort ordering at ``x_assumed``, applies the
    closed-form rule to every traveler, and returns (flows, choices) with
    flows as empirical population shares.
    """
    k = np.asarray(k, dtype=float)
    traveling = np.asarray(traveling, dtype=bool)
    order = discomfort_order(model.discomfort(x_assumed))
    choices = np.full(k.shape, STAY, dtype=np.int8)
    idx = np.flatnonzero(traveling)
    if idx.size:
        choices[idx] = best_response_batch(
            k[idx], np.asarray(k_ref, dtype=float)[idx],
            np.asarray(s, dtype=float)[idx], s_bar, p, horizon, order,
        )
    return _flows_of(choices), choices


def _balanced_split(k, k_ref, traveling, target_x1: float, p: PriceVector,
                    horizon: int) -> tuple[np.ndarray, bool]:
    """Assignment realizing the balanced flow, plus a feasibility flag.

    Travelers below their k_poor breakpoint can only take the slow route;
    the remaining (indifferent) travelers are sent to the fast route in
    agent-index order up to the target share, the rest go slow.  The fast
    count rounds down so the fast route never ends up the more congested
    one.  If there are too few indifferent travelers to reach the target,
    the equal-discomfort equilibrium does not exist and the flag is False.
    """
    m = k.size
    t, p1, r2 = horizon, p.p1, p.r2
    k_poor = np.maximum(float(p1), np.asarray(k_ref, float) + p1 - t * r2)
    choices = np.full(m, STAY, dtype=np.int8)
    choices[traveling] = ARC2
    indifferent = np.flatnonzero(traveling & (np.asarray(k, float) >= k_poor))
    n_fast = floor(target_x1 * m + 1e-9)
    feasible = n_fast <= indifferent.size
    choices[indifferent[:n_fast]] = ARC1
    return choices, feasible


def wardrop_equilibrium(k, k_ref, s, traveling, model: ArcCostModel,
                        p: PriceVector, horizon: int, s_bar: float,
                        x_init=None, tol: float = 1e-9, max_iter: int = 50,
                        damping: float = 1.0) -> WardropResult:
    """Daily equilibrium flows and per-agent assignments.

    Iterates the aggregate best response from ``x_init`` (previous day's
    flows, or the system optimum on day 0) until the flow update is below
    ``tol``.  If an iterate enters the d1 >= d2 regime the equilibrium is the
    balanced flow of today's realized demand: forced-slow agents are assigned
    first and the indifferent ones are split to meet it.  ``damping`` in
    (0, 1] blends successive iterates (1 = undamped).
    """
    k = np.asarray(k, dtype=float)
    k_ref = np.asarray(k_ref, dtype=float)
    s = np.asarray(s, dtype=float)
    traveling = np.asarray(traveling, dtype=bool)
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    m = k.size
    demand = traveling.sum() / m
    if demand == 0.0:
        return WardropResult(np.zeros(2), np.full(m, STAY, dtype=np.int8),
                             CONTROLLED, 0)
    prev = np.asarray(x_init, dtype=float) if x_init is not None \
        else np.array([0.0, demand])

    for iteration in range(1, max_iter + 1):
        order = discomfort_order(model.discomfort(prev))
        if order != D1_LESS:
            x_bal = balanced_flow(model, demand, tol=1e-9)
            if x_bal is not None:
                choices, feasible = _balanced_split(
                    k, k_ref, traveling, float(x_bal[0]), p, horizon)
                if feasible:
                    return WardropResult(_flows_of(choices), choices,
                                         UNCONTROLLED, iteration)
            # no crossing, or too few solvent travelers to fill up to it:
            # keep iterating with this ordering's rule instead
        flows, choices = aggregate_best_response(
            k, k_ref, s, traveling, prev, model, p, horizon, s_bar)
        nxt = prev + damping * (flows - prev)
        if np.abs(nxt - prev).max() <= tol:
            return WardropResult(flows, choices, CONTROLLED, iteration)
        prev = nxt
    raise ConvergenceError(
        f"no equilibrium within {max_iter} iterations; "
        f"last iterates {prev.tolist()} -> {nxt.tolist()}"
    )
