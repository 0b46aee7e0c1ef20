"""Day-by-day repeated game over a finite agent population.

Each day: stay-home flags and sensitivities are drawn up front in agent-index
order, the daily route equilibrium is computed, karma accounts are settled,
and per-day metrics are recorded.  Runs are deterministic given the scenario
seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .agent import ARC1, ARC2
from .mesoscopic import quantize_population
from .network import ArcCostModel, Scenario, system_optimum
from .pricing import PriceVector
from .wardrop import CONTROLLED, UNCONTROLLED, wardrop_equilibrium

RUN_CSV_COLUMNS = ["day", "x1", "x2", "cost", "cost_opt_ratio", "delta_d",
                   "delta_s", "mean_karma", "regime", "nash_iters"]


@dataclass
class Population:
    """Mutable state of the simulated agents plus the day loop's bookkeeping."""

    scenario: Scenario
    prices: PriceVector
    k: np.ndarray
    k_ref: np.ndarray
    rng: np.random.Generator
    n_clamped_init: int = 0
    day: int = 0
    last_flows: np.ndarray | None = None


@dataclass
class DayRecord:
    day: int
    x1: float
    x2: float
    cost: float
    cost_opt_ratio: float
    delta_d: float | None
    delta_s: float | None
    mean_karma: float
    regime: str
    nash_iters: int


@dataclass
class RunResult:
    """Per-day records plus the run's terminal karma histogram and context."""

    records: list[DayRecord]
    karma_hist: np.ndarray              # counts per karma-deviation cell
    x_star: np.ndarray
    cost_star: float
    prices: PriceVector
    scenario: Scenario
    n_clamped_init: int = 0
    tail_fraction: float = 0.2
    summary: dict = field(default_factory=dict)

    def tail_records(self, fraction: float | None = None) -> list[DayRecord]:
        fraction = self.tail_fraction if fraction is None else fraction
        n_tail = max(1, int(round(fraction * len(self.records))))
        return self.records[-n_tail:]

    def compute_summary(self) -> dict:
        tail = self.tail_records()
        delta_d = [r.delta_d for r in tail if r.delta_d is not None]
        delta_s = [r.delta_s for r in tail if r.delta_s is not None]
        self.summary = {
            "days": len(self.records),
            "tail_days": len(tail),
            "x_star": [float(v) for v in self.x_star],
            "cost_star": self.cost_star,
            "prices": {"p1": self.prices.p1, "r2": self.prices.r2},
            "seed": self.scenario.seed,
            "n_agents": self.scenario.n_agents,
            "n_clamped_init": self.n_clamped_init,
            "tail_mean_flows": [float(np.mean([r.x1 for r in tail])),
                                float(np.mean([r.x2 for r in tail]))],
            "tail_mean_cost": float(np.mean([r.cost for r in tail])),
            "tail_mean_cost_opt_ratio": float(np.mean(
                [r.cost_opt_ratio for r in tail])),
            "tail_mean_delta_d": float(np.mean(delta_d)) if delta_d else None,
            "tail_mean_delta_s": float(np.mean(delta_s)) if delta_s else None,
            "final_mean_karma": self.records[-1].mean_karma,
            "uncontrolled_days": sum(r.regime == UNCONTROLLED
                                     for r in self.records),
            "max_nash_iters": max(r.nash_iters for r in self.records),
        }
        return self.summary

    def write_run_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(RUN_CSV_COLUMNS)
            for r in self.records:
                writer.writerow([
                    r.day, repr(r.x1), repr(r.x2), repr(r.cost),
                    repr(r.cost_opt_ratio),
                    "" if r.delta_d is None else repr(r.delta_d),
                    "" if r.delta_s is None else repr(r.delta_s),
                    repr(r.mean_karma), r.regime, r.nash_iters,
                ])

    def write_karma_hist_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "count"])
            for i, count in enumerate(self.karma_hist):
                writer.writerow([i + 1, int(count)])


def init_population(scenario: Scenario, prices: PriceVector,
                    integer_karma: bool = False) -> Population:
    """Draw initial reference levels and karma balances.

    k_ref is drawn first, then k(0); any k(0) below the agent's feasibility
    floor k_inf is clamped up to it (the clamp count is kept on the returned
    population).  ``integer_karma`` floors the draws onto the integer lattice
    used by the quantized chain.
    """
    rng = np.random.default_rng(scenario.seed)
    m = scenario.n_agents
    k_ref = rng.uniform(*scenario.k_ref_init, m)
    k = rng.uniform(*scenario.k_init, m)
    if integer_karma:
        k_ref = np.floor(k_ref)
        k = np.floor(k)
    k_inf = np.maximum(0.0, k_ref - (scenario.horizon + 1) * prices.r2)
    n_clamped = int(np.count_nonzero(k < k_inf))
    k = np.maximum(k, k_inf)
    return Population(scenario=scenario, prices=prices, k=k, k_ref=k_ref,
                      rng=rng, n_clamped_init=n_clamped)


def compute_metrics(choices, s, x, k, model: ArcCostModel, s_bar: float,
                    n_agents: int | None = None):
    """Per-day metrics: (delta_d, delta_s, mean_karma, cost).

    delta_d compares the realized sensitivity-weighted discomfort against a
    sensitivity-unaware random assignment to the same flows:
    sum_i (s_i - s_bar) d_ji / sum_i s_bar d_ji over travelers.  delta_s is
    the relative deviation of the travelers' mean sensitivity,
    sum_i (s_i - s_bar) / (M s_bar).  Both are None on days nobody travels.
    """
    choices = np.asarray(choices)
    s = np.asarray(s, dtype=float)
    k = np.asarray(k, dtype=float)
    m = n_agents if n_agents is not None else choices.size
    cost = model.societal_cost(x)
    mean_karma = float(k.mean())
    travel = choices != 0
    if not np.any(travel):
        return None, None, mean_karma, cost
    d = model.discomfort(x)
    d_taken = np.where(choices[travel] == ARC1, d[0], d[1])
    s_t = s[travel]
    delta_d = float(((s_t - s_bar) * d_taken).sum() / (s_bar * d_taken).sum())
    delta_s = float((s_t - s_bar).sum() / (m * s_bar))
    return delta_d, delta_s, mean_karma, cost


def simulate_day(pop: Population, model: ArcCostModel, p: PriceVector,
                 cost_star: float | None = None) -> DayRecord:
    """Advance the population by one day and record its metrics."""
    sc = pop.scenario
    m = sc.n_agents
    stay = pop.rng.random(m) < sc.p_home
    s = sc.sensitivity.sample(pop.rng, m)  # draws for all agents; travelers use theirs
    traveling = ~stay
    s_bar = sc.sensitivity.s_bar

    if pop.last_flows is None:
        pop.last_flows = system_optimum(model, sc.p_go) if sc.p_go > 0 \
            else np.zeros(2)
    if not np.any(traveling):
        x = np.zeros(2)
        choices = np.zeros(m, dtype=np.int8)
        regime, iters = CONTROLLED, 0
    else:
        result = wardrop_equilibrium(pop.k, pop.k_ref, s, traveling, model, p,
                                     sc.horizon, s_bar, x_init=pop.last_flows)
        x, choices, regime, iters = (result.flows, result.choices,
                                     result.regime, result.iterations)
        pop.last_flows = x
    pop.k = np.where(choices == ARC1, pop.k - p.p1,
                     np.where(choices == ARC2, pop.k + p.r2, pop.k))

    delta_d, delta_s, mean_karma, cost = compute_metrics(
        choices, s, x, pop.k, model, s_bar, n_agents=m)
    ratio = cost / cost_star if cost_star else float("nan")
    record = DayRecord(day=pop.day, x1=float(x[0]), x2=float(x[1]), cost=cost,
                       cost_opt_ratio=ratio, delta_d=delta_d, delta_s=delta_s,
                       mean_karma=mean_karma, regime=regime, nash_iters=iters)
    pop.day += 1
    return record


def run_scenario(scenario: Scenario, model: ArcCostModel, p: PriceVector,
                 days: int, integer_karma: bool = False) -> RunResult:
    """Run the repeated game for the given number of days."""
    if days < 1:
        raise ValueError("days must be >= 1")
    pop = init_population(scenario, p, integer_karma=integer_karma)
    if scenario.p_go > 0:
        x_star = system_optimum(model, scenario.p_go)
        cost_star = model.societal_cost(x_star)
    else:
        x_star, cost_star = np.zeros(2), 0.0
    pop.last_flows = x_star.copy()
    records = [simulate_day(pop, model, p, cost_star=cost_star or None)
               for _ in range(days)]
    hist, _ = quantize_population(pop.k, pop.k_ref, p, scenario.horizon)
    result = RunResult(records=records,
                       karma_hist=hist * scenario.n_agents,
                       x_star=x_star, cost_star=cost_star, prices=p,
                       scenario=scenario,
                       n_clamped_init=pop.n_clamped_init)
    result.compute_summary()
    return result
