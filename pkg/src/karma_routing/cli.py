"""Command-line front end.

Subcommands:
    run             repeated-game simulation; writes run.csv, karma_hist.csv,
                    summary.json and the resolved config.ini
    analyze-chain   karma-distribution chain: matrix dump, stationary
                    distribution, induced flows and the ratio check
    design-prices   conservation price ratio and its integer rounding
    system-optimum  optimal split of the daily demand

Set KARMA_LOG_LEVEL (DEBUG/INFO/WARNING/...) to control verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig
from .errors import KarmaRoutingError
from .mesoscopic import (build_chain, equilibrium_flows, save_distribution_csv,
                         save_matrix_coo, stationary_distribution,
                         step_distribution)
from .network import balanced_flow, system_optimum
from .pricing import conservation_prices, rationalize_prices
from .presets import PRESETS, apply_preset
from .simulation import run_scenario

log = logging.getLogger("karma_routing")


def _resolve_config(args) -> RunConfig:
    config = RunConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            print(f"error: config file not found: {path}", file=sys.stderr)
            raise SystemExit(2)
        config = RunConfig.from_ini(path)
    if getattr(args, "preset", None):
        config = apply_preset(config, args.preset)
    overrides = {}
    for key in ("days", "seed", "max_price"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if overrides:
        config = replace(config, **overrides)
    return config.validate()


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args) -> int:
    config = _resolve_config(args)
    prices = config.prices()
    out = _out_dir(args)
    log.info("running %d days, M=%d, seed=%d, prices=(%d, -%d)",
             config.days, config.n_agents, config.seed, prices.p1, prices.r2)
    result = run_scenario(config.scenario(), config.model(), prices,
                          config.days)
    result.write_run_csv(out / "run.csv")
    result.write_karma_hist_csv(out / "karma_hist.csv")
    config.to_ini(out / "config.ini")
    summary = dict(result.summary)
    summary["preset"] = config.preset
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    print(f"wrote {out / 'run.csv'}, {out / 'karma_hist.csv'}, "
          f"{out / 'summary.json'}")
    print(f"prices: ({prices.p1}, -{prices.r2});  "
          f"system optimum: ({summary['x_star'][0]:.4f}, "
          f"{summary['x_star'][1]:.4f}), cost {summary['cost_star']:.6f}")
    print(f"tail mean flows: ({summary['tail_mean_flows'][0]:.4f}, "
          f"{summary['tail_mean_flows'][1]:.4f});  "
          f"tail cost ratio: {summary['tail_mean_cost_opt_ratio']:.5f}")
    if summary["tail_mean_delta_d"] is not None:
        print(f"tail mean delta_d: {summary['tail_mean_delta_d'] * 100:.2f}%")
    return 0


def cmd_analyze_chain(args) -> int:
    config = _resolve_config(args)
    prices = config.prices()
    chain = build_chain(prices, config.horizon, config.p_home,
                        config.sensitivity())
    out = _out_dir(args)
    save_matrix_coo(chain, out / "a_matrix.txt")

    if chain.p_home > 0.0:
        dist = stationary_distribution(chain, tol=args.tol)
    elif args.trajectory_only:
        dist = _trajectory_average(chain, out, steps=args.steps)
    else:
        print("error: stationary analysis needs p_home > 0 (the chain can be "
              "periodic at p_home = 0); rerun with --trajectory-only",
              file=sys.stderr)
        return 1
    save_distribution_csv(chain, dist, out / "stationary.csv")

    residual = float(np.abs(step_distribution(chain, dist) - dist).sum())
    flows = equilibrium_flows(chain, dist)
    ratio = float(flows[0] / flows[1]) if flows[1] > 0 else float("nan")
    summary = {
        "prices": {"p1": prices.p1, "r2": prices.r2},
        "horizon": config.horizon,
        "p_home": config.p_home,
        "n_states": chain.n_states,
        "residual_l1": residual,
        "flows": [float(v) for v in flows],
        "flow_ratio": ratio,
        "price_ratio_r2_over_p1": prices.r2 / prices.p1,
        "flow_ratio_error": abs(ratio - prices.r2 / prices.p1),
    }
    with open(out / "chain_summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    print(f"wrote {out / 'a_matrix.txt'}, {out / 'stationary.csv'}, "
          f"{out / 'chain_summary.json'}")
    print(f"N = {chain.n_states}; flows = ({flows[0]:.6f}, {flows[1]:.6f}); "
          f"x1/x2 = {ratio:.9f} vs r2/p1 = {prices.r2 / prices.p1:.9f}; "
          f"residual = {residual:.2e}")
    return 0


def _trajectory_average(chain, out: Path, steps: int) -> np.ndarray:
    """Step from uniform, logging per-step flows; return a period average.

    Averaging the final p1+r2 iterates removes the possible limit cycle of
    the p_home = 0 chain.
    """
    dist = np.full(chain.n_states, 1.0 / chain.n_states)
    period = chain.prices.total
    tail = []
    with open(out / "trajectory.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("step,x1,x2,residual_l1\n")
        for step in range(steps):
            nxt = step_distribution(chain, dist)
            flows = equilibrium_flows(chain, dist)
            fh.write(f"{step},{float(flows[0])!r},{float(flows[1])!r},"
                     f"{float(np.abs(nxt - dist).sum())!r}\n")
            dist = nxt
            if step >= steps - period:
                tail.append(dist)
    avg = np.mean(tail, axis=0)
    return avg / avg.sum()


def cmd_design_prices(args) -> int:
    config = _resolve_config(args)
    model = config.model()
    p_go = 1.0 - config.p_home
    x_star = system_optimum(model, p_go, tol=args.tol)
    ratio = conservation_prices(x_star)
    prices = rationalize_prices(ratio, config.max_price, config.horizon)
    print(f"system optimum: ({x_star[0]:.6f}, {x_star[1]:.6f})  "
          f"(demand {p_go})")
    print(f"conserving ratio p1/r2 = x2*/x1* = {ratio[0] / ratio[1]:.9f}")
    print(f"integer prices (max_price {config.max_price}): "
          f"({prices.p1}, -{prices.r2})")
    print(f"feasibility band for horizon {config.horizon}: r2/p1 = "
          f"{prices.r2 / prices.p1:.4f} in [{1 / config.horizon:.4f}, "
          f"{config.horizon}]")
    return 0


def cmd_system_optimum(args) -> int:
    config = _resolve_config(args)
    model = config.model()
    p_go = args.p_go if args.p_go is not None else 1.0 - config.p_home
    x_star = system_optimum(model, p_go, tol=args.tol)
    cost = model.societal_cost(x_star)
    print(f"demand: {p_go}")
    print(f"system optimum: ({x_star[0]:.6f}, {x_star[1]:.6f})")
    print(f"optimal societal cost: {cost:.9f}")
    x_bal = balanced_flow(model, p_go)
    if x_bal is None:
        print("balanced flow: none (d1 < d2 over the whole range)")
    else:
        print(f"balanced flow: ({x_bal[0]:.6f}, {x_bal[1]:.6f})")
    return 0


def _add_common(parser: argparse.ArgumentParser, out_default: str | None = None,
                tol_default: float | None = None):
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="built-in scenario preset")
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--seed", type=int, help="RNG seed override")
    parser.add_argument("--max-price", dest="max_price", type=int,
                        help="price rounding scale for designed prices")
    if tol_default is not None:
        parser.add_argument("--tol", type=float, default=tol_default,
                            help="solver tolerance")
    if out_default is not None:
        parser.add_argument("--out", default=out_default,
                            help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="karma-routing",
        description="Artificial-currency routing: price design, chain "
                    "analysis, and repeated-game simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate the repeated game")
    _add_common(p_run, out_default="out")
    p_run.add_argument("--days", type=int, help="number of simulated days")
    p_run.set_defaults(func=cmd_run)

    p_chain = sub.add_parser("analyze-chain",
                             help="karma-distribution chain analysis")
    _add_common(p_chain, out_default="out", tol_default=1e-12)
    p_chain.add_argument("--trajectory-only", action="store_true",
                         help="allow p_home = 0 by stepping the chain "
                              "instead of solving for the fixed point")
    p_chain.add_argument("--steps", type=int, default=500,
                         help="steps for --trajectory-only")
    p_chain.set_defaults(func=cmd_analyze_chain)

    p_prices = sub.add_parser("design-prices",
                              help="conservation prices and their rounding")
    _add_common(p_prices, tol_default=1e-6)
    p_prices.set_defaults(func=cmd_design_prices)

    p_opt = sub.add_parser("system-optimum", help="optimal demand split")
    _add_common(p_opt, tol_default=1e-6)
    p_opt.add_argument("--p-go", dest="p_go", type=float,
                       help="total travel demand (defaults to 1 - p_home)")
    p_opt.set_defaults(func=cmd_system_optimum)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("KARMA_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:  # config-resolution failures carry exit code 2
        return exc.code if isinstance(exc.code, int) else 2
    except (KarmaRoutingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
