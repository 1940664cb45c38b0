"""Monte Carlo: simulate Goel-Okumoto data, group, fit the ordered model, and
summarize how far b_hat lands from the generating b.

    python scripts/recovery_study.py --a 25 --b 1e-4 --expected 20 --order 4 --seeds 200
"""

import argparse

import numpy as np

from relimon import GoParams, SimConfig, fit, group_by_order, simulate_nhpp
from relimon.mle import FitError
from relimon.simulate import horizon_for_expected


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--a", type=float, default=25.0)
    ap.add_argument("--b", type=float, default=1e-4)
    ap.add_argument("--expected", type=float, default=20.0, help="m(T) defining the horizon")
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=200)
    args = ap.parse_args()

    params = GoParams(args.a, args.b)
    horizon = horizon_for_expected(params, args.expected)
    ratios, failures = [], 0
    for seed in range(args.seeds):
        series = simulate_nhpp(SimConfig(params, horizon, seed=seed))
        try:
            ratios.append(fit(group_by_order(series, args.order)).b / args.b)
        except (FitError, ValueError, AttributeError):
            failures += 1
    ratios = np.array(ratios)
    print(f"fits: {len(ratios)}  failed/too short: {failures}")
    print(f"b_hat / b: median {np.median(ratios):.3f}  "
          f"quartiles {np.quantile(ratios, 0.25):.3f}..{np.quantile(ratios, 0.75):.3f}")
    print(f"median relative error: {np.median(np.abs(ratios - 1)):.3f}")


if __name__ == "__main__":
    main()
