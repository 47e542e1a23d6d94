"""Analytic and simulated key bootstrap time, and eavesdropper leakage, at a few distances."""
import argparse

from phykey import channel as ch
from phykey import protocol as pr


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--distances", type=float, nargs="+", default=[8.0, 8.5, 8.77])
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--rng-seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    params = ch.ProtocolParams()
    print(f"T_B at Q=0.1: {ch.bootstrap_time(params, 0.1):.4f} s")
    for d in args.distances:
        res = pr.simulate_bootstrap(params, ch.DEFAULT_CHAIN, d, trials=args.trials, rng_seed=args.rng_seed,
                                    jobs=args.jobs)
        print(f"d={d} m: Q={res.q_analytic:.4g}, T_B analytic {res.t_b_analytic:.3f} s, "
              f"simulated {res.t_b_hat:.3f} +- {res.t_b_se:.3f} s")
    leak = pr.leakage_report(params, ch.DEFAULT_CHAIN, 10.5, trials=args.trials, rng_seed=args.rng_seed,
                             jobs=args.jobs)
    print(f"eavesdropper at 10.5 m: {leak.failed}/{leak.trials} failed decodes, payload error fraction "
          f"{leak.mean:.4f} +- {leak.std:.4f}, alarm={leak.alarm}")


if __name__ == "__main__":
    main()
