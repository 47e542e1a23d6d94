"""Block success probability against distance for several block sizes, plus secure radii."""
import argparse
from pathlib import Path

import numpy as np

from phykey import channel as ch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--m", type=int, nargs="+", default=[25, 50, 125])
    ap.add_argument("--out", default="results/coverage.csv")
    args = ap.parse_args()
    model, params = ch.load_config(args.config) if args.config else (ch.DEFAULT_CHAIN, ch.ProtocolParams())
    grid = np.round(np.arange(1.0, 20.0001, 0.05), 4)
    curves = {m: ch.coverage_curve(model, m, grid) for m in args.m}
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(ch.coverage_csv(curves))
    for m in args.m:
        p = ch.ProtocolParams(m, params.L, params.R_b, params.T_r, params.Q_B, params.Q_E)
        try:
            bob, eve = ch.secure_radii(model, p)
            print(f"m={m}: Q >= {p.Q_B} up to {bob:.2f} m, Q <= {p.Q_E:g} from {eve:.2f} m")
        except ch.ThresholdUnreachable as exc:
            print(f"m={m}: {exc}")


if __name__ == "__main__":
    main()
