"""Burstiness of synthetic traces: independent, Gilbert-Elliott at rising persistence, ideal bursty."""
import argparse

from phykey import burstiness as bu


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--length", type=int, default=100_000)
    ap.add_argument("--rng-seed", type=int, default=0)
    args = ap.parse_args()
    kinds = [bu.IID(0.8)] + [bu.Gilbert(p, p) for p in (0.5, 0.9, 0.99)] + [bu.BurstyIdeal(0.8)]
    for kind in kinds:
        r = bu.beta(bu.generate_trace(kind, args.length, args.rng_seed))
        print(f"{kind}: prr {r.prr:.3f} beta {r.beta:+.4f}")


if __name__ == "__main__":
    main()
