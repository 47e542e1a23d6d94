"""Command-line entry point: ``phykey <subcommand> ...``.

Every stochastic subcommand writes its replay parameters (including
``rng_seed``) as a ``#`` comment above the CSV header row.  Output never
depends on ``--jobs``.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import avalanche, burstiness, channel, fileio, protocol
from .scrambler import VARIANTS, get_variant

log = logging.getLogger("phykey")

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4

GNUPLOT = {
    "propagate": "set datafile separator ','\nset key off\nset xlabel '{x}'\nset ylabel '{y}'\n"
                 "plot '{csv}' every ::1 using 1:2 with {style}\npause -1\n",
    "coverage": "set datafile separator ','\nset logscale y\nset xlabel 'distance [m]'\nset ylabel 'Q'\n"
                "plot for [m in '{ms}'] '{csv}' every ::1 using ($1==m ? $2 : 1/0):3 with lines title 'm='.m\n"
                "pause -1\n",
}


def _emit(args, text):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


def _gnuplot(args, kind, **fmt):
    if not args.gnuplot:
        return
    if args.out in (None, "-"):
        raise ValueError("--gnuplot needs --out")
    Path(args.out).with_suffix(".gp").write_text(GNUPLOT[kind].format(csv=args.out, **fmt))


def _replay(args, keys):
    return "# phykey " + args.command + " " + " ".join(f"{k}={getattr(args, k)}" for k in keys) + "\n"


def _seed_bits(text):
    return None if text is None else [int(c) for c in text]


def cmd_scramble(args):
    variant = get_variant(args.variant, _seed_bits(args.seed))
    data = Path(args.input).read_bytes()
    Path(args.output).write_bytes(fileio.scramble_bytes(data, variant))


def cmd_descramble(args):
    data = Path(args.input).read_bytes()
    Path(args.output).write_bytes(fileio.descramble_bytes(data))


def cmd_propagate(args):
    variant = get_variant(args.variant)
    if args.uniformity:
        res = avalanche.uniformity_test(variant, args.n, args.trials, args.rng_seed, args.jobs, args.errors)
        lines = [_replay(args, ["variant", "n", "errors", "trials", "rng_seed"]),
                 f"# chi2={res.chi2:.3f} dof={res.dof} p_value={res.p_value:.3e}\n", "position,flip_rate\n"]
        lines += [f"{i},{r:.6f}\n" for i, r in enumerate(res.rates)]
        _emit(args, "".join(lines))
        _gnuplot(args, "propagate", x="output position", y="error rate", style="dots")
    elif args.trials:
        hist = avalanche.error_distribution(variant, args.n, args.errors, args.trials, args.rng_seed, args.jobs)
        head = _replay(args, ["variant", "n", "errors", "trials", "rng_seed"])
        head += f"# mean={hist.mean:.4f} std={hist.std:.4f}\n"
        _emit(args, head + hist.to_csv())
        _gnuplot(args, "propagate", x="output errors", y="frequency", style="impulses")
    else:
        curve = avalanche.sweep_single_error(variant, args.n)
        _emit(args, _replay(args, ["variant", "n"]) + curve.to_csv())
        _gnuplot(args, "propagate", x="input error position", y="output errors", style="lines")


def _config(args):
    if args.config:
        model, params = channel.load_config(args.config)
    else:
        model, params = channel.DEFAULT_CHAIN, channel.ProtocolParams()
    if getattr(args, "per", None) is not None:
        model = channel.ChannelModel.direct(args.per)
    if getattr(args, "m", None) and args.command != "coverage":
        params = channel.ProtocolParams(args.m, params.L, params.R_b, params.T_r, params.Q_B, params.Q_E)
    return model, params


def cmd_coverage(args):
    model, params = _config(args)
    ms = args.m or [params.m]
    grid = np.arange(args.d_min, args.d_max + args.d_step / 2, args.d_step)
    curves = {m: channel.coverage_curve(model, m, grid) for m in ms}
    _emit(args, channel.coverage_csv(curves))
    _gnuplot(args, "coverage", ms=" ".join(map(str, ms)))


def _distance(args, model):
    if model.is_chain and args.distance is None:
        raise ValueError("--distance is required for a distance-dependent channel")
    return args.distance


def cmd_bootstrap(args):
    model, params = _config(args)
    d = _distance(args, model)
    variant = get_variant(args.variant)
    log.info("bootstrap params=%s model=%s d=%s rng_seed=%d", params, model, d, args.rng_seed)
    res = protocol.simulate_bootstrap(params, model, d, variant, args.trials, args.rng_seed,
                                      args.max_attempts, args.granularity, args.jobs)
    head = _replay(args, ["config", "per", "m", "distance", "variant", "trials", "rng_seed", "max_attempts",
                          "granularity"])
    body = "".join(f"# {line}\n" for line in res.summary().splitlines())
    hist = "attempts,trials\n" + "".join(f"{a},{c}\n" for a, c in sorted(res.histogram.items()))
    _emit(args, head + body + hist)
    if args.out not in (None, "-"):
        print(res.summary())


def cmd_leakage(args):
    model, params = _config(args)
    d = _distance(args, model)
    variant = get_variant(args.variant)
    rep = protocol.leakage_report(params, model, d, variant, args.trials, args.rng_seed,
                                  args.corrupted_packets, args.jobs)
    head = _replay(args, ["config", "per", "m", "distance", "variant", "trials", "rng_seed", "corrupted_packets"])
    head += (f"# failed={rep.failed} mean={rep.mean:.6f} std={rep.std:.6f} alarm={rep.alarm} "
             f"chi2={rep.chi2:.3f} dof={rep.dof}\n")
    _emit(args, head + "bit_error_fraction\n" + "".join(f"{f:.6f}\n" for f in rep.fractions))
    if rep.alarm:
        log.warning("leakage alarm: a failed decode kept more than 75%% of the payload")


def _generator(spec):
    kind, _, vals = spec.partition(":")
    nums = [float(v) for v in vals.split(",") if v]
    try:
        return {"iid": burstiness.IID, "gilbert": burstiness.Gilbert, "bursty": burstiness.BurstyIdeal}[kind](*nums)
    except (KeyError, TypeError):
        raise ValueError(f"bad generator {spec!r}; use iid:P, gilbert:PGG,PBB[,PDG,PDB] or bursty:PRR[,SCALE]")


def cmd_beta(args):
    if args.trace:
        trace = burstiness.load_trace(args.trace)
        head = f"# phykey beta trace={args.trace}\n"
    else:
        trace = burstiness.generate_trace(_generator(args.generate), args.length, args.rng_seed)
        head = _replay(args, ["generate", "length", "rng_seed"])
    res = burstiness.beta(trace, args.max_lag, args.min_samples)
    print(res.summary())
    if args.out:
        _emit(args, head + res.cpdf.to_csv())


def build_parser():
    p = argparse.ArgumentParser(prog="phykey", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    variants = sorted(VARIANTS)

    def common(sp, seed=True, jobs=True, out=True):
        if seed:
            sp.add_argument("--rng-seed", type=int, default=0)
        if jobs:
            sp.add_argument("--jobs", type=int, default=1)
        if out:
            sp.add_argument("--out", help="output file (default stdout)")
            sp.add_argument("--gnuplot", action="store_true", help="also write <out>.gp")

    s = sub.add_parser("scramble", help="scramble a file")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--variant", choices=variants, default="proposed")
    s.add_argument("--seed", help="register seed as a bit string, delay-1 cell first")
    s.set_defaults(func=cmd_scramble)

    s = sub.add_parser("descramble", help="descramble a file written by 'scramble'")
    s.add_argument("input")
    s.add_argument("output")
    s.set_defaults(func=cmd_descramble)

    s = sub.add_parser("propagate", help="error propagation sweep or histogram")
    s.add_argument("--variant", choices=variants, default="proposed")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--errors", type=int, default=1)
    s.add_argument("--trials", type=int, default=0, help="0: exhaustive single-error sweep")
    s.add_argument("--uniformity", action="store_true", help="per-position error rates instead of counts")
    common(s)
    s.set_defaults(func=cmd_propagate)

    s = sub.add_parser("coverage", help="Q versus distance")
    s.add_argument("--config")
    s.add_argument("--m", type=int, nargs="+")
    s.add_argument("--per", type=float, help="direct per-packet error rate instead of the distance chain")
    s.add_argument("--d-min", type=float, default=1.0)
    s.add_argument("--d-max", type=float, default=20.0)
    s.add_argument("--d-step", type=float, default=0.1)
    common(s, seed=False, jobs=False)
    s.set_defaults(func=cmd_coverage)

    for name, fn, help_ in (("bootstrap", cmd_bootstrap, "Monte Carlo key bootstrap time"),
                            ("leakage", cmd_leakage, "eavesdropper payload error statistics")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config")
        s.add_argument("--per", type=float)
        s.add_argument("--m", type=int)
        s.add_argument("--distance", type=float)
        s.add_argument("--variant", choices=variants, default="proposed")
        s.add_argument("--trials", type=int, default=1000)
        if name == "bootstrap":
            s.add_argument("--max-attempts", type=int, default=10_000)
            s.add_argument("--granularity", choices=[protocol.PACKET, protocol.BIT], default=protocol.PACKET)
        else:
            s.add_argument("--corrupted-packets", type=int)
        common(s)
        s.set_defaults(func=fn)

    s = sub.add_parser("beta", help="link burstiness of a delivery trace")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--trace", help="trace file: '1' delivered, '0' lost, '#' comments")
    src.add_argument("--generate", help="iid:P | gilbert:PGG,PBB[,PDG,PDB] | bursty:PRR[,SCALE]")
    s.add_argument("--length", type=int, default=100_000)
    s.add_argument("--max-lag", type=int, default=burstiness.DEFAULT_MAX_LAG)
    s.add_argument("--min-samples", type=int, default=burstiness.DEFAULT_MIN_SAMPLES)
    s.add_argument("--rng-seed", type=int, default=0)
    s.add_argument("--out", help="CPDF CSV output")
    s.set_defaults(func=cmd_beta)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except OSError as exc:
        print(f"phykey: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"phykey: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
