"""Command-line interface.

Subcommands:
  sweep     Monte Carlo BER sweep from a config file or named preset.
  optimize  Prefix-weight search for a given channel.
  analytic  Closed-form BER curve for a fixed channel and shift.
  budget    Complex-multiplication counts of the weight optimization.
"""

import argparse
import json
import sys

import numpy as np

from .channel import ChannelRealization
from .harness import PRESET_NAMES, SimConfig, analytic_ber, preset, run_sweep, write_results
from .modem import OfdmConfig, QamConstellation
from .optimize import MaxMin, MinPe, SearchConfig, cm_budget, optimize_psi


def _parse_taps(spec):
    """Channel taps from an inline list ('c1,c2,...') or a file.

    Files hold one complex literal per line; '#' starts a comment.
    """
    try:
        with open(spec, encoding="utf-8") as fh:
            items = [line.split("#", 1)[0].strip() for line in fh]
        items = [s for s in items if s]
    except OSError:
        items = [s.strip() for s in spec.split(",") if s.strip()]
    if not items:
        raise ValueError(f"no channel taps in {spec!r}")
    return np.array([complex(s) for s in items])


def _objective_arg(name, ebno_db):
    if name == "maxmin":
        return MaxMin()
    if ebno_db is None:
        raise ValueError("--ebno-db is required for the minpe objective")
    return MinPe(10.0 ** (ebno_db / 10.0))


def _cmd_sweep(args):
    if args.config in PRESET_NAMES:
        cfg = preset(args.config)
    else:
        with open(args.config, encoding="utf-8") as fh:
            cfg = SimConfig.from_dict(json.load(fh))
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.scheme is not None:
        overrides["scheme"] = args.scheme
    if args.estimation is not None:
        overrides["estimation"] = args.estimation
    if overrides:
        cfg = SimConfig.from_dict({**cfg.to_dict(), **overrides})
    curve = run_sweep(cfg, threads=args.threads)
    write_results(curve, args.out)
    for p in curve.points:
        flag = "  (upper bound)" if p.upper_bound else ""
        print(f"{p.ebno_db:6.2f} dB  ber={p.ber:.4e}  errors={p.bit_errors}  bits={p.bits}{flag}")
    print(f"wrote {args.out} and {args.out}.meta.json")
    return 0


def _cmd_optimize(args):
    taps = _parse_taps(args.taps)
    h = ChannelRealization(taps)
    cfg = OfdmConfig(args.n, args.k, QamConstellation.from_order(args.order))
    objective = _objective_arg(args.objective, args.ebno_db)
    search = SearchConfig(a=0.0, b=2.0 * np.pi / args.n, tolerance=args.eps)
    result = optimize_psi(h, cfg, objective, search)
    print(f"alpha_star      = {result.alpha_star:.9f} rad")
    print(f"psi_star        = {result.psi_star.real:+.9f}{result.psi_star.imag:+.9f}j")
    print(f"objective_value = {result.objective_value:.6e}")
    print(f"iterations      = {result.iterations}")
    return 0


def _cmd_analytic(args):
    taps = _parse_taps(args.taps)
    h = ChannelRealization(taps)
    cfg = OfdmConfig(args.n, args.k, QamConstellation.from_order(args.order))
    psi = complex(np.exp(1j * args.alpha))
    grid = [float(s) for s in args.ebno_grid.split(",") if s.strip()]
    print("# ebno_db\tber")
    for ebno_db in grid:
        print(f"{ebno_db:.6g}\t{analytic_ber(h, cfg, psi, ebno_db):.10e}")
    return 0


def _cmd_budget(args):
    cfg = OfdmConfig(args.n, args.k, QamConstellation.from_order(4))
    objective = MaxMin() if args.objective == "maxmin" else MinPe(1.0)
    budget = cm_budget(cfg, args.l, args.z, objective)
    print(f"tx_cm            = {budget.tx_cm}")
    print(f"rx_fixed_cm      = {budget.rx_fixed_cm}")
    print(f"per_iteration_cm = {budget.per_iteration_cm}")
    print(f"total_cm         = {budget.total_cm}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ofdmlink", description="Link-level OFDM simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo BER sweep")
    p.add_argument("--config", required=True, help=f"JSON config file or preset ({', '.join(PRESET_NAMES)})")
    p.add_argument("--out", required=True, help="output table path")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--scheme", default=None, help="override: cyclic | zero-pad | optimized | weighted:<alpha>")
    p.add_argument("--estimation", default=None, help="override: perfect | block | comb")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("optimize", help="prefix-weight search for a channel")
    p.add_argument("--taps", required=True, help="taps file or inline complex list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=16)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--objective", choices=("minpe", "maxmin"), required=True)
    p.add_argument("--ebno-db", type=float, default=None)
    p.add_argument("--eps", type=float, default=1e-3)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("analytic", help="closed-form BER on a fixed channel")
    p.add_argument("--taps", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.0, help="frequency shift in radians")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--ebno-grid", required=True, help="comma-separated Eb/N0 values in dB")
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("budget", help="complex-multiplication accounting")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True, help="channel length in taps")
    p.add_argument("--z", type=int, required=True, help="search iteration count")
    p.add_argument("--objective", choices=("minpe", "maxmin"), default="minpe")
    p.set_defaults(func=_cmd_budget)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
