"""Command-line interface: kp run / list-experiments / convergence."""

import argparse
import sys

from .errors import KplabError, ParseError, ValidationError
from .runner import EXPERIMENTS, experiment_config_path, parse_config, \
    run_convergence, run_experiment

EXIT_CONFIG = 2
EXIT_TERMINAL = 3


def _load_config(args):
    if args.config:
        return parse_config(args.config)
    return parse_config(experiment_config_path(args.experiment))


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="kp",
        description="KP equation solver laboratory: compact, spectral and "
                    "mixed discretizations with a conservative implicit "
                    "midpoint time scheme.")
    sub = ap.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one experiment")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a sectioned key=value config file")
    src.add_argument("--experiment", choices=sorted(EXPERIMENTS),
                     help="run a shipped experiment config")
    run_p.add_argument("--out-dir", help="override [outputs] out_dir")
    run_p.add_argument("--t-end", type=float, help="override [time] t_end")
    run_p.add_argument("--dt", type=float, help="override [time] dt")

    sub.add_parser("list-experiments", help="list shipped experiment configs")

    conv_p = sub.add_parser(
        "convergence", help="grid-refinement sweep printing measured orders")
    conv_src = conv_p.add_mutually_exclusive_group(required=True)
    conv_src.add_argument("--config")
    conv_src.add_argument("--experiment", choices=sorted(EXPERIMENTS))
    conv_p.add_argument("--refine", choices=("x", "y"), default="y")
    conv_p.add_argument("--sizes", type=int, nargs="+",
                        help="grid sizes for the refined direction")

    args = ap.parse_args(argv)
    try:
        if args.command == "list-experiments":
            for name in sorted(EXPERIMENTS):
                print(f"{name:24s} {experiment_config_path(name)}")
            return 0
        cfg = _load_config(args)
        if args.command == "run":
            if args.out_dir:
                cfg.outputs.out_dir = args.out_dir
            if args.t_end is not None or args.dt is not None:
                from .stepper import TimeParams
                cfg.time = TimeParams(
                    dt=args.dt if args.dt is not None else cfg.time.dt,
                    t_end=args.t_end if args.t_end is not None else cfg.time.t_end,
                    n_steps=None if args.t_end is not None else cfg.time.n_steps)
            return run_experiment(cfg)
        if args.command == "convergence":
            samples, slope = run_convergence(cfg, args.refine, args.sizes)
            print(f"# refine={args.refine} scheme={cfg.scheme.kind} "
                  f"order={cfg.scheme.order}")
            print("h,l2_error")
            for h, err in samples:
                print(f"{h:.6g},{err:.6e}")
            print(f"measured order: {slope:.3f}")
            return 0
    except (ParseError, ValidationError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KplabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
