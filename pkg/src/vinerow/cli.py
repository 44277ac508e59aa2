"""Command line entry point: ``run``, ``replay`` and ``depth`` subcommands."""

from __future__ import annotations

import argparse
import logging
import math
import sys

from .depth_projection import load_depth, reliable_depth
from .errors import VinerowError
from .harness import default_out_dir, replay, run_batch


def _pixel(text):
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y integers, got {text!r}") from None
    return x, y


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vinerow", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a batch of simulated trials")
    run.add_argument("--config", required=True,
                     help="TOML config path or profile name (aliengo, hyqreal, ideal)")
    run.add_argument("--trials", type=int, default=10)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default=None,
                     help="output directory (default: $VINEROW_OUT or ./vinerow-out)")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")

    rep = sub.add_parser("replay", help="print a trial trace as a timeline")
    rep.add_argument("--trace", required=True)

    dep = sub.add_parser("depth", help="back-project one pixel of a PFM depth image")
    dep.add_argument("--image", required=True)
    dep.add_argument("--intrinsics", required=True, help="text file with fx fy cx cy")
    dep.add_argument("--pixel", required=True, type=_pixel, help="X,Y")
    return p


def _fmt_cm(v):
    return "n/a" if math.isnan(v) else f"{v * 100:.1f} cm"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            if args.trials < 1:
                print("error: --trials must be >= 1", file=sys.stderr)
                return 2
            out = args.out if args.out is not None else default_out_dir()
            s = run_batch(args.config, args.trials, args.seed, out, jobs=args.jobs)
            print(f"trials        {s.trials}")
            print(f"samples       {s.samples}")
            print(f"visit rate    {s.visit_rate:.3f}")
            print(f"mean error    {_fmt_cm(s.mean_error)}")
            print(f"std error     {_fmt_cm(s.std_error)}")
            print(f"row done      {'all' if s.all_row_done else 'NOT all'}")
            if s.failures:
                print(f"failures      {s.failures}")
            print(f"csv           {s.csv_path}")
            return s.exit_code
        if args.command == "replay":
            for line in replay(args.trace):
                print(line)
            return 0
        if args.command == "depth":
            depth, intr = load_depth(args.image, args.intrinsics)
            x, y = args.pixel
            p = reliable_depth(x, y, depth, intr)
            print(f"{p.x!r} {p.y!r} {p.z!r}")
            return 0
    except VinerowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2
