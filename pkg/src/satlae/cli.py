"""Command-line entry point: ``satlae <subcommand> --scenario FILE --out FILE``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import engine, report
from .config import ScenarioConfig
from .control import InsufficientVisibilityError
from .mimo import DegenerateChannelError
from .scenario import ScenarioError, dump_scenario, parse_scenario

log = logging.getLogger("satlae")


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _ints(text: str) -> list[int]:
    vals = _floats(text)
    if any(v != int(v) or v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"expected comma-separated positive integers, got {text!r}")
    return [int(v) for v in vals]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", type=Path, help="scenario file (defaults when omitted)")
    common.add_argument("--seed", type=int, help="override sim.seed")
    common.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", type=Path, required=True, help="CSV output path")
    out.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")

    p = argparse.ArgumentParser(prog="satlae", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common, out], help="per-slot metrics for the scenario policy")
    sp = sub.add_parser("sweep-power", parents=[common, out], help="mean sum rate versus transmit power")
    sp.add_argument("--powers", type=_floats, default=[1.0, 5.0, 10.0, 20.0])
    mp = sub.add_parser("min-power", parents=[common, out], help="minimum power per target rate")
    mp.add_argument("--targets", type=_floats, default=[6.0, 12.0, 18.0])
    sv = sub.add_parser("service", parents=[common, out], help="service duration and handovers")
    sv.add_argument("--targets", type=_floats, default=[6.0, 12.0, 18.0])
    ts = sub.add_parser("compare-timescales", parents=[common, out], help="beam-control schemes over time")
    ts.add_argument("--frames", type=_ints, default=[200, 500, 1000])
    sub.add_parser("show-scenario", parents=[common], help="print the fully resolved scenario")
    return p


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    cfg = parse_scenario(args.scenario) if args.scenario is not None else ScenarioConfig()
    kw = {"workers": args.workers}
    if args.seed is not None:
        kw["master_seed"] = args.seed
    return cfg.with_(**kw)


def execute(args: argparse.Namespace) -> list[Path]:
    cfg = load_config(args)
    if args.command == "show-scenario":
        sys.stdout.write(dump_scenario(cfg))
        return []
    if args.command == "run":
        result = report.run_table(engine.run(cfg), len(cfg.fleets), cfg.fingerprint())
    elif args.command == "sweep-power":
        result = engine.power_sweep(cfg, args.powers)
    elif args.command == "min-power":
        result = engine.min_power_experiment(cfg, args.targets)
    elif args.command == "service":
        result = engine.service_experiment(cfg, args.targets)
    else:
        result = engine.timescale_experiment(cfg, args.frames)
    written = report.write_result(args.out, result)
    if args.plot:
        from . import plotting

        written.append(plotting.render(result, plotting.figure_path(args.out)))
    return written


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        for path in execute(args):
            log.info("wrote %s", path)
    except (ScenarioError, InsufficientVisibilityError, DegenerateChannelError, ValueError, OSError) as exc:
        print(f"satlae: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
