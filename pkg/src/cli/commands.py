"""Command-line surface: one subcommand per computation, JSON in, CSV/JSON out."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .. import __version__
from ..config.settings import AppConfig
from ..core.csv_io import load_json_config
from ..core.errors import EXIT_CONFIG, EXIT_INSTABILITY, QBMError
from ..services.evolve_service import EvolveService
from ..services.flux_service import FluxService
from ..services.langevin_service import LangevinService
from ..services.pattern_service import METHODS, PatternService
from ..services.regime_service import RegimeService

logger = logging.getLogger(__name__)

EXIT_OK = 0


def _threads(args: argparse.Namespace, config: AppConfig) -> int:
    if args.threads is not None:
        return args.threads
    return config.numerics.threads


def _print_json(data) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def cmd_pattern(args: argparse.Namespace, config: AppConfig) -> int:
    data = load_json_config(args.config)
    service = PatternService(config, threads=_threads(args, config))
    manifest = service.run(
        data, Path(args.out),
        method=args.method,
        convention=args.convention,
        compare=args.compare,
        samples=args.samples,
        x_min=args.x_min,
        x_max=args.x_max,
        time=args.time
    )
    if args.compare:
        _print_json(manifest.summary)
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace, config: AppConfig) -> int:
    data = load_json_config(args.config)
    service = EvolveService(config, threads=_threads(args, config))
    manifest = service.run(data, Path(args.out), progress=args.progress or None)
    _print_json(manifest.summary)
    return EXIT_OK


def cmd_langevin(args: argparse.Namespace, config: AppConfig) -> int:
    data = load_json_config(args.params)
    service = LangevinService(config, threads=_threads(args, config))
    manifest = service.run(
        data, Path(args.out),
        progress=args.progress or None,
        dt=args.dt,
        n_steps=args.steps,
        n_ensembles=args.ensembles,
        seed=args.seed
    )
    _print_json(manifest.summary)
    return EXIT_OK


def cmd_flux(args: argparse.Namespace, config: AppConfig) -> int:
    data = load_json_config(args.params)
    service = FluxService(config)
    manifest = service.run(
        data, Path(args.path1), Path(args.path2) if args.path2 else None,
        out_dir=Path(args.out) if args.out else None
    )
    _print_json(manifest.summary)
    return EXIT_OK


def cmd_regime(args: argparse.Namespace, config: AppConfig) -> int:
    data = load_json_config(args.params)
    service = RegimeService(config)
    manifest = service.run(data, Path(args.out) if args.out else None, threshold=args.threshold)
    _print_json(manifest.summary)
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbm",
        description="Doubled-coordinate quantum Brownian motion: diffraction, master equation, "
                    "Langevin and dissipative-flux computations"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="More log output on stderr (-v info, -vv debug)")
    parser.add_argument("--threads", type=_positive_int, default=None,
                        help="Worker threads (count); falls back to QBM_THREADS. "
                             "Results do not depend on it")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", help="Two-slit screen pattern P(x) [1/length]")
    p.add_argument("--config", required=True,
                   help="JSON with 'params' {mass [mass], friction [mass/time], hbar [action], "
                        "kBT [energy]} and 'geometry' {w, d, D [length], v [length/time]}")
    p.add_argument("--out", required=True, help="Output directory for pattern CSVs and manifest")
    p.add_argument("--method", choices=METHODS, default=None,
                   help="Computational route (default: closed)")
    p.add_argument("--convention", choices=("derived", "printed"), default=None,
                   help="Closed-form convention (default: derived, the exact far-field integral)")
    p.add_argument("--compare", default=None, metavar="A,B",
                   help="Compute two methods and write a pointwise relative-deviation CSV")
    p.add_argument("--samples", type=_positive_int, default=None,
                   help="Number of screen positions (count, default 1024)")
    p.add_argument("--x-min", dest="x_min", type=float, default=None,
                   help="Left screen position [length]; default K x = -6 pi")
    p.add_argument("--x-max", dest="x_max", type=float, default=None,
                   help="Right screen position [length]; default K x = +6 pi")
    p.add_argument("--time", type=float, default=None,
                   help="Flight time t [time]; default D/v")
    p.set_defaults(handler=cmd_pattern)

    e = sub.add_parser("evolve", help="Integrate the Brownian master equation on a grid")
    e.add_argument("--config", required=True,
                   help="JSON with 'params', 'evolver' {grid {x_min, x_max [length], n}, dt [time], "
                        "t_final [time], scheme, snapshot_stride [steps]}, optional 'initial' and "
                        "'potential'")
    e.add_argument("--out", required=True, help="Output directory for snapshots, trace.csv, manifest")
    e.add_argument("--progress", action="store_true", help="Show a progress bar on stderr")
    e.set_defaults(handler=cmd_evolve)

    lg = sub.add_parser("langevin", help="Langevin ensemble and Einstein-relation estimate")
    lg.add_argument("--params", required=True,
                    help="JSON with 'params' and optional 'langevin' {dt [time], n_steps, "
                         "n_ensembles, seed, x0 [length], v0 [length/time]} and 'window' [time, time]")
    lg.add_argument("--out", required=True, help="Output directory for msd.csv, diffusion.json, manifest")
    lg.add_argument("--dt", type=float, default=None, help="Time step [time]")
    lg.add_argument("--steps", type=_positive_int, default=None,
                    help="Number of steps (count); default 100 M/R / dt")
    lg.add_argument("--ensembles", type=_positive_int, default=None,
                    help="Number of trajectories (count, at least 100)")
    lg.add_argument("--seed", type=int, default=None, help="64-bit seed of the noise streams")
    lg.add_argument("--progress", action="store_true", help="Show a progress bar on stderr")
    lg.set_defaults(handler=cmd_langevin)

    f = sub.add_parser("flux", help="Oriented area and dissipative phase between two paths")
    f.add_argument("--path1", required=True, help="Path CSV (x_plus, x_minus [length])")
    f.add_argument("--path2", default=None,
                   help="Second path CSV [length]; omitted: path1 is a closed loop")
    f.add_argument("--params", required=True, help="JSON with friction [mass/time] and hbar [action]")
    f.add_argument("--out", default=None,
                   help="Output directory for flux.json and manifest; without it the report is "
                        "only printed and no manifest is written")
    f.set_defaults(handler=cmd_flux)

    r = sub.add_parser("regime", help="Crossover temperature and quantum/classical regime")
    r.add_argument("--params", required=True, help="JSON parameter block (mass, friction, hbar, kBT)")
    r.add_argument("--threshold", type=float, default=None,
                   help="Regime threshold rho_c (dimensionless, > 1); falls back to QBM_REGIME_THRESHOLD")
    r.add_argument("--out", default=None,
                   help="Output directory for regime.json and manifest; without it the report is "
                        "only printed and no manifest is written")
    r.set_defaults(handler=cmd_regime)
    return parser


def configure_logging(level_name: str, verbose: int) -> None:
    level = getattr(logging, level_name, logging.WARNING)
    if verbose == 1:
        level = min(level, logging.INFO)
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = AppConfig.from_env()
    except ValueError as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    configure_logging(config.runtime.log_level, args.verbose)
    logger.debug("running %s with %d thread(s)", args.command, _threads(args, config))

    try:
        return args.handler(args, config)
    except QBMError as e:
        if e.exit_code == EXIT_CONFIG:
            print(f"❌ Configuration error: {e}", file=sys.stderr)
        elif e.exit_code == EXIT_INSTABILITY:
            print(f"❌ Instability: {e}", file=sys.stderr)
        else:
            print(f"❌ Numerical failure: {e}", file=sys.stderr)
        return e.exit_code
