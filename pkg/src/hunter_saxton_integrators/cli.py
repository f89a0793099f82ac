"""
Command line entry point.

    hs-integrators run --config run.txt [--preset NAME] [--KEY VALUE ...]
    hs-integrators wave --system mhs --omega 1.5 --m -0.1 --M 0.5 --c 1 --N 256 --out wave.csv
    hs-integrators exact --t 0.5 --L 6 --N 201 --out exact.csv
    hs-integrators presets

Exit codes: 0 on success, 2 on validation errors, 3 on numerical failures.
"""

import argparse
import sys

import pandas as pd

from . import __version__
from .config import CONVERTERS, WAVE_DEFAULTS, Problem, parse_config
from .const_experiments import EXPERIMENT_MAP
from .errors import IntegratorError, ValidationError
from .grid import GridKind, build_grid
from .harness import run_simulation, write_csv
from .logs import get_logger, set_log_level
from .metrics import write_metrics
from .waves import WaveSpec, WaveSystem, generate_wave, hs_exact

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hs-integrators",
        description="Structure-preserving integrators for the Hunter-Saxton family.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--log-level", help="Override the LOG_LEVEL environment variable.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser(
        "run", help="Run a simulation and write its outputs.", allow_abbrev=False
    )
    run.add_argument("--config", help="key=value configuration file.")
    run.add_argument("--preset", choices=sorted(EXPERIMENT_MAP), help="Named experiment.")
    run.add_argument("--metrics-file", help="Write Prometheus metrics here after the run.")
    overrides = run.add_argument_group("configuration overrides")
    for key in CONVERTERS:
        overrides.add_argument(f"--{key}", dest=f"set_{key}", metavar="VALUE")

    wave = sub.add_parser("wave", help="Generate a sampled travelling wave.")
    wave.add_argument("--system", choices=[s.value for s in WaveSystem], required=True)
    for key in ("omega", "m", "M", "c", "b", "z", "Z"):
        wave.add_argument(f"--{key}", type=float)
    wave.add_argument("--N", type=int, required=True)
    wave.add_argument("--out", required=True, help="CSV file to write.")

    exact = sub.add_parser("exact", help="Sample the exact half-line solution.")
    exact.add_argument("--t", type=float, required=True)
    exact.add_argument("--L", type=float, required=True)
    exact.add_argument("--N", type=int, required=True)
    exact.add_argument("--out", required=True, help="CSV file to write.")

    sub.add_parser("presets", help="List the named experiments.")
    return parser


def _run(args) -> None:
    overrides = {
        key: getattr(args, f"set_{key}")
        for key in CONVERTERS
        if getattr(args, f"set_{key}") is not None
    }
    cfg = parse_config(args.config, overrides=overrides, preset=args.preset)
    if cfg.out is None:
        raise ValidationError("run needs an output directory, set out or pass --out")
    try:
        run_simulation(cfg, out_dir=cfg.out)
    finally:
        if args.metrics_file:
            write_metrics(args.metrics_file)


def _wave(args) -> None:
    problem = Problem(args.system)
    params = {
        key: default if getattr(args, key, None) is None else getattr(args, key)
        for key, default in WAVE_DEFAULTS[problem].items()
    }
    if problem is Problem.MHS:
        spec = WaveSpec.mhs(params["omega"], params["m"], params["M"], params["c"])
    else:
        spec = WaveSpec.hs2(params["b"], params["z"], params["Z"], params["c"])
    wave = generate_wave(spec, args.N)
    columns = {"x": wave.grid.x, "phi": wave.phi.values, "dphi": wave.dphi.values}
    if wave.psi is not None:
        columns["psi"] = wave.psi.values
    write_csv(pd.DataFrame(columns), args.out)
    print(f"L_per={wave.period:.17g}")


def _exact(args) -> None:
    grid = build_grid(GridKind.HALF_LINE, args.L, args.N)
    frame = pd.DataFrame({"x": grid.x, "u": hs_exact(grid.x, args.t)})
    write_csv(frame, args.out)


def _presets(args) -> None:
    for name, settings in EXPERIMENT_MAP.items():
        print(name, " ".join(f"{key}={value}" for key, value in settings.items()))


COMMANDS = {"run": _run, "wave": _wave, "exact": _exact, "presets": _presets}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_log_level(args.log_level)
    try:
        COMMANDS[args.command](args)
    except IntegratorError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
