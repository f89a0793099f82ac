"""
Run configuration: the ``RunConfig`` record, ``key=value`` file parsing and
the manifest format that echoes a configuration back to disk.
"""

from dataclasses import dataclass, fields
from enum import StrEnum
from pathlib import Path

from . import __version__
from .const_experiments import EXPERIMENT_MAP
from .errors import ConfigParseError, ValidationError
from .grid import GridKind
from .logs import get_logger
from .solver import SolveConfig, SolveMethod
from .waves import WaveSpec

logger = get_logger(__name__)


class Problem(StrEnum):
    HS = "hs"
    MHS = "mhs"
    HS2 = "hs2"


class Scheme(StrEnum):
    EB1 = "eb1"
    EB2 = "eb2"
    H1 = "h1"
    H2 = "h2"
    MS = "ms"


SCHEMES_BY_PROBLEM = {
    Problem.HS: (Scheme.EB1, Scheme.EB2, Scheme.H1, Scheme.H2),
    Problem.MHS: (Scheme.MS, Scheme.H1),
    Problem.HS2: (Scheme.MS, Scheme.H1),
}

# Wave parameters used when a periodic run does not set them.
WAVE_DEFAULTS = {
    Problem.MHS: {"omega": 1.5, "m": -0.1, "M": 0.5, "c": 1.0},
    Problem.HS2: {"b": 1.0, "z": -1.0, "Z": 1.0, "c": 2.0, "kappa": 1},
}

REQUIRED_KEYS = ("problem", "scheme", "N", "dt", "tend")

# Accepted in files and manifests, never stored.
METADATA_KEYS = ("version",)


@dataclass(frozen=True)
class RunConfig:
    """
    Everything needed to reproduce one simulation.

    ``L`` is the half-width of the half-line domain and must be left unset for
    periodic problems, whose period comes from the generated wave.
    ``record_every`` is the profile snapshot stride in steps; 0 records only
    the initial and final profiles. ``perturb`` is the standard deviation of
    the Gaussian noise, drawn from ``seed``, added to the initial u of a
    periodic problem.
    """

    problem: Problem
    scheme: Scheme
    N: int
    dt: float
    tend: float
    L: float | None = None
    out: str | None = None
    omega: float | None = None
    m: float | None = None
    M: float | None = None
    c: float | None = None
    b: float | None = None
    z: float | None = None
    Z: float | None = None
    kappa: int | None = None
    solver: SolveMethod = SolveMethod.NEWTON_FD
    tol: float = 1e-12
    max_iter: int = 50
    fd_eps: float = 1e-7
    record_every: int = 0
    seed: int = 0
    perturb: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "problem", Problem(self.problem))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "solver", SolveMethod(self.solver))
        if self.scheme not in SCHEMES_BY_PROBLEM[self.problem]:
            allowed = ", ".join(SCHEMES_BY_PROBLEM[self.problem])
            raise ValidationError(
                f"scheme {self.scheme} is not available for problem {self.problem} "
                f"(expected one of {allowed})"
            )
        if self.N < 4:
            raise ValidationError(f"N must be at least 4, got {self.N}")
        if not self.dt > 0:
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if not self.tend >= 0:
            raise ValidationError(f"tend must be non-negative, got {self.tend}")
        if self.record_every < 0:
            raise ValidationError(
                f"record_every must be non-negative, got {self.record_every}"
            )
        if not self.perturb >= 0:
            raise ValidationError(f"perturb must be non-negative, got {self.perturb}")
        if self.perturb and self.problem is Problem.HS:
            raise ValidationError("perturb is only available for periodic problems")
        if self.problem is Problem.HS:
            if self.L is None:
                raise ValidationError("L is required for problem hs")
            if not self.L > 0:
                raise ValidationError(f"L must be positive, got {self.L}")
        else:
            if self.L is not None:
                raise ValidationError(
                    f"L is taken from the wave period for problem {self.problem}"
                )
            for key, value in WAVE_DEFAULTS[self.problem].items():
                if getattr(self, key) is None:
                    object.__setattr__(self, key, value)
            self.wave_spec()
        self.solve_config()

    @property
    def grid_kind(self) -> GridKind:
        return GridKind.HALF_LINE if self.problem is Problem.HS else GridKind.PERIODIC

    @property
    def n_steps(self) -> int:
        return round(self.tend / self.dt)

    def solve_config(self) -> SolveConfig:
        return SolveConfig(self.solver, self.tol, self.max_iter, self.fd_eps)

    def wave_spec(self) -> WaveSpec:
        if self.problem is Problem.MHS:
            return WaveSpec.mhs(self.omega, self.m, self.M, self.c)
        if self.problem is Problem.HS2:
            return WaveSpec.hs2(self.b, self.z, self.Z, self.c, self.kappa)
        raise ValidationError("problem hs has no travelling wave")


# Parsers from text to field values, in manifest order.
CONVERTERS = {
    "problem": Problem,
    "scheme": Scheme,
    "N": int,
    "dt": float,
    "tend": float,
    "L": float,
    "out": str,
    "omega": float,
    "m": float,
    "M": float,
    "c": float,
    "b": float,
    "z": float,
    "Z": float,
    "kappa": int,
    "solver": SolveMethod,
    "tol": float,
    "max_iter": int,
    "fd_eps": float,
    "record_every": int,
    "seed": int,
    "perturb": float,
}


def read_config_file(path) -> dict[str, str]:
    """
    Read ``key=value`` lines. Blank lines and lines starting with ``#`` are skipped.

    Raises:
        ConfigParseError: malformed line, unknown key or repeated key.
    """
    values = {}
    with open(path, encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ConfigParseError(f"expected key=value, got {line!r}", line=number)
            if key not in CONVERTERS and key not in METADATA_KEYS:
                raise ConfigParseError(f"unknown key {key!r}", line=number)
            if key in values:
                raise ConfigParseError(f"key {key!r} given twice", line=number)
            values[key] = value.strip()
    return values


def parse_config(path=None, overrides=None, preset: str | None = None) -> RunConfig:
    """
    Build a validated RunConfig.

    Args:
        path: Optional ``key=value`` file.
        overrides: Optional mapping of keys to values, e.g. from command line
            flags. Overrides win over the file, which wins over the preset.
        preset: Optional name from ``EXPERIMENT_MAP``.

    Returns:
        RunConfig.

    Raises:
        ConfigParseError: the file is malformed.
        ValidationError: unknown or missing keys, or a value out of its domain.
    """
    values: dict[str, str] = {}
    if preset is not None:
        if preset not in EXPERIMENT_MAP:
            raise ValidationError(
                f"unknown preset {preset!r}, expected one of {', '.join(EXPERIMENT_MAP)}"
            )
        values.update({key: str(value) for key, value in EXPERIMENT_MAP[preset].items()})
    if path is not None:
        values.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if key not in CONVERTERS:
            raise ValidationError(f"unknown configuration key {key!r}")
        values[key] = str(value)

    version = values.pop("version", None)
    if version is not None and version != __version__:
        logger.warning(f"Configuration written by version {version}, running {__version__}")

    missing = [key for key in REQUIRED_KEYS if key not in values]
    if values.get("problem") == Problem.HS and "L" not in values:
        missing.append("L")
    if missing:
        raise ValidationError(f"missing required keys: {', '.join(missing)}")

    kwargs = {}
    for key, raw in values.items():
        try:
            kwargs[key] = CONVERTERS[key](raw)
        except ValueError as e:
            raise ValidationError(f"invalid value for {key}: {raw!r}") from e
    return RunConfig(**kwargs)


def _format(value) -> str:
    if isinstance(value, StrEnum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_manifest(cfg: RunConfig) -> str:
    """
    Render ``cfg`` as ``key=value`` lines that ``parse_config`` reads back.

    Unset optional fields are omitted.
    """
    lines = [f"version={__version__}"]
    for item in fields(cfg):
        value = getattr(cfg, item.name)
        if value is not None:
            lines.append(f"{item.name}={_format(value)}")
    return "\n".join(lines) + "\n"


def write_manifest(cfg: RunConfig, path) -> Path:
    path = Path(path)
    path.write_text(to_manifest(cfg), encoding="utf-8", newline="\n")
    return path
