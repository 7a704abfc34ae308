"""
Defaults, environment lookup and strict run-config parsing for weylspec.
"""

import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

from .errors import ConfigError

CONFIG_VERSION = 1

DEFAULT_TOL = 1e-10
DEFAULT_LAMBDA_MIN = 1e-3
DEFAULT_LAMBDA_MAX = 60.0
DEFAULT_LAMBDA_CAP = 2000.0
DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3)
DEFAULT_DX = 0.01
DEFAULT_X_CAP = 1e4
DEFAULT_SMOOTHING = 0.1
DEFAULT_N_SCAN = 128
DEFAULT_T_GRID = (10.0, 30.0, 100.0)
DEFAULT_PRECISION = 17
DEFAULT_OUTPUT_DIR = "weylspec-out"

THREADS_ENV = "WEYLSPEC_THREADS"

TASKS = ("density", "cfunction", "project", "bound_states", "reconstruct", "green", "verify")

try:
    import psutil
    HAS_PSUTIL = True
except ImportError:
    HAS_PSUTIL = False


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Resolve the worker-pool size.

    Search order:
    1. Explicit threads argument (0 means auto)
    2. WEYLSPEC_THREADS environment variable
    3. Physical core count via psutil, else os.cpu_count()

    Returns:
        Number of worker threads, at least 1.
    """
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ConfigError(f"{THREADS_ENV} must be an integer, got '{env}'")
    if threads is not None and threads < 0:
        raise ConfigError(f"threads must be >= 0, got {threads}")
    if threads:
        return int(threads)

    cores = None
    if HAS_PSUTIL:
        cores = psutil.cpu_count(logical=False)
    if not cores:
        cores = os.cpu_count() or 1
    return max(1, int(cores))


# ---------------------------------------------------------------------- #
#  Run-config
# ---------------------------------------------------------------------- #


@dataclass(frozen=True)
class DataSpec:
    """Test function used by projection / reconstruction tasks."""

    kind: str = "gaussian"
    center: float = 5.0
    width: float = 0.7


@dataclass(frozen=True)
class NumericConfig:
    tol: float = DEFAULT_TOL
    lambda_min: float = DEFAULT_LAMBDA_MIN
    lambda_max: float = DEFAULT_LAMBDA_MAX
    lambda_cap: float = DEFAULT_LAMBDA_CAP
    epsilons: Tuple[float, ...] = DEFAULT_EPSILONS
    lambda_grid: Tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 10.0)
    interval: Tuple[float, float] = (1.0, 4.0)
    dx: float = DEFAULT_DX
    x_cap: float = DEFAULT_X_CAP
    x_grid: Tuple[float, ...] = (0.5, 1.0, 2.0, 4.0, 8.0)
    z_range: Tuple[float, float] = (0.05, 0.95)
    n_scan: int = DEFAULT_N_SCAN
    t_grid: Tuple[float, ...] = DEFAULT_T_GRID
    nu: Tuple[float, float] = (-1.0, 0.0)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = DEFAULT_OUTPUT_DIR
    formats: Tuple[str, ...] = ("csv", "json")
    precision: int = DEFAULT_PRECISION


@dataclass(frozen=True)
class RunConfig:
    """
    Validated run-config document.

    Attributes:
        potential: {"name": ..., "params": [...]} or {"tabulated": {...}}.
        task: One of TASKS.
        numeric: Tolerances, grids and windows.
        output: Output directory, formats and precision.
        data: Test function for projection / reconstruction.
        seed: Seed of the randomized property suites.
    """

    potential: Dict[str, Any]
    task: str
    numeric: NumericConfig = field(default_factory=NumericConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    data: DataSpec = field(default_factory=DataSpec)
    seed: int = 0
    version: int = CONFIG_VERSION

    def to_dict(self) -> dict:
        return asdict(self)


_TOP_KEYS = {"version", "potential", "task", "numeric", "output", "data", "seed"}


def _reject_unknown(block: Dict[str, Any], allowed: Sequence[str], where: str) -> None:
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in {where}: {', '.join(unknown)}")


def _positive(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if not value > 0:
        raise ConfigError(f"{name} must be > 0, got {value}")
    return value


def _monotone(name: str, values: Sequence[float]) -> Tuple[float, ...]:
    try:
        values = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of numbers")
    if len(values) == 0:
        raise ConfigError(f"{name} must not be empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{name} must be strictly increasing")
    return values


def _parse_potential(block: Any) -> Dict[str, Any]:
    if not isinstance(block, dict):
        raise ConfigError("potential must be an object")
    if "tabulated" in block:
        _reject_unknown(block, ["tabulated"], "potential")
        tab = block["tabulated"]
        if not isinstance(tab, dict):
            raise ConfigError("potential.tabulated must be an object")
        _reject_unknown(tab, ["x", "p", "q"], "potential.tabulated")
        for key in ("x", "p", "q"):
            if key not in tab:
                raise ConfigError(f"potential.tabulated.{key} is required")
        _monotone("potential.tabulated.x", tab["x"])
        return {"tabulated": {k: [float(v) for v in tab[k]] for k in ("x", "p", "q")}}
    _reject_unknown(block, ["name", "params"], "potential")
    if "name" not in block:
        raise ConfigError("potential.name is required")
    params = block.get("params", [])
    if not isinstance(params, list):
        raise ConfigError("potential.params must be a list")
    return {"name": str(block["name"]), "params": [float(v) for v in params]}


def _parse_numeric(block: Dict[str, Any]) -> NumericConfig:
    allowed = list(NumericConfig.__dataclass_fields__)
    _reject_unknown(block, allowed, "numeric")
    kw: Dict[str, Any] = {}
    for key in ("tol", "lambda_min", "lambda_max", "lambda_cap", "dx", "x_cap"):
        if key in block:
            kw[key] = _positive(f"numeric.{key}", block[key])
    for key in ("lambda_grid", "x_grid", "t_grid"):
        if key in block:
            kw[key] = _monotone(f"numeric.{key}", block[key])
    if "epsilons" in block:
        eps = block["epsilons"]
        if not isinstance(eps, list) or not eps:
            raise ConfigError("numeric.epsilons must be a non-empty list")
        # largest first, the Kodaira sequence runs toward the axis
        kw["epsilons"] = tuple(sorted({_positive("numeric.epsilons[]", v) for v in eps}, reverse=True))
    for key in ("interval", "z_range"):
        if key in block:
            pair = _monotone(f"numeric.{key}", block[key])
            if len(pair) != 2:
                raise ConfigError(f"numeric.{key} must have two entries")
            _positive(f"numeric.{key}[0]", pair[0])
            kw[key] = pair
    if "nu" in block:
        nu = block["nu"]
        if not isinstance(nu, list) or len(nu) != 2:
            raise ConfigError("numeric.nu must be [re, im]")
        kw["nu"] = (float(nu[0]), float(nu[1]))
    if "n_scan" in block:
        n_scan = int(block["n_scan"])
        if n_scan < 16:
            raise ConfigError(f"numeric.n_scan must be >= 16, got {n_scan}")
        kw["n_scan"] = n_scan

    numeric = NumericConfig(**kw)
    if numeric.lambda_max <= numeric.lambda_min:
        raise ConfigError("numeric.lambda_max must exceed numeric.lambda_min")
    if numeric.lambda_cap <= numeric.lambda_max:
        raise ConfigError("numeric.lambda_cap must exceed numeric.lambda_max")
    # every λ-sample must lie where the c-function is computed
    if numeric.lambda_grid[0] < numeric.lambda_min:
        raise ConfigError(
            f"numeric.lambda_grid must start at or above lambda_min = {numeric.lambda_min:g}"
        )
    if numeric.interval[0] < numeric.lambda_min:
        raise ConfigError(
            f"numeric.interval must start at or above lambda_min = {numeric.lambda_min:g}"
        )
    if numeric.x_grid[0] < 0:
        raise ConfigError("numeric.x_grid must lie in [0, inf)")
    if numeric.t_grid[0] <= 0:
        raise ConfigError("numeric.t_grid must be positive")
    return numeric


def _parse_output(block: Dict[str, Any]) -> OutputConfig:
    _reject_unknown(block, ["directory", "formats", "precision"], "output")
    kw: Dict[str, Any] = {}
    if "directory" in block:
        kw["directory"] = str(block["directory"])
    if "formats" in block:
        formats = tuple(str(f) for f in block["formats"])
        bad = [f for f in formats if f not in ("csv", "json")]
        if bad:
            raise ConfigError(f"Unsupported output format(s): {', '.join(bad)}")
        kw["formats"] = formats
    if "precision" in block:
        precision = int(block["precision"])
        if not 1 <= precision <= 17:
            raise ConfigError(f"output.precision must be in [1, 17], got {precision}")
        kw["precision"] = precision
    return OutputConfig(**kw)


def _parse_data(block: Dict[str, Any]) -> DataSpec:
    _reject_unknown(block, ["kind", "center", "width"], "data")
    kind = str(block.get("kind", "gaussian"))
    if kind not in ("gaussian", "bump"):
        raise ConfigError(f"data.kind must be 'gaussian' or 'bump', got '{kind}'")
    return DataSpec(
        kind=kind,
        center=float(block.get("center", 5.0)),
        width=_positive("data.width", block.get("width", 0.7)),
    )


def parse_config(document: Dict[str, Any], task_override: Optional[str] = None) -> RunConfig:
    """
    Validate a run-config document.

    Args:
        document: Parsed JSON object.
        task_override: Task name from the command line, replaces "task".

    Returns:
        RunConfig.

    Raises:
        ConfigError: On any unknown key, missing field or invalid value.
    """
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(document, _TOP_KEYS, "config")
    version = document.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"Unsupported config version {version} (expected {CONFIG_VERSION})")
    if "potential" not in document:
        raise ConfigError("config.potential is required")

    task = task_override or document.get("task")
    if task not in TASKS:
        raise ConfigError(f"task must be one of {', '.join(TASKS)}, got {task!r}")

    for key in ("numeric", "output", "data"):
        if key in document and not isinstance(document[key], dict):
            raise ConfigError(f"config.{key} must be an object")

    seed = document.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")

    return RunConfig(
        potential=_parse_potential(document["potential"]),
        task=task,
        numeric=_parse_numeric(document.get("numeric", {})),
        output=_parse_output(document.get("output", {})),
        data=_parse_data(document.get("data", {})),
        seed=seed,
    )


def load_config(path: str, task_override: Optional[str] = None) -> RunConfig:
    """Read and validate a JSON run-config file."""
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config is not valid JSON: {e}")
    return parse_config(document, task_override)

