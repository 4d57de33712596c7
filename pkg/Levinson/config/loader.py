import math
from dataclasses import dataclass, fields, replace
from typing import Optional, Tuple

from dotenv import dotenv_values

from Levinson.config.default import RUN_CONFIG
from Levinson.core.potential import Potential
from Levinson.exception import ConfigurationError
from Levinson.logger import get_logger

logger = get_logger(__name__)

MODES = ("levinson", "curves", "resonance_scan", "flow_suite", "bk_check")


@dataclass(frozen=True)
class RunConfig:
    family: str
    depth: float
    radius: float
    dimension: int
    table: Optional[str]
    lambda_max: Optional[float]
    l_max: Optional[int]
    grid_points: int
    quad_tol: float
    step_tol: float
    phase_tol: float
    max_jump: float
    tail_window: float
    residual_tol: float
    box_factor: float
    box_points: int
    flow_seeds: int
    flow_dim_min: int
    flow_dim_max: int
    flow_s: Tuple[float, ...]
    flow_box_length: float
    flow_box_points: int
    scan_channel: int
    scan_low: float
    scan_high: float
    scan_points: int
    bk_low: float
    bk_high: float
    bk_box_length: float
    bk_box_points: int
    mode: str = "levinson"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        validate(self)

    def potential(self) -> Potential:
        if self.family == "table":
            if not self.table:
                raise ConfigurationError("family=table needs a 'table' file path")
            return Potential.from_table_file(self.table, self.dimension)
        return Potential(dimension=self.dimension, family=self.family, depth=self.depth, radius=self.radius)

    def resolved_lambda_max(self, V: Potential) -> float:
        return self.lambda_max if self.lambda_max is not None else 400.0 * V.energy_scale

    def resolved_l_max(self, V: Potential) -> int:
        if self.dimension == 1:
            return 1
        if self.l_max is not None:
            return self.l_max
        return int(math.ceil(math.sqrt(self.resolved_lambda_max(V)) * V.radius)) + 20


def validate(cfg: RunConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigurationError(f"Unknown mode '{cfg.mode}'; expected one of {MODES}")
    if cfg.dimension not in (1, 2, 3, 4):
        raise ConfigurationError(f"dimension must be 1..4, got {cfg.dimension}")
    if cfg.family not in ("bump", "well", "table"):
        raise ConfigurationError(f"Unknown potential family '{cfg.family}'")
    if not cfg.radius > 0:
        raise ConfigurationError(f"radius must be positive, got {cfg.radius}")
    if cfg.lambda_max is not None and not cfg.lambda_max > 0:
        raise ConfigurationError(f"lambda_max must be positive, got {cfg.lambda_max}")
    if cfg.l_max is not None and cfg.l_max < 0:
        raise ConfigurationError(f"l_max must be nonnegative, got {cfg.l_max}")
    for name in ("quad_tol", "step_tol", "phase_tol", "max_jump", "tail_window", "residual_tol", "box_factor"):
        if not getattr(cfg, name) > 0:
            raise ConfigurationError(f"{name} must be positive, got {getattr(cfg, name)}")
    if cfg.grid_points < 3:
        raise ConfigurationError(f"grid_points must be at least 3, got {cfg.grid_points}")
    if not 2 <= cfg.flow_dim_min <= cfg.flow_dim_max:
        raise ConfigurationError("Need 2 <= flow_dim_min <= flow_dim_max")
    if any(s <= 0.5 for s in cfg.flow_s):
        raise ConfigurationError(f"flow_s values must exceed 1/2, got {cfg.flow_s}")
    if not cfg.scan_low < cfg.scan_high:
        raise ConfigurationError("scan_low must be below scan_high")
    if not cfg.bk_low < cfg.bk_high:
        raise ConfigurationError("bk_low must be below bk_high")
    if cfg.threads < 1:
        raise ConfigurationError(f"threads must be at least 1, got {cfg.threads}")


def _coerce(name: str, raw: str, default):
    text = raw.strip()
    if name in ("table",):
        return text or None
    if text.lower() in ("", "none", "auto"):
        if default is None:
            return None
        raise ConfigurationError(f"Key '{name}' needs a value")
    try:
        if name == "flow_s":
            return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())
        if name in ("lambda_max",):
            return float(text)
        if name in ("l_max",) or isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigurationError(f"Key '{name}' has malformed value '{raw}'")
    return text


def load_config(path: Optional[str] = None, **overrides) -> RunConfig:
    """
    Build a RunConfig from RUN_CONFIG, a flat KEY=VALUE file and keyword overrides.

    Args:
        path (str, optional): Config file; keys are case-insensitive.
        **overrides: Values that win over the file (mode, seed, threads, ...).

    Returns:
        RunConfig: Validated configuration.
    """
    values = dict(RUN_CONFIG)
    if path is not None:
        try:
            entries = dotenv_values(path)
        except OSError as e:
            raise ConfigurationError(f"Could not read config {path}: {e}")
        if not entries and not _readable(path):
            raise ConfigurationError(f"Config file {path} not found")
        for key, raw in entries.items():
            name = key.lower()
            if name not in RUN_CONFIG and name not in ("mode", "seed", "threads"):
                raise ConfigurationError(f"Unknown config key '{key}' in {path}")
            default = RUN_CONFIG.get(name, 0 if name != "mode" else "")
            values[name] = _coerce(name, raw or "", default)
        logger.info(f"Loaded {len(entries)} config keys from {path}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in fields(RunConfig)}
    try:
        return RunConfig(**{k: v for k, v in values.items() if k in names})
    except TypeError as e:
        raise ConfigurationError(f"Incomplete configuration: {e}")


def _readable(path: str) -> bool:
    try:
        with open(path):
            return True
    except OSError:
        return False


def with_mode(cfg: RunConfig, mode: str) -> RunConfig:
    return replace(cfg, mode=mode)
