"""
Configuration Manager for the SWIPT simulator.

This module handles run configuration and environment settings,
following the Single Responsibility Principle. Run configurations are JSON
files validated by pydantic models with unknown fields rejected; environment
settings come from the process environment or a ``.env`` file.
"""

import json
import logging
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from swipt.ascent import SolverConfig
from swipt.errors import ConfigError
from swipt.oracle import OracleConfig
from swipt.system_model import QosConstraints, SystemParams

logger = logging.getLogger(__name__)

DEFAULTS_FILE = Path(__file__).resolve().parent.parent / "default_params.json"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemParamsModel(_Strict):
    n_tx: int = Field(8, ge=1)
    n_rx: int = Field(8, ge=1)
    zeta: Optional[float] = None
    drain_efficiency: Optional[float] = Field(None, gt=0, le=1)
    eta: float = 0.1
    p_sta: float = 5.0
    p_ant_bs: float = 1.0
    p_ant: float = 1.0
    theta: float = 1.0

    @model_validator(mode="after")
    def _one_amplifier_figure(self):
        if self.zeta is not None and self.drain_efficiency is not None:
            raise ValueError("give either zeta or drain_efficiency, not both")
        return self

    def build(self) -> SystemParams:
        values = self.model_dump(exclude={"zeta", "drain_efficiency"})
        if self.drain_efficiency is not None:
            return SystemParams.from_drain_efficiency(self.drain_efficiency, **values)
        if self.zeta is not None:
            return SystemParams(zeta=self.zeta, **values)
        return SystemParams(**values)


class QosModel(_Strict):
    r_min: float = 0.0
    e_min: float = 0.0
    p_max: float = 10.0

    def build(self) -> QosConstraints:
        return QosConstraints(**self.model_dump())


class SweepModel(_Strict):
    variable: Literal["p_max", "r_min", "e_min", "p_sta", "n_active"]
    values: List[float] = Field(min_length=1)

    @field_validator("values")
    @classmethod
    def _strictly_increasing(cls, values: List[float]) -> List[float]:
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        return values


class SolverConfigModel(_Strict):
    delta: float = 1e-6
    max_outer: int = 50
    max_inner: int = 5000
    step0: float = 0.1
    kkt_tol: float = 1e-5
    dual_step0: float = 1.0
    ascent_iters: int = 200
    ee_tol: float = 1e-6
    exhaustive_start_channels: int = 3

    def build(self) -> SolverConfig:
        return SolverConfig(**self.model_dump())


class OracleCheckModel(_Strict):
    enabled: bool = False
    power_grid_steps: int = 200
    max_channels: int = 4
    max_antennas: int = 4

    def build(self) -> OracleConfig:
        return OracleConfig(**self.model_dump(exclude={"enabled"}))


class RunConfigModel(_Strict):
    """JSON shape of a run configuration."""

    params: SystemParamsModel = Field(default_factory=SystemParamsModel)
    qos: QosModel = Field(default_factory=QosModel)
    trials: int = Field(1, ge=1)
    master_seed: int = Field(0, ge=0, lt=2 ** 64)
    algorithms: List[Literal["dm_cvx", "jeapa", "moo_lc"]] = Field(
        default_factory=lambda: ["jeapa"], min_length=1)
    selection: Literal["fixed_full", "exhaustive", "frobenius"] = "fixed_full"
    selections: Optional[List[Literal["fixed_full", "exhaustive", "frobenius"]]] = None
    max_exhaustive_antennas: int = Field(12, ge=1)
    sweep: Optional[SweepModel] = None
    solver_cfg: SolverConfigModel = Field(default_factory=SolverConfigModel)
    oracle_check: OracleCheckModel = Field(default_factory=OracleCheckModel)


@dataclass(frozen=True)
class Sweep:
    variable: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration with library value types."""

    params: SystemParams = field(default_factory=SystemParams.reference_defaults)
    qos: QosConstraints = field(default_factory=QosConstraints)
    trials: int = 1
    master_seed: int = 0
    algorithms: Tuple[str, ...] = ("jeapa",)
    selection: str = "fixed_full"
    selections: Tuple[str, ...] = ()
    max_exhaustive_antennas: int = 12
    sweep: Optional[Sweep] = None
    solver_cfg: SolverConfig = field(default_factory=SolverConfig)
    oracle_check: bool = False
    oracle_cfg: OracleConfig = field(default_factory=OracleConfig)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")

    @property
    def strategies(self) -> Tuple[str, ...]:
        """Selection strategies to run; ``selections`` overrides the single ``selection``."""
        return self.selections or (self.selection,)

    @property
    def sweep_points(self) -> Tuple[Optional[float], ...]:
        return (None,) if self.sweep is None else self.sweep.values

    def with_seed(self, master_seed: int) -> "RunConfig":
        return replace(self, master_seed=master_seed)

    @classmethod
    def from_model(cls, model: RunConfigModel) -> "RunConfig":
        sweep = None if model.sweep is None else Sweep(model.sweep.variable, tuple(model.sweep.values))
        return cls(
            params=model.params.build(),
            qos=model.qos.build(),
            trials=model.trials,
            master_seed=model.master_seed,
            algorithms=tuple(model.algorithms),
            selection=model.selection,
            selections=tuple(model.selections or ()),
            max_exhaustive_antennas=model.max_exhaustive_antennas,
            sweep=sweep,
            solver_cfg=model.solver_cfg.build(),
            oracle_check=model.oracle_check.enabled,
            oracle_cfg=model.oracle_check.build(),
        )


def _line_of(text: str, key: str) -> Optional[int]:
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse JSON text into a RunConfig; every failure becomes a ConfigError with location."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: invalid JSON: {exc.msg}", line=exc.lineno) from exc
    try:
        model = RunConfigModel.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        path = ".".join(str(part) for part in first["loc"])
        keys = [part for part in first["loc"] if isinstance(part, str)]
        line = _line_of(text, keys[-1]) if keys else None
        raise ConfigError(f"{source}: {first['msg']}", field=path or None, line=line) from exc
    try:
        return RunConfig.from_model(model)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_run_config(text, str(path))


@dataclass
class EnvironmentConfig:
    """Settings read from the environment."""
    workers: int = 1
    log_level: str = "WARNING"
    service_url: str = "http://localhost:8000"
    request_timeout: int = 120


class ConfigManagerInterface(ABC):
    """Interface for configuration managers."""

    @abstractmethod
    def get_environment(self) -> EnvironmentConfig:
        """Get environment settings."""
        pass

    @abstractmethod
    def get_run_config(self, path: Optional[Union[str, Path]] = None) -> RunConfig:
        """Get a run configuration, the shipped defaults when no path is given."""
        pass


class DefaultConfigManager(ConfigManagerInterface):
    """Reads ``.env`` once and resolves run configurations from JSON files."""

    def __init__(self, env_file: Optional[str] = None):
        load_dotenv(env_file)
        self._environment = EnvironmentConfig(
            workers=self._int_env("SWIPT_WORKERS", 1),
            log_level=os.environ.get("SWIPT_LOG_LEVEL", "WARNING").upper(),
            service_url=os.environ.get("SWIPT_SERVICE_URL", "http://localhost:8000"),
            request_timeout=self._int_env("SWIPT_REQUEST_TIMEOUT", 120),
        )

    @staticmethod
    def _int_env(name: str, default: int) -> int:
        value = os.environ.get(name)
        if value is None or value == "":
            return default
        try:
            parsed = int(value)
        except ValueError:
            raise ConfigError(f"{name} must be an integer, got {value!r}", field=name) from None
        if parsed < 1:
            raise ConfigError(f"{name} must be >= 1, got {parsed}", field=name)
        return parsed

    def get_environment(self) -> EnvironmentConfig:
        return self._environment

    def get_run_config(self, path: Optional[Union[str, Path]] = None) -> RunConfig:
        return load_run_config(path or DEFAULTS_FILE)


class ConfigurationManager:
    """Main configuration manager that coordinates all config components."""

    def __init__(self, config_manager: ConfigManagerInterface = None):
        self._config_manager = config_manager or DefaultConfigManager()

    @classmethod
    def from_env_file(cls, env_file: Optional[str] = None) -> "ConfigurationManager":
        return cls(DefaultConfigManager(env_file))

    def get_environment(self) -> EnvironmentConfig:
        return self._config_manager.get_environment()

    def get_run_config(self, path: Optional[Union[str, Path]] = None,
                       seed: Optional[int] = None) -> RunConfig:
        """Load a run configuration; ``seed`` overrides its master seed."""
        config = self._config_manager.get_run_config(path)
        if seed is not None:
            if not 0 <= seed < 2 ** 64:
                raise ConfigError(f"seed must be a 64-bit unsigned integer, got {seed}", field="master_seed")
            config = config.with_seed(seed)
        return config

    @staticmethod
    def configure_logging(level: str) -> None:
        logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING),
                            format="%(asctime)s %(levelname)s %(name)s: %(message)s")
