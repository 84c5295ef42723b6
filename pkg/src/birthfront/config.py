"""
Experiment configuration.

Experiments are configured with a YAML file, eg::

    model:
      name: fec_est
      cap: 3
      dispersal: "1 1 1 1 1 1 1"
      c_fec: 0.5
      c_est: 0.5
    schedule:
      t1: 100
      t2: 1000
      checkpoint_every: 10
    replication:
      n_runs: 20
      base_seed: 2022
      parallelism: 4
    out_dir: results

Every key is optional; the defaults reproduce the standard experiments at
desk scale. When no file is given the configuration is read from
``birthfront.yaml`` in the user config directory (see
https://pypi.org/project/appdirs/), if present.
"""
import dataclasses
import logging
import os.path
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml
from appdirs import user_config_dir

from birthfront.exceptions import ConfigurationError
from birthfront.models.base import RateModel
from birthfront.models.registry import registry
from birthfront.typing import ModelSpec

_logger = logging.getLogger(__name__)

CONFIG_FILENAME = "birthfront.yaml"

# horizon of the long speed curve
FULL_CURVE_T2 = 10000.0
FULL_SWEEP_COUNT = 1000

SWEEP_MODES = {"random", "grid"}


def default_model() -> ModelSpec:
    """
    The regulated model of the standard experiments.
    """
    return {
        "name": "fec_est",
        "cap": 3,
        "dispersal": "1 1 1 1 1 1 1",
        "establishment_shape": "0.5 1 0.5",
        "fecundity_shape": "0.5 1 0.5",
        "c_fec": 0.5,
        "c_est": 0.5,
    }


@dataclass
class Schedule:
    """When speeds are measured and observables recorded."""

    t1: float = 100.0
    t2: float = 1000.0
    checkpoint_every: float = 10.0


@dataclass
class Replication:
    """How many runs, and how they are seeded and distributed."""

    n_runs: int = 20
    base_seed: int = 2022
    parallelism: int = 1


@dataclass
class SweepSpec:

    """
    Parameters of the speed sweeps.

    ``mode`` is ``random`` for ``count`` seeded pairs in the unit square, or
    ``grid`` for a ``points`` by ``points`` grid; ``pairs`` overrides both.
    The speed curve fixes ``c_fec`` and uses ``points`` values of ``c_est``
    (or ``values``).
    """

    mode: str = "random"
    count: int = 100
    c_fec: float = 1.0
    points: int = 11
    pairs: Optional[List[Tuple[float, float]]] = None
    values: Optional[List[float]] = None


@dataclass
class FluctSpec:
    """Times and thresholds of the fluctuation study."""

    times: List[float] = field(default_factory=lambda: [250.0, 1000.0])
    concentration_times: List[float] = field(
        default_factory=lambda: [100.0, 400.0, 1600.0],
    )
    q_grid: List[float] = field(default_factory=lambda: [0.5, 1, 1.5, 2, 2.5, 3])
    delta: float = 0.1


@dataclass
class ValidateSpec:

    """
    Sizes of the validation suite.

    ``tolerance`` is the number of Monte Carlo standard errors allowed
    between simulation and exact values.
    """

    replicas: int = 10000
    martingale_replicas: int = 1000
    trials: int = 100000
    tolerance: float = 3.0


@dataclass
class ExperimentConfig:  # pylint: disable=too-many-instance-attributes

    """
    The full configuration of an experiment.
    """

    model: ModelSpec = field(default_factory=default_model)
    schedule: Schedule = field(default_factory=Schedule)
    replication: Replication = field(default_factory=Replication)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    fluct: FluctSpec = field(default_factory=FluctSpec)
    validate: ValidateSpec = field(default_factory=ValidateSpec)
    out_dir: Path = Path("results")
    full: bool = False

    def build_model(self, **overrides: Any) -> RateModel:
        """
        Instantiate the configured model, with optional parameter overrides.
        """
        return registry.build({**self.model, **overrides})


SECTIONS = {
    "schedule": Schedule,
    "replication": Replication,
    "sweep": SweepSpec,
    "fluct": FluctSpec,
    "validate": ValidateSpec,
}


def _section(name: str, values: Any) -> Any:
    section_class = SECTIONS[name]
    if values is None:
        return section_class()
    if not isinstance(values, dict):
        raise ConfigurationError(f"Section {name} should be a mapping")

    known = {field_.name for field_ in dataclasses.fields(section_class)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(
            f"Unknown keys in {name}: {', '.join(sorted(unknown))}",
        )
    return section_class(**values)


def _check_nonnegative(name: str, value: Any) -> None:
    if isinstance(value, bool):
        return
    if isinstance(value, (int, float)) and value < 0:
        raise ConfigurationError(f"{name} must be nonnegative, got {value}")


def validate(config: ExperimentConfig) -> ExperimentConfig:
    """
    Check the invariants of a configuration.
    """
    schedule = config.schedule
    if not 0 <= schedule.t1 < schedule.t2:
        raise ConfigurationError(
            f"Need 0 <= t1 < t2, got t1={schedule.t1} and t2={schedule.t2}",
        )
    if schedule.checkpoint_every <= 0:
        raise ConfigurationError("checkpoint_every must be positive")
    if config.replication.n_runs < 1:
        raise ConfigurationError("n_runs must be at least 1")
    if config.replication.parallelism < 1:
        raise ConfigurationError("parallelism must be at least 1")
    if config.sweep.mode not in SWEEP_MODES:
        raise ConfigurationError(f"Unknown sweep mode: {config.sweep.mode}")
    if config.sweep.count < 1 or config.sweep.points < 1:
        raise ConfigurationError("Sweeps need at least one point")

    for name, value in config.model.items():
        _check_nonnegative(f"model.{name}", value)
    for section in SECTIONS:
        for name, value in dataclasses.asdict(getattr(config, section)).items():
            _check_nonnegative(f"{section}.{name}", value)
    for c_fec, c_est in config.sweep.pairs or []:
        _check_nonnegative("sweep.pairs", c_fec)
        _check_nonnegative("sweep.pairs", c_est)
    for value in config.sweep.values or []:
        _check_nonnegative("sweep.values", value)

    return config


def from_dict(data: Optional[Dict[str, Any]]) -> ExperimentConfig:
    """
    Build a configuration from parsed YAML.
    """
    if data is not None and not isinstance(data, dict):
        raise ConfigurationError("The configuration should be a mapping")
    data = dict(data or {})
    unknown = set(data) - set(SECTIONS) - {"model", "out_dir"}
    if unknown:
        raise ConfigurationError(
            f"Unknown configuration keys: {', '.join(sorted(unknown))}",
        )

    model = data.get("model") or {}
    if not isinstance(model, dict):
        raise ConfigurationError("Section model should be a mapping")
    if model.get("name", "fec_est") == "fec_est":
        model = {**default_model(), **model}

    try:
        config = ExperimentConfig(
            model=model,
            out_dir=Path(data.get("out_dir", "results")),
            **{name: _section(name, data.get(name)) for name in SECTIONS},
        )
    except TypeError as ex:
        raise ConfigurationError(f"Invalid configuration: {ex}") from ex

    return validate(config)


def load_config(path: Optional[Union[str, Path]] = None) -> ExperimentConfig:
    """
    Load a configuration file.

    An explicit path must exist and be valid. Without a path the file in the
    user config directory is used if it exists; if it can't be read the
    defaults are used.
    """
    if path is not None:
        try:
            with open(path, encoding="utf-8") as stream:
                data = yaml.load(stream, Loader=yaml.SafeLoader)
        except (OSError, yaml.YAMLError) as ex:
            raise ConfigurationError(f"Unable to load configuration {path}") from ex
        return from_dict(data)

    config_path = Path(user_config_dir("birthfront")) / CONFIG_FILENAME
    data = None
    if os.path.exists(config_path):
        try:
            with open(config_path, encoding="utf-8") as stream:
                data = yaml.load(stream, Loader=yaml.SafeLoader)
        except (PermissionError, yaml.parser.ParserError, yaml.scanner.ScannerError):
            _logger.exception("Unable to load configuration file")

    return from_dict(data)


def apply_overrides(  # pylint: disable=too-many-arguments
    config: ExperimentConfig,
    seed: Optional[int] = None,
    out_dir: Optional[Union[str, Path]] = None,
    replicas: Optional[int] = None,
    parallelism: Optional[int] = None,
    full: bool = False,
) -> ExperimentConfig:
    """
    Apply command-line overrides to a configuration.
    """
    replication = config.replication
    if seed is not None:
        replication = dataclasses.replace(replication, base_seed=seed)
    if replicas is not None:
        replication = dataclasses.replace(replication, n_runs=replicas)
    if parallelism is not None:
        replication = dataclasses.replace(replication, parallelism=parallelism)

    sweep = config.sweep
    if full:
        sweep = dataclasses.replace(sweep, count=FULL_SWEEP_COUNT)

    return validate(
        dataclasses.replace(
            config,
            replication=replication,
            sweep=sweep,
            out_dir=Path(out_dir) if out_dir is not None else config.out_dir,
            full=config.full or full,
        ),
    )
