"""
Declarative experiment configuration

An experiment file is YAML with one optional mapping per section; missing
keys take the defaults below (the reference 64-subcarrier WLAN setup with a
3 ms latency budget). Unknown keys are rejected.
"""

import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar, Union

import yaml

from jscc_sim.core.artifacts import config_hash
from jscc_sim.core.errors import ConfigError, JsccSimError
from jscc_sim.core.types import OfdmConfig
from jscc_sim.precoder.covariance import CORRELATION_FORMS, HERMITIAN
from jscc_sim.streamer.pipeline import DISCRETE_EVENT, WALL_CLOCK

logger = logging.getLogger(__name__)

KINDS = ("papr", "correlation", "precode", "e2e", "schedule", "stream")
OUTPUT_ENV = "JSCC_SIM_OUT"

T = TypeVar("T")


@dataclass
class FeatureSettings:
    """Synthetic source parameters or a feature file"""
    height: int = 16
    width: int = 16
    channels: int = 8
    rho: float = 0.9
    sigma: float = 0.5
    n_blocks: int = 20
    clip: bool = True
    path: Optional[str] = None
    # e2e adds a variant sent and decoded at half precision
    quantize: bool = False


@dataclass
class DeepFadeSettings:
    center: int = 10
    width: int = 4
    depth_db: float = 20.0


@dataclass
class ChannelSettings:
    n_taps: int = 4
    decay: float = 0.5
    snr_db: List[float] = field(default_factory=lambda: [0.0, 10.0, 20.0, 30.0])
    deep_fade: Optional[DeepFadeSettings] = None
    perfect_csi: bool = False
    pa_backoff: Optional[float] = None


@dataclass
class PrecoderSettings:
    """``omega`` is relative: 1.0 balances both objective terms at V = I"""
    enabled: bool = True
    omega: float = 0.1
    n_inits: int = 8
    max_sweeps: int = 20
    tol: float = 1e-6
    coherence: Optional[int] = None
    form: str = HERMITIAN
    p_t: float = 1.0
    matrix_path: Optional[str] = None
    workers: Optional[int] = None


@dataclass
class BudgetSettings:
    t_max: float = 3e-3
    t_max_values: List[float] = field(default_factory=lambda: [1e-3, 2e-3, 3e-3, 4e-3, 5e-3])
    bandwidths: Optional[List[float]] = None
    # schedule also writes the error with each single channel masked
    masking: bool = False


@dataclass
class StreamSettings:
    frame_rate: float = 30.0
    buffer_capacity: int = 2
    encode_time: float = 0.005
    encode_jitter: float = 0.0
    transmit_time: float = 0.005
    transmit_jitter: float = 0.0
    decode_time: float = 0.0
    channel_wait: float = 0.0
    n_frames: int = 100
    mode: str = DISCRETE_EVENT
    # Run the modem and channel inside the transmit stage
    modem: bool = False


@dataclass
class ExperimentConfig:
    kind: str = "e2e"
    seed: int = 0
    output_dir: Optional[str] = None
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    features: FeatureSettings = field(default_factory=FeatureSettings)
    channel: ChannelSettings = field(default_factory=ChannelSettings)
    precoder: PrecoderSettings = field(default_factory=PrecoderSettings)
    budget: BudgetSettings = field(default_factory=BudgetSettings)
    stream: StreamSettings = field(default_factory=StreamSettings)

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}, expected one of {KINDS}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.features.n_blocks < 1:
            raise ConfigError("features.n_blocks must be >= 1")
        if self.precoder.form not in CORRELATION_FORMS:
            raise ConfigError(f"precoder.form must be one of {CORRELATION_FORMS}")
        if self.precoder.omega < 0:
            raise ConfigError("precoder.omega must be non-negative")
        if self.stream.mode not in (DISCRETE_EVENT, WALL_CLOCK):
            raise ConfigError(f"stream.mode must be {DISCRETE_EVENT!r} or {WALL_CLOCK!r}")
        if not self.channel.snr_db:
            raise ConfigError("channel.snr_db needs at least one value")
        if any(math.isnan(s) for s in self.channel.snr_db):
            raise ConfigError("channel.snr_db contains NaN")
        for label, path in (("features.path", self.features.path),
                            ("precoder.matrix_path", self.precoder.matrix_path)):
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{label} {path} does not exist")

    @classmethod
    def default(cls, kind: str) -> "ExperimentConfig":
        return cls(kind=kind)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> "ExperimentConfig":
        """
        Build from a parsed YAML mapping

        Relative file paths are resolved against ``base_dir``.
        """
        if not isinstance(data, dict):
            raise ConfigError("experiment config must be a mapping")
        _reject_unknown(cls, data, "experiment")
        data = dict(data)
        try:
            ofdm = OfdmConfig.from_dict(data.pop("ofdm", None) or {})
            features = _section(FeatureSettings, data.pop("features", None), "features")
            channel_data = dict(data.pop("channel", None) or {})
            fade = channel_data.pop("deep_fade", None)
            if "snr_db" in channel_data and not isinstance(channel_data["snr_db"], list):
                channel_data["snr_db"] = [channel_data["snr_db"]]
            channel = _section(ChannelSettings, channel_data, "channel")
            channel.snr_db = [float(s) for s in channel.snr_db]
            if fade is not None:
                channel.deep_fade = _section(DeepFadeSettings, fade, "channel.deep_fade")
            precoder = _section(PrecoderSettings, data.pop("precoder", None), "precoder")
            budget = _section(BudgetSettings, data.pop("budget", None), "budget")
            stream = _section(StreamSettings, data.pop("stream", None), "stream")
        except JsccSimError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid config value: {e}") from e

        if base_dir is not None:
            features.path = _resolve(features.path, base_dir)
            precoder.matrix_path = _resolve(precoder.matrix_path, base_dir)

        return cls(ofdm=ofdm, features=features, channel=channel, precoder=precoder,
                   budget=budget, stream=stream, **data)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["ofdm"] = self.ofdm.to_dict()
        return data

    def config_hash(self) -> str:
        """
        Hash of the settings that determine results

        Output directory and seed are excluded (the seed is stamped separately),
        as is the kind, so a config without a kind key verifies any artifact.
        """
        data = self.to_dict()
        data.pop("output_dir", None)
        data.pop("seed", None)
        data.pop("kind", None)
        return config_hash(data)

    def resolve_output_dir(self) -> Path:
        """output_dir, else $JSCC_SIM_OUT, else ./results"""
        chosen = self.output_dir or os.environ.get(OUTPUT_ENV) or "results"
        return Path(chosen)


def _reject_unknown(cls: Type[Any], data: Dict[str, Any], section: str) -> None:
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown {section} keys: {sorted(unknown)}")


def _section(cls: Type[T], data: Optional[Dict[str, Any]], section: str) -> T:
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    _reject_unknown(cls, data, section)
    return cls(**data)


def _resolve(path: Optional[str], base_dir: Path) -> Optional[str]:
    if path is None:
        return None
    candidate = Path(path)
    if not candidate.is_absolute():
        candidate = base_dir / candidate
    return str(candidate)


def load_experiment_config(path: Union[str, Path], seed: Optional[int] = None,
                           output_dir: Optional[str] = None, kind: Optional[str] = None) -> ExperimentConfig:
    """
    Load a YAML experiment file

    Args:
        path: Config file
        seed: Overrides the file's seed
        output_dir: Overrides the file's output directory
        kind: Used when the file names no kind

    Raises:
        ConfigError: unreadable YAML, unknown keys or invalid values
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if seed is not None:
        data["seed"] = seed
    if output_dir is not None:
        data["output_dir"] = output_dir
    if kind is not None:
        data.setdefault("kind", kind)
    config = ExperimentConfig.from_dict(data, base_dir=path.parent)
    logger.debug("Loaded %s experiment from %s (hash %s)", config.kind, path, config.config_hash())
    return config


def default_config_yaml(kind: str) -> str:
    """Commented default config for ``init-config``"""
    if kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}, expected one of {KINDS}")
    config = ExperimentConfig.default(kind)
    header = (
        f"# jscc-sim {kind} experiment\n"
        "# Every key is optional; omitted keys keep the values shown here.\n"
        "# Relative paths are resolved against this file's directory.\n"
        f"# Output directory falls back to ${OUTPUT_ENV}, then ./results.\n"
    )
    return header + yaml.safe_dump(config.to_dict(), sort_keys=False)
