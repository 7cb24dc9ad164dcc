"""Core types and data structures for jscc-sim"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Tuple

from jscc_sim.core.artifacts import config_hash
from jscc_sim.core.errors import ConfigError

# 802.11a-style plan: active carriers -26..26 without DC, pilots at +-7 and +-21
_WLAN_PILOTS = (-21, -7, 7, 21)
_WLAN_ACTIVE = tuple(k for k in range(-26, 27) if k != 0)


def _wlan_data_bins(n_subcarriers: int) -> Tuple[int, ...]:
    return tuple(k % n_subcarriers for k in _WLAN_ACTIVE if k not in _WLAN_PILOTS)


def _wlan_pilot_bins(n_subcarriers: int) -> Tuple[int, ...]:
    return tuple(k % n_subcarriers for k in _WLAN_PILOTS)


@dataclass(frozen=True)
class OfdmConfig:
    """
    Subcarrier plan and timing of the OFDM waveform

    Subcarrier indices are FFT bins in [0, K). Bins at or above K/2 carry
    negative frequencies; physical distances between subcarriers are taken
    on the signed frequency index (see ``frequency_index``).
    """
    n_subcarriers: int = 64
    cp_length: int = 16
    bandwidth: float = 10e6
    data_indices: Tuple[int, ...] = field(default_factory=lambda: _wlan_data_bins(64))
    pilot_indices: Tuple[int, ...] = field(default_factory=lambda: _wlan_pilot_bins(64))
    pilot_values: Tuple[complex, ...] = (1 + 0j, -1 + 0j, 1 + 0j, -1 + 0j)
    preamble_repeats: int = 2

    def __post_init__(self) -> None:
        # Normalize sequences so configs built from YAML lists stay hashable
        object.__setattr__(self, "data_indices", tuple(int(i) for i in self.data_indices))
        object.__setattr__(self, "pilot_indices", tuple(int(i) for i in self.pilot_indices))
        object.__setattr__(self, "pilot_values", tuple(complex(p) for p in self.pilot_values))
        self._validate()

    def _validate(self) -> None:
        K = self.n_subcarriers
        if K < 2:
            raise ConfigError(f"n_subcarriers must be >= 2, got {K}")
        if not 0 < self.cp_length < K:
            raise ConfigError(f"cp_length must satisfy 0 < L < K, got L={self.cp_length}, K={K}")
        if self.bandwidth <= 0:
            raise ConfigError(f"bandwidth must be positive, got {self.bandwidth}")
        if not self.data_indices:
            raise ConfigError("at least one data subcarrier is required")
        if self.preamble_repeats < 0:
            raise ConfigError(f"preamble_repeats must be >= 0, got {self.preamble_repeats}")

        used = list(self.data_indices) + list(self.pilot_indices)
        if any(not 0 <= i < K for i in used):
            raise ConfigError(f"subcarrier indices must lie in [0, {K})")
        if len(set(used)) != len(used):
            raise ConfigError("data and pilot indices must be distinct")
        if len(self.pilot_values) != len(self.pilot_indices):
            raise ConfigError(
                f"{len(self.pilot_indices)} pilot indices but {len(self.pilot_values)} pilot values"
            )

    @classmethod
    def wlan_default(cls, **overrides: Any) -> "OfdmConfig":
        """Legacy 64-subcarrier WLAN plan: 48 data, 4 pilots, DC and band edges unused"""
        return cls(**overrides)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OfdmConfig":
        """
        Build from a YAML mapping

        The WLAN subcarrier plan is only a default at K=64; any other
        n_subcarriers must come with data_indices and pilot_indices.
        """
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown ofdm keys: {sorted(unknown)}")
        K = data.get("n_subcarriers", 64)
        missing = [key for key in ("data_indices", "pilot_indices") if key not in data]
        if K != 64 and missing:
            raise ConfigError(f"n_subcarriers={K} has no default subcarrier plan; set {missing}")
        values = dict(data)
        if "pilot_values" in values:
            values["pilot_values"] = tuple(_parse_complex(v) for v in values["pilot_values"])
        return cls(**values)

    @property
    def n_data(self) -> int:
        """K_d"""
        return len(self.data_indices)

    @property
    def n_pilots(self) -> int:
        """K_p"""
        return len(self.pilot_indices)

    @property
    def n_unused(self) -> int:
        return self.n_subcarriers - self.n_data - self.n_pilots

    @property
    def symbol_length(self) -> int:
        """Samples per CP-extended OFDM symbol (K + L)"""
        return self.n_subcarriers + self.cp_length

    @property
    def symbol_duration(self) -> float:
        """Seconds per CP-extended OFDM symbol"""
        return self.symbol_length / self.bandwidth

    @property
    def preamble_duration(self) -> float:
        """T_p = preamble_repeats * (K + L) / B"""
        return self.preamble_repeats * self.symbol_duration

    @property
    def subcarrier_spacing(self) -> float:
        return self.bandwidth / self.n_subcarriers

    def frequency_index(self, bin_index: int) -> int:
        """Signed frequency number of an FFT bin (bin K-1 is frequency -1)"""
        K = self.n_subcarriers
        return bin_index if bin_index < K // 2 else bin_index - K

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["data_indices"] = list(self.data_indices)
        data["pilot_indices"] = list(self.pilot_indices)
        data["pilot_values"] = [[p.real, p.imag] for p in self.pilot_values]
        return data

    def config_digest(self) -> str:
        """Stable 16-hex-digit hash identifying this plan"""
        return config_hash(self.to_dict())


def _parse_complex(value: Any) -> complex:
    # YAML has no complex type; accept numbers, [re, im] pairs and "1-1j" strings
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex pair must have two entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError as e:
            raise ConfigError(f"cannot parse complex value {value!r}") from e
    return complex(value)
