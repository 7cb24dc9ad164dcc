"""Named metric collection with YAML and CSV export"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import yaml

from jscc_sim.core.artifacts import write_csv, write_yaml
from jscc_sim.core.errors import FormatError, UndefinedMetricError
from jscc_sim.metrics.quality import SATURATION_DB

logger = logging.getLogger(__name__)

MetricValue = Union[float, List[float]]


@dataclass
class MetricEntry:
    value: MetricValue
    unit: str = ""
    saturated: bool = False


@dataclass
class MetricsReport:
    """Scalar and vector metrics of one experiment run"""
    config_hash: str
    seed: int
    entries: Dict[str, MetricEntry] = field(default_factory=dict)

    def add(self, name: str, value: Any, unit: str = "", saturated: bool = False) -> None:
        """
        Record a metric

        dB values at the saturation clamp are flagged automatically. Any
        non-finite value must come flagged as saturated.
        """
        if isinstance(value, (list, tuple, np.ndarray)):
            stored: MetricValue = [float(v) for v in np.asarray(value, dtype=np.float64).reshape(-1)]
            values = stored
        else:
            stored = float(value)
            values = [stored]
        if unit == "dB" and any(v >= SATURATION_DB for v in values):
            saturated = True
        if not saturated and not all(math.isfinite(v) for v in values):
            raise UndefinedMetricError(f"metric {name!r} is not finite")
        if saturated:
            logger.warning("Metric %s saturated", name)
        self.entries[name] = MetricEntry(value=stored, unit=unit, saturated=saturated)

    def get(self, name: str) -> MetricValue:
        return self.entries[name].value

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def to_dict(self) -> Dict[str, Any]:
        return {
            name: {"value": entry.value, "unit": entry.unit, "saturated": entry.saturated}
            for name, entry in self.entries.items()
        }

    def to_yaml(self, path: Union[str, Path]) -> Path:
        return write_yaml(path, {"metrics": self.to_dict()}, self.config_hash, self.seed)

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "MetricsReport":
        record = yaml.safe_load(Path(path).read_text())
        if not isinstance(record, dict) or "metrics" not in record:
            raise FormatError(f"{path}: not a metrics report")
        report = cls(config_hash=str(record.get("config_hash", "")), seed=int(record.get("seed", 0)))
        for name, item in (record["metrics"] or {}).items():
            report.entries[name] = MetricEntry(value=item["value"], unit=item.get("unit", ""),
                                               saturated=bool(item.get("saturated", False)))
        return report

    def to_csv(self, path: Union[str, Path]) -> Path:
        """One row per scalar, one row per element of a vector metric"""
        rows = []
        for name, entry in self.entries.items():
            values = entry.value if isinstance(entry.value, list) else [entry.value]
            for index, value in enumerate(values):
                rows.append((name, index, value, entry.unit, int(entry.saturated)))
        return write_csv(path, ("metric", "index", "value", "unit", "saturated"), rows,
                         self.config_hash, self.seed)
