"""
Reproducible artifact files

Every CSV artifact starts with a comment line carrying the config hash and
seed, ``# config_hash=<hex> seed=<n>``; YAML records carry the same two keys.
"""

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple, Union

import yaml

from jscc_sim.core.errors import ConfigHashMismatchError, FormatError

PathLike = Union[str, Path]


def config_hash(data: Dict[str, Any]) -> str:
    """First 16 hex digits of SHA-256 over the sorted-key compact JSON form"""
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def derive_seed(base_seed: int, task_index: int) -> int:
    """Independent seed for task ``task_index``: first 8 bytes of SHA-256(base, index)"""
    digest = hashlib.sha256(f"{int(base_seed)}:{int(task_index)}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence[Any]],
              hash_value: str, seed: int) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as f:
        f.write(f"# config_hash={hash_value} seed={seed}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])
    return path


def _format_cell(value: Any) -> Any:
    # repr keeps full float precision and identical text across runs
    if isinstance(value, float):
        return repr(value)
    return value


def write_yaml(path: PathLike, record: Dict[str, Any], hash_value: str, seed: int) -> Path:
    path = Path(path)
    body = {"config_hash": hash_value, "seed": seed}
    body.update(record)
    path.write_text(yaml.safe_dump(body, sort_keys=False))
    return path


def read_artifact_stamp(path: PathLike) -> Tuple[str, Optional[int]]:
    """
    (config_hash, seed) embedded in a CSV or YAML artifact

    Raises:
        FormatError: the file carries no stamp
    """
    path = Path(path)
    if path.suffix in (".yaml", ".yml"):
        record = yaml.safe_load(path.read_text())
        if not isinstance(record, dict) or "config_hash" not in record:
            raise FormatError(f"{path}: no config_hash key")
        seed = record.get("seed")
        return str(record["config_hash"]), int(seed) if seed is not None else None

    try:
        with open(path, encoding="utf-8") as f:
            first = f.readline().strip()
    except UnicodeDecodeError as e:
        raise FormatError(f"{path}: not a text artifact") from e
    if not first.startswith("#"):
        raise FormatError(f"{path}: missing '# config_hash=...' header line")
    fields = dict(part.split("=", 1) for part in first[1:].split() if "=" in part)
    if "config_hash" not in fields:
        raise FormatError(f"{path}: header line has no config_hash")
    seed = fields.get("seed")
    return fields["config_hash"], int(seed) if seed not in (None, "None") else None


def verify_artifact(path: PathLike, expected_hash: str) -> None:
    """Raise ConfigHashMismatchError unless the artifact was produced by ``expected_hash``"""
    found, _ = read_artifact_stamp(path)
    if found != expected_hash:
        raise ConfigHashMismatchError(f"{path}: config hash {found} does not match {expected_hash}")
