# reading and writing graphs, SEMs, results and datasets
# JSON for structured objects, CSV plus a roles sidecar for data

"""backdoorforge.export

JSON helpers for everything with a `to_dict()` method (GraphSpec, LinearSem,
DiscoveryConfig, DiscoveryResult, EntnerResult) and CSV helpers for datasets.

A dataset is written as a CSV whose header holds the column ids, next to a
roles sidecar JSON (`<name>.roles.json`) mapping each column id to its role
and optional block.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional, Protocol, Union

import numpy as np
import pandas as pd

from .discovery import DiscoveryConfig, DiscoveryResult
from .errors import ConfigError
from .models import ROLES, Column, Dataset, GraphSpec
from .sem import LinearSem

PathLike = Union[str, Path]


class _Serializable(Protocol):
    def to_dict(self) -> Dict[str, Any]: ...


def to_json(obj: _Serializable, *, indent: int = 2) -> str:
    """Serialize an object with `to_dict()` to a JSON string (sorted keys)."""
    return json.dumps(obj.to_dict(), indent=indent, sort_keys=True)


def save_json(obj: _Serializable, path: PathLike, *, indent: int = 2) -> None:
    """Serialize an object with `to_dict()` and write it to disk."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_json(obj, indent=indent))
        f.write("\n")


def read_json(path: PathLike) -> Dict[str, Any]:
    """Read a JSON object from disk.

    Raises:
        ConfigError: If the file does not hold a JSON object.
    """
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data


def load_graph(path: PathLike) -> GraphSpec:
    """Load a GraphSpec written by `save_json`."""
    return GraphSpec.from_dict(read_json(path))


def load_sem(path: PathLike) -> LinearSem:
    """Load a LinearSem written by `save_json`."""
    return LinearSem.from_dict(read_json(path))


def load_config(path: PathLike) -> DiscoveryConfig:
    """Load a DiscoveryConfig written by `save_json`."""
    return DiscoveryConfig.from_dict(read_json(path))


def load_result(path: PathLike) -> DiscoveryResult:
    """Load a DiscoveryResult written by `save_json`."""
    return DiscoveryResult.from_dict(read_json(path))


def roles_path_for(csv_path: PathLike) -> Path:
    """Default roles sidecar location for a dataset CSV."""
    p = Path(csv_path)
    return p.with_name(p.stem + ".roles.json")


def save_dataset_csv(
    data: Dataset, path: PathLike, *, roles_path: Optional[PathLike] = None
) -> Path:
    """Write a dataset as CSV plus its roles sidecar.

    Args:
        data: Dataset to write.
        path: CSV path.
        roles_path: Sidecar path (defaults to `roles_path_for(path)`).

    Returns:
        The sidecar path.
    """
    frame = pd.DataFrame(data.matrix, columns=list(data.ids))
    frame.to_csv(path, index=False, float_format="%.17g")
    sidecar = Path(roles_path) if roles_path is not None else roles_path_for(path)
    roles = {
        c.id: ({"role": c.role, "block": c.block} if c.block else {"role": c.role})
        for c in data.columns
    }
    with open(sidecar, "w", encoding="utf-8") as f:
        json.dump({"columns": roles}, f, indent=2)
        f.write("\n")
    return sidecar


def _parse_roles(raw: Dict[str, Any]) -> Dict[str, Column]:
    table = raw.get("columns", raw)
    out: Dict[str, Column] = {}
    for cid, spec in table.items():
        if isinstance(spec, str):
            role, block = spec, None
        else:
            role, block = spec["role"], spec.get("block")
        if role not in ROLES or role == "U":
            raise ConfigError(f"column {cid!r}: role must be one of W, X, Y, Z")
        out[str(cid)] = Column(id=str(cid), role=role, block=block)
    return out


def load_dataset_csv(
    path: PathLike, *, roles_path: Optional[PathLike] = None
) -> Dataset:
    """Read a dataset CSV and its roles sidecar.

    The sidecar maps column id to a role string or to `{"role", "block"}`,
    optionally nested under a `"columns"` key. Columns without a role are
    dropped.

    Raises:
        ConfigError: If a role is invalid or a listed column is missing.
    """
    frame = pd.read_csv(path, float_precision="round_trip")
    sidecar = Path(roles_path) if roles_path is not None else roles_path_for(path)
    roles = _parse_roles(read_json(sidecar))
    missing = [c for c in roles if c not in frame.columns]
    if missing:
        raise ConfigError(f"roles file lists columns missing from the CSV: {missing}")
    ids = [str(c) for c in frame.columns if str(c) in roles]
    matrix = frame[ids].to_numpy(dtype=float)
    if not np.all(np.isfinite(matrix)):
        raise ConfigError(f"{path}: non-numeric or missing values")
    return Dataset(matrix=matrix, columns=tuple(roles[c] for c in ids))
