"""Bestandsopslag: JSON-records, monitor-CSV en metadata-sidecars.

Primaire uitvoer is deterministisch; tijdstempels staan alleen in <bestand>.meta.json.
"""

import hashlib
import json
import logging
from datetime import UTC, datetime
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import TextIO, TypeVar

import numpy as np
from pydantic import BaseModel

from src.models import MatrixPayload, MonitorRow

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

PACKAGE_NAME = "zeitlin-stability"


def _package_version() -> str:
    try:
        return version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "onbekend"


def config_hash(config: BaseModel | None) -> str | None:
    if config is None:
        return None
    return hashlib.sha256(config.model_dump_json().encode()).hexdigest()


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def write_json(path: Path, record: BaseModel, config: BaseModel | None = None) -> Path:
    """Schrijf een record als JSON plus een metadata-sidecar."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(record.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")
    write_meta(path, config)
    logger.info(f"Geschreven: {path}")
    return path


def read_json(path: Path, model: type[ModelT]) -> ModelT:
    return model.model_validate_json(path.read_text(encoding="utf-8"))


def read_matrix(path: Path) -> np.ndarray:
    """Lees een losse matrix-JSON of de W0 uit een SteadyState-bestand."""
    data = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(data, dict) and "W0" in data:
        data = data["W0"]
    return MatrixPayload.model_validate(data).to_array()


def write_meta(path: Path, config: BaseModel | None = None) -> Path:
    meta_path = path.with_name(path.name + ".meta.json")
    meta = {
        "file": path.name,
        "created_at": datetime.now(UTC).isoformat(),
        "version": _package_version(),
        "config_hash": config_hash(config),
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8", newline="\n")
    return meta_path


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    return format(value, ".17g")


def monitor_header(casimir_max: int) -> str:
    casimir_cols = [f"C{k}" for k in range(2, casimir_max + 1)]
    return ",".join(["t", "H", *casimir_cols, "L1", "L2", "L3", "spec_drift", "dist"])


def format_row(row: MonitorRow) -> str:
    values = [row.t, row.H, *row.casimirs, *row.momentum, row.spec_drift]
    dist = "" if row.dist is None else _fmt(row.dist)
    return ",".join([*(_fmt(v) for v in values), dist])


class MonitorCsvWriter:
    """Streamt monitorregels naar CSV; bruikbaar als sink voor evolve."""

    def __init__(self, path: Path, casimir_max: int):
        path.parent.mkdir(parents=True, exist_ok=True)
        self.path = path
        self.rows = 0
        self._handle: TextIO = path.open("w", encoding="utf-8", newline="\n")
        self._handle.write(monitor_header(casimir_max) + "\n")

    def __call__(self, row: MonitorRow) -> None:
        self._handle.write(format_row(row) + "\n")
        self.rows += 1

    def abort(self, step: int) -> None:
        self._handle.write(f"# aborted at step {step}\n")
        self._handle.flush()

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> "MonitorCsvWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def write_field_csv(path: Path, theta: np.ndarray, phi: np.ndarray, field: np.ndarray) -> Path:
    """CSV `theta,phi,w`, θ als buitenste lus."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write("theta,phi,w\n")
        for i, t in enumerate(theta):
            for j, p in enumerate(phi):
                handle.write(f"{_fmt(t)},{_fmt(p)},{_fmt(field[i, j])}\n")
    logger.info(f"Veld geschreven: {path}")
    return path
