"""Gedeelde context voor de subcommando's: configuratie, uitvoermap en toestandsbestanden."""

import logging
import math
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from src.algebra import SpinBasis, get_spin_basis
from src.config import Tolerances, settings
from src.models import ExperimentConfig, SteadyState
from src.steady import validate_steady
from src.storage import read_json

logger = logging.getLogger(__name__)


class CommandContext(BaseModel):
    model_config = ConfigDict(frozen=True)

    config: ExperimentConfig
    out: Path
    seed: int | None = None
    tol: float | None = None

    @property
    def tolerances(self) -> Tolerances:
        return self.config.tolerances or settings.tolerances

    def merged(self, command: BaseModel, exclude: set[str] | None = None) -> ExperimentConfig:
        """Config uit --config, overschreven door expliciet gezette subcommando-flags."""
        overrides = command.model_dump(exclude_none=True, exclude=exclude)
        return ExperimentConfig.model_validate(self.config.model_dump() | overrides)


def load_context(config_path: Path | None, out: Path, seed: int | None, tol: float | None) -> CommandContext:
    if config_path is None:
        config = ExperimentConfig()
    else:
        config = read_json(config_path, ExperimentConfig)
        logger.info(f"Configuratie geladen: {config_path}")
    return CommandContext(config=config, out=out, seed=seed, tol=tol)


def load_state(path: Path, tolerances: Tolerances) -> tuple[SpinBasis, SteadyState]:
    """Lees een SteadyState-bestand en valideer het opnieuw."""
    stored = read_json(path, SteadyState)
    basis = get_spin_basis(stored.n)
    state = validate_steady(basis, stored.W0, stored.P0, stored.provenance, tolerances)
    return basis, state


def format_value(value: float) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.6g}"
