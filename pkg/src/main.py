"""Zeitlin-stabiliteit — command-line interface.

Subcommando's: steady, certify, rigidity, evolve, render, basis.
Exit codes: 0 succes, 1 invoerfout, 2 solver divergeert, 3 integrator faalt.
"""

import logging
import sys
from pathlib import Path

from pydantic import PrivateAttr, ValidationError
from pydantic_settings import (
    BaseSettings,
    CliApp,
    CliSubCommand,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    SettingsError,
    get_subcommand,
)

from src.commands.basis import BasisCommand
from src.commands.certify import CertifyCommand
from src.commands.common import load_context
from src.commands.evolve import EvolveCommand
from src.commands.render import RenderCommand
from src.commands.rigidity import RigidityCommand
from src.commands.steady import SteadyCommand
from src.config import settings
from src.exceptions import DivergenceError, IntegratorError, SingularJacobianError, ZeitlinError

# Logging
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger(__name__)


class ZeitlinCli(BaseSettings):
    """Zeitlin su(n) model: stationaire toestanden, stabiliteit, rigiditeit en integratie."""

    config: Path | None = None
    out: Path = Path("out")
    seed: int | None = None
    tol: float | None = None

    steady: CliSubCommand[SteadyCommand]
    certify: CliSubCommand[CertifyCommand]
    rigidity: CliSubCommand[RigidityCommand]
    evolve: CliSubCommand[EvolveCommand]
    render: CliSubCommand[RenderCommand]
    basis: CliSubCommand[BasisCommand]

    model_config = SettingsConfigDict(cli_prog_name="zeitlin", cli_implicit_flags=True, extra="forbid")

    _exit_code: int = PrivateAttr(0)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # Alleen de command line; geen omgevingsvariabelen
        return (init_settings,)

    @property
    def exit_code(self) -> int:
        return self._exit_code

    def cli_cmd(self) -> None:
        command = get_subcommand(self, is_required=True, cli_exit_on_error=False)
        ctx = load_context(self.config, self.out, self.seed, self.tol)
        logger.info(f"Start {type(command).__name__} (uitvoer: {self.out})")
        self._exit_code = command.run(ctx)


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    try:
        app = CliApp.run(ZeitlinCli, cli_args=args, cli_exit_on_error=False)
        return app.exit_code
    except (DivergenceError, SingularJacobianError) as exc:
        logger.error(f"Solver divergeert: {exc}")
        return 2
    except IntegratorError as exc:
        logger.error(f"Integrator faalt: {exc}")
        return 3
    except (SettingsError, ValidationError, ZeitlinError, ValueError, OSError) as exc:
        logger.error(f"Ongeldige invoer: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
