"""`zeitlin steady`: bouw een stationaire toestand en schrijf hem als JSON."""

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from src.algebra import get_spin_basis, norm
from src.commands.common import CommandContext
from src.steady import eigen_state, newton_functional_state, zonal_state
from src.storage import write_json

logger = logging.getLogger(__name__)


class SteadyCommand(BaseModel):
    """Bouw een stationaire toestand: zonal (d), eigenstate (l, coeffs) of newton (f, d_init)."""

    n: int | None = Field(None, alias="size")
    mode: Literal["zonal", "eigenstate", "newton"] | None = None
    l: int | None = Field(None, alias="degree")
    coeffs: list[float] | None = None
    d: list[float] | None = Field(None, alias="diag")
    f: list[float] | None = Field(None, alias="poly")
    d_init: list[float] | None = None
    max_iter: int | None = None

    def run(self, ctx: CommandContext) -> int:
        config = ctx.merged(self)
        basis = get_spin_basis(config.n)

        match config.mode:
            case "zonal":
                if config.d is None:
                    raise ValueError("mode 'zonal' vereist d")
                state = zonal_state(basis, np.array(config.d))
            case "eigenstate":
                if config.l is None:
                    raise ValueError("mode 'eigenstate' vereist l")
                coeffs = None if config.coeffs is None else np.array(config.coeffs)
                state = eigen_state(basis, config.l, coeffs)
            case "newton":
                if config.f is None:
                    raise ValueError("mode 'newton' vereist f")
                # Standaardstart: het spectrum van -iX3
                if config.d_init is not None:
                    d_init = np.array(config.d_init)
                else:
                    d_init = np.real(np.diag(-1j * basis.X[2]))
                tol = ctx.tol if ctx.tol is not None else config.tol
                state = newton_functional_state(basis, config.f, d_init, config.max_iter, tol)
            case _:
                raise ValueError("Geen mode opgegeven (zonal, eigenstate of newton)")

        path = write_json(ctx.out / f"state_{config.mode}.json", state, config)
        print(f"state={path} norm_W0={norm(state.W0):.6g}")
        return 0
