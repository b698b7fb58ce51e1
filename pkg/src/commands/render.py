"""`zeitlin render <matrix>`: veld op een (θ, φ)-rooster als CSV."""

from pathlib import Path

from pydantic import BaseModel
from pydantic_settings import CliPositionalArg

from src.algebra import get_spin_basis, validate_element
from src.commands.common import CommandContext
from src.render import render_field
from src.storage import read_matrix, write_field_csv, write_meta


class RenderCommand(BaseModel):
    """Render een toestand of snapshot: CSV theta,phi,w."""

    matrix_file: CliPositionalArg[Path]
    n_theta: int | None = None
    n_phi: int | None = None
    l_max: int | None = None

    def run(self, ctx: CommandContext) -> int:
        config = ctx.merged(self, exclude={"matrix_file"})
        W = validate_element(read_matrix(self.matrix_file), tol=ctx.tolerances.element)
        basis = get_spin_basis(W.shape[0])

        theta, phi, field = render_field(basis, W, config.n_theta, config.n_phi, config.l_max)
        path = write_field_csv(ctx.out / f"{self.matrix_file.stem}_field.csv", theta, phi, field)
        write_meta(path, config)
        print(f"csv={path} grid={config.n_theta}x{config.n_phi}")
        return 0
