"""`zeitlin basis`: X1, X2, X3 en het spectrum van Δn ter inspectie."""

from pydantic import BaseModel, Field

from src.algebra import get_spin_basis, laplacian_spectrum
from src.commands.common import CommandContext
from src.models import BasisDump, LaplacianLevel
from src.storage import write_json


class BasisCommand(BaseModel):
    """Dump de spinbasis en het Laplace-spectrum voor dimensie n."""

    n: int | None = Field(None, alias="size")

    def run(self, ctx: CommandContext) -> int:
        config = ctx.merged(self)
        basis = get_spin_basis(config.n)
        dump = BasisDump(
            n=basis.n,
            hbar=basis.hbar,
            X=list(basis.X),
            spectrum=[
                LaplacianLevel(l=l, eigenvalue=value, multiplicity=count)
                for l, value, count in laplacian_spectrum(basis)
            ],
        )
        path = write_json(ctx.out / f"basis_n{basis.n}.json", dump, config)
        for level in dump.spectrum:
            print(f"l={level.l} eigenvalue={level.eigenvalue:.12g} multiplicity={level.multiplicity}")
        print(f"basis={path}")
        return 0
