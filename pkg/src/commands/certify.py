"""`zeitlin certify <state>`: stabiliteitscertificaat plus een samenvattingsregel."""

from pathlib import Path

from pydantic import BaseModel
from pydantic_settings import CliPositionalArg

from src.certifier import certify
from src.commands.common import CommandContext, format_value, load_state
from src.models import ProvenanceKind
from src.storage import write_json


class CertifyCommand(BaseModel):
    """Certificeer een stationaire toestand (ratiocriterium en Hessiaan)."""

    state_file: CliPositionalArg[Path]
    hessian: bool = True

    def run(self, ctx: CommandContext) -> int:
        basis, state = load_state(self.state_file, ctx.tolerances)
        f = state.provenance.f if state.provenance.kind == ProvenanceKind.NEWTON else None
        certificate = certify(basis, state.W0, state.P0, ctx.tolerances, f=f, hessian=self.hessian)

        write_json(ctx.out / "certificate.json", certificate, ctx.config)
        full = certificate.hessian_full
        hess_max = format_value(float(full.max())) if full.size else "none"
        print(
            f"L={format_value(certificate.ratios.L)} "
            f"verdict={certificate.verdict.value} hess_max={hess_max}"
        )
        return 0
