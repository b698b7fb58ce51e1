"""`zeitlin rigidity <state>`."""

from pathlib import Path

from pydantic import BaseModel
from pydantic_settings import CliPositionalArg

from src.commands.common import CommandContext, format_value, load_state
from src.steady import rigidity_report
from src.storage import write_json


class RigidityCommand(BaseModel):
    """Controleer diagonaliteit na rotatie (L > -6) en nulheid (L > -2)."""

    state_file: CliPositionalArg[Path]

    def run(self, ctx: CommandContext) -> int:
        basis, state = load_state(self.state_file, ctx.tolerances)
        report = rigidity_report(basis, state, ctx.tolerances)
        write_json(ctx.out / "rigidity.json", report, ctx.config)
        print(f"L={format_value(report.L)} conclusion={report.conclusion.value}")
        return 0
