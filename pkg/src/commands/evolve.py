"""`zeitlin evolve`: integreer een toestand, of voer een ε/seed-sweep van Lyapunov-experimenten uit.

Zonder epsilon wordt de matrix uit `state` zelf geïntegreerd (CSV `evolve.csv`); met
snapshot_stride komt elke snapshot als matrix-JSON in `snapshot_<stap>.json`.
Met een epsilon-lijst komt er per (ε, seed) een CSV `evolve_eps<ε>_seed<seed>.csv`
en een rapport `lyapunov_eps<ε>_seed<seed>.json`.
"""

import json
import logging
from pathlib import Path

from pydantic import BaseModel, Field

from src.algebra import get_spin_basis, validate_element
from src.commands.common import CommandContext, load_state
from src.dynamics import evolve, lyapunov_experiment
from src.exceptions import IntegratorError
from src.models import ExperimentConfig, MatrixPayload, PerturbationMode
from src.storage import MonitorCsvWriter, read_matrix, write_json

logger = logging.getLogger(__name__)


class EvolveCommand(BaseModel):
    """Isospectrale integratie met monitors (t, H, C2..Ck, L1..L3, spec_drift, dist)."""

    state: Path | None = None
    h: float | None = Field(None, alias="step")
    T: float | None = Field(None, alias="horizon")
    epsilon: list[float] | None = None
    perturbation: PerturbationMode | None = None
    seeds: list[int] | None = None
    snapshot_stride: int | None = None
    casimir_max: int | None = None
    hessian: bool | None = None

    def run(self, ctx: CommandContext) -> int:
        config = ctx.merged(self)
        if config.state is None:
            raise ValueError("evolve vereist een toestandsbestand (state)")
        tolerances = ctx.tolerances
        if ctx.tol is not None:
            tolerances = tolerances.model_copy(update={"inner": ctx.tol})

        if config.epsilon is None:
            self._plain(ctx, config, tolerances)
        else:
            self._sweep(ctx, config, tolerances)
        return 0

    def _plain(self, ctx: CommandContext, config: ExperimentConfig, tolerances) -> None:
        W = read_matrix(config.state)
        W = validate_element(W, tol=tolerances.element)
        basis = get_spin_basis(W.shape[0])
        path = ctx.out / "evolve.csv"

        with MonitorCsvWriter(path, config.casimir_max) as writer:
            try:
                record = evolve(
                    basis, W, config.h, config.T, config.casimir_max,
                    snapshot_stride=config.snapshot_stride, tolerances=tolerances, sink=writer,
                )
            except IntegratorError as exc:
                writer.abort(exc.step or writer.rows)
                raise
        if config.snapshot_stride:
            write_json(ctx.out / "trajectory.json", record, config)
            for index, snapshot in enumerate(record.snapshots):
                step = index * config.snapshot_stride
                write_json(ctx.out / f"snapshot_{step}.json", MatrixPayload.from_array(snapshot), config)
            logger.info(f"{len(record.snapshots)} snapshots geschreven (stride {config.snapshot_stride})")
        print(f"csv={path} steps={len(record.times) - 1}")

    def _sweep(self, ctx: CommandContext, config: ExperimentConfig, tolerances) -> None:
        basis, state = load_state(config.state, tolerances)
        seeds = [ctx.seed] if ctx.seed is not None else config.seeds

        for epsilon in config.epsilon:
            for seed in seeds:
                tag = f"eps{epsilon:g}_seed{seed}"
                path = ctx.out / f"evolve_{tag}.csv"
                with MonitorCsvWriter(path, config.casimir_max) as writer:
                    try:
                        report, _ = lyapunov_experiment(
                            basis, state, epsilon, config.perturbation, seed, config.h, config.T,
                            config.casimir_max, with_certificate=config.hessian, hessian=config.hessian,
                            tolerances=tolerances, sink=writer,
                        )
                    except IntegratorError as exc:
                        writer.abort(exc.step or writer.rows)
                        raise
                write_json(ctx.out / f"lyapunov_{tag}.json", report, config)
                print(json.dumps({"epsilon": epsilon, "seed": seed, "max_deviation": report.max_deviation}))
