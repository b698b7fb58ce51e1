"""Zeitlin-dynamica: vectorveld, isospectrale middelpuntsregel, monitors en Lyapunov-experimenten.

Ẇ = -(1/ħ)[P, W] met ΔnP = W. De middelpuntsregel is een exacte conjugatie met een
Cayley-unitaire matrix, dus spectrum en Casimirs blijven behouden tot op de
tolerantie van de inner solver.
"""

import logging
import math
from collections.abc import Callable

import numpy as np
from pydantic import ConfigDict
from scipy.linalg import expm
from scipy.optimize import NoConvergence, newton_krylov

from src.algebra import (
    SpinBasis,
    bracket,
    casimirs,
    check_dimension,
    hamiltonian,
    momentum,
    norm,
    poisson_solve,
    random_element,
    symmetrize,
)
from src.certifier import certify
from src.config import Tolerances, settings
from src.exceptions import IntegratorError
from src.models import (
    ArrayModel,
    LyapunovReport,
    MonitorRow,
    PerturbationMode,
    SteadyState,
    TrajectoryRecord,
)

logger = logging.getLogger(__name__)

RowSink = Callable[[MonitorRow], None]


def vector_field(basis: SpinBasis, W: np.ndarray) -> np.ndarray:
    """-(1/ħ)[P, W] met ΔnP = W."""
    return -bracket(poisson_solve(basis, W), W) / basis.hbar


# ---------------------------------------------------------------------------
# Isospectrale middelpuntsregel
# ---------------------------------------------------------------------------

class StepResult(ArrayModel):
    model_config = ConfigDict(frozen=True)

    W: np.ndarray
    iterations: int
    residual: float


def _generator(basis: SpinBasis, W_mid: np.ndarray, h: float) -> np.ndarray:
    # A = (h/2) B(W̃) met B = -(1/ħ) Δn⁻¹
    return -0.5 * h * poisson_solve(basis, W_mid) / basis.hbar


def _implicit_residual(basis: SpinBasis, W: np.ndarray, W_mid: np.ndarray, h: float) -> np.ndarray:
    A = _generator(basis, W_mid, h)
    return W_mid - bracket(A, W_mid) - A @ W_mid @ A - W


def midpoint_step(basis: SpinBasis, W: np.ndarray, h: float, inner_tol: float | None = None,
                  max_inner: int | None = None, fixed_point_iterations: int | None = None) -> StepResult:
    """Eén stap met statistieken van de inner solver.

    Los W = W̃ - [A,W̃] - AW̃A op voor W̃ (vaste punt, daarna Newton-Krylov),
    en geef W' = W̃ + [A,W̃] - AW̃A terug. Negatieve h loopt terug in de tijd.
    """
    tolerances = settings.tolerances
    inner_tol = tolerances.inner if inner_tol is None else inner_tol
    max_inner = tolerances.max_inner if max_inner is None else max_inner
    fixed_point_iterations = (
        tolerances.fixed_point_iterations if fixed_point_iterations is None else fixed_point_iterations
    )
    if h == 0 or not math.isfinite(h):
        raise ValueError(f"Stapgrootte moet eindig en niet nul zijn, kreeg {h}")
    check_dimension(basis, W)

    scale = max(norm(W), 1.0)
    threshold = inner_tol * scale
    W_mid = W.copy()
    residual = norm(_implicit_residual(basis, W, W_mid, h))
    iterations = 0

    while residual > threshold and iterations < min(fixed_point_iterations, max_inner):
        A = _generator(basis, W_mid, h)
        W_mid = W + bracket(A, W_mid) + A @ W_mid @ A
        residual = norm(_implicit_residual(basis, W, W_mid, h))
        iterations += 1

    if residual > threshold:
        logger.debug(f"Vaste-puntiteratie gestopt op residu {residual:.3e}; Newton-Krylov fallback")
        n = basis.n

        def F(x: np.ndarray) -> np.ndarray:
            trial = (x[: n * n] + 1j * x[n * n :]).reshape(n, n)
            r = _implicit_residual(basis, W, trial, h).ravel()
            return np.concatenate([r.real, r.imag])

        krylov_steps = 0

        def count(x: np.ndarray, f: np.ndarray) -> None:
            nonlocal krylov_steps
            krylov_steps += 1

        x0 = np.concatenate([W_mid.real.ravel(), W_mid.imag.ravel()])
        try:
            x = newton_krylov(
                F, x0, f_tol=threshold / n, maxiter=max(max_inner - iterations, 1), callback=count
            )
        except NoConvergence as exc:
            x = exc.args[0]
        W_mid = (x[: n * n] + 1j * x[n * n :]).reshape(n, n)
        residual = norm(_implicit_residual(basis, W, W_mid, h))
        iterations += krylov_steps

    if residual > threshold:
        raise IntegratorError("Inner solver niet geconvergeerd; verklein h", residual)

    A = _generator(basis, W_mid, h)
    W_next = symmetrize(W_mid + bracket(A, W_mid) - A @ W_mid @ A)
    return StepResult(W=W_next, iterations=iterations, residual=residual / scale)


def isomp_step(basis: SpinBasis, W: np.ndarray, h: float, inner_tol: float | None = None,
               max_inner: int | None = None) -> np.ndarray:
    """Isospectrale middelpuntsstap W ↦ W'."""
    return midpoint_step(basis, W, h, inner_tol, max_inner).W


# ---------------------------------------------------------------------------
# Integratie met monitors
# ---------------------------------------------------------------------------

def _sorted_spectrum(W: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(symmetrize(W) * -1j)


def _monitor(basis: SpinBasis, t: float, W: np.ndarray, spectrum: np.ndarray, spectrum0: np.ndarray,
             casimir_max: int, W_ref: np.ndarray | None) -> MonitorRow:
    return MonitorRow(
        t=t,
        H=hamiltonian(basis, W),
        casimirs=casimirs(W, casimir_max).tolist(),
        momentum=momentum(basis, W).tolist(),
        spec_drift=float(np.max(np.abs(spectrum - spectrum0))),
        dist=None if W_ref is None else norm(W - W_ref),
    )


def evolve(basis: SpinBasis, W_init: np.ndarray, h: float, T: float, casimir_max: int | None = None,
           W_ref: np.ndarray | None = None, snapshot_stride: int | None = None,
           tolerances: Tolerances | None = None, sink: RowSink | None = None) -> TrajectoryRecord:
    """⌈T/h⌉ stappen vanaf W_init, met een monitorregel voor t = 0 en na elke stap.

    sink ontvangt elke regel direct (voor het streamen naar CSV).
    """
    tolerances = tolerances or settings.tolerances
    casimir_max = settings.casimir_max if casimir_max is None else casimir_max
    if h <= 0 or T < h:
        raise ValueError(f"Verwacht h > 0 en T >= h, kreeg h={h}, T={T}")
    check_dimension(basis, W_init)

    steps = math.ceil(T / h - 1e-9)
    spectrum0 = _sorted_spectrum(W_init)
    W = W_init.copy()
    rows: list[MonitorRow] = []
    spectra: list[np.ndarray] = []
    snapshots: list[np.ndarray] = []
    iterations: list[int] = []
    residuals: list[float] = []

    def record(k: int) -> None:
        spectrum = _sorted_spectrum(W)
        spectra.append(spectrum)
        row = _monitor(basis, k * h, W, spectrum, spectrum0, casimir_max, W_ref)
        rows.append(row)
        if sink is not None:
            sink(row)
        if snapshot_stride and k % snapshot_stride == 0:
            snapshots.append(W.copy())

    record(0)
    for k in range(1, steps + 1):
        try:
            result = midpoint_step(
                basis, W, h, tolerances.inner, tolerances.max_inner, tolerances.fixed_point_iterations
            )
        except IntegratorError as exc:
            logger.error(f"Integratie afgebroken in stap {k}: {exc}")
            raise IntegratorError("Inner solver niet geconvergeerd; verklein h", exc.residual, step=k) from exc
        W = result.W
        iterations.append(result.iterations)
        residuals.append(result.residual)
        record(k)

    logger.info(
        f"Traject voltooid: {steps} stappen, h={h}, max spectrumdrift {max(r.spec_drift for r in rows):.3e}"
    )
    return TrajectoryRecord(
        h=h,
        times=np.array([r.t for r in rows]),
        hamiltonian=np.array([r.H for r in rows]),
        casimirs=np.array([r.casimirs for r in rows]),
        momentum=np.array([r.momentum for r in rows]),
        spec_drift=np.array([r.spec_drift for r in rows]),
        spectra=np.array(spectra),
        dist=None if W_ref is None else np.array([r.dist for r in rows]),
        snapshot_stride=snapshot_stride,
        snapshots=snapshots,
        inner_iterations=iterations,
        inner_residuals=np.array(residuals),
    )


# ---------------------------------------------------------------------------
# Lyapunov-experiment
# ---------------------------------------------------------------------------

def random_generator(seed: int) -> np.random.Generator:
    """PCG64 met een 64-bit seed."""
    return np.random.default_rng(seed)


def perturb(W0: np.ndarray, epsilon: float, mode: PerturbationMode, seed: int) -> np.ndarray:
    """ORBIT: e^{εX̂} W0 e^{-εX̂}; GENERIC: W0 + εX̂, met X̂ = X/‖X‖."""
    X = random_element(random_generator(seed), W0.shape[0])
    X /= norm(X)
    match mode:
        case PerturbationMode.ORBIT:
            U = expm(epsilon * X)
            return symmetrize(U @ W0 @ U.conj().T)
        case PerturbationMode.GENERIC:
            return W0 + epsilon * X


def lyapunov_experiment(basis: SpinBasis, state: SteadyState, epsilon: float,
                        mode: PerturbationMode = PerturbationMode.ORBIT, seed: int = 0,
                        h: float = 0.1, T: float = 10.0, casimir_max: int | None = None,
                        with_certificate: bool = False, hessian: bool = False,
                        tolerances: Tolerances | None = None, sink: RowSink | None = None,
                        ) -> tuple[LyapunovReport, TrajectoryRecord]:
    """Verstoor W0, integreer tot T en rapporteer sup_t ‖W(t) - W0‖."""
    if epsilon < 0:
        raise ValueError(f"epsilon moet >= 0 zijn, kreeg {epsilon}")
    tolerances = tolerances or settings.tolerances

    W_init = perturb(state.W0, epsilon, mode, seed)
    record = evolve(basis, W_init, h, T, casimir_max, W_ref=state.W0, tolerances=tolerances, sink=sink)
    certificate = certify(basis, state.W0, state.P0, tolerances, hessian=hessian) if with_certificate else None

    report = LyapunovReport(
        epsilon=epsilon,
        mode=mode,
        seed=seed,
        max_deviation=float(np.max(record.dist)),
        times=record.times,
        deviation_series=record.dist,
        certificate=certificate,
    )
    logger.info(f"Lyapunov-experiment ε={epsilon:g} ({mode.value}, seed {seed}): max afwijking {report.max_deviation:.3e}")
    return report, record
