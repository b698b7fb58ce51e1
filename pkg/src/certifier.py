"""Arnold-kwadratische vorm, sandwich-grenzen, Hessiaan op de baan en het certificaat.

Q(X) = ⟨δW, -Δn⁻¹δW⟩ + ⟨δW, [X,P0]⟩ met δW = [X,W0], zonder ħ-factoren. Een globale
positieve schaal verandert het teken van Q niet.
"""

import hashlib
import logging
import math
import numpy as np
from numpy.polynomial import Polynomial
from pydantic import ConfigDict
from scipy.linalg import expm, null_space

from src.algebra import (
    SpinBasis,
    bracket,
    coordinates,
    hamiltonian,
    inner,
    norm,
    norm_sq,
    poisson_solve,
    project_eigenspace_1,
    su_basis,
)
from src.config import Tolerances, settings
from src.models import (
    ArrayModel,
    CrossCheck,
    RatioExtrema,
    SandwichReport,
    StabilityCertificate,
    Verdict,
)
from src.spectral import ratio_extrema, simultaneous_diagonalize
from src.steady import check_steady_pair

logger = logging.getLogger(__name__)


def quadratic_form_Q(basis: SpinBasis, X: np.ndarray, W0: np.ndarray, P0: np.ndarray,
                     gate: float | None = None) -> float:
    check_steady_pair(basis, W0, P0, gate)
    dW = bracket(X, W0)
    return float((inner(dW, -poisson_solve(basis, dW)) + inner(dW, bracket(X, P0))).real)


def _leakage(basis: SpinBasis, dW: np.ndarray) -> float:
    size = norm(dW)
    if size == 0.0:
        return 0.0
    _, projected = project_eigenspace_1(basis, dW)
    return norm(projected) / size


def sandwich_check(basis: SpinBasis, X: np.ndarray, W0: np.ndarray, P0: np.ndarray,
                   ratios: RatioExtrema, leakage_tol: float | None = None) -> SandwichReport:
    """Slacks van c‖δW‖² ≤ ⟨δW,[X,P0]⟩ ≤ C‖δW‖² en de afgeleide grenzen op Q.

    De grove bovengrens (1/2 + C) geldt altijd; de verfijnde (1/6 + C) alleen als
    ℙ1 δW = 0 binnen leakage_tol.
    """
    leakage_tol = settings.tolerances.leakage if leakage_tol is None else leakage_tol
    dW = bracket(X, W0)
    leakage = _leakage(basis, dW)
    if not (math.isfinite(ratios.c) and math.isfinite(ratios.C)):
        return SandwichReport(applicable=False, leakage=leakage)

    size = norm_sq(dW)
    middle = float(inner(dW, bracket(X, P0)).real)
    Q = float(inner(dW, -poisson_solve(basis, dW)).real) + middle
    refined = leakage <= leakage_tol

    return SandwichReport(
        applicable=True,
        lower_slack=middle - ratios.c * size,
        upper_slack=ratios.C * size - middle,
        coarse_upper_slack=(0.5 + ratios.C) * size - Q,
        refined_lower_slack=Q - ratios.c * size,
        refined_upper_slack=(1 / 6 + ratios.C) * size - Q if refined else None,
        refined_applicable=refined,
        leakage=leakage,
    )


# ---------------------------------------------------------------------------
# Hessiaan op de baan-raakruimte
# ---------------------------------------------------------------------------

def orbit_bilinear_form(basis: SpinBasis, W0: np.ndarray, P0: np.ndarray,
                        E: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(B, M, E): B(E_j,E_k) in de orthonormale su(n)-basis E, M de matrix van E ↦ [E,W0].

    B = Mᵀ K M + (1/2)(MPᵀ M + Mᵀ MP) met K = -Δn⁻¹ en MP de matrix van E ↦ [E,P0].
    """
    E = su_basis(basis.n) if E is None else E
    V = E @ W0 - W0 @ E
    M = coordinates(E, V)
    KV = np.stack([-poisson_solve(basis, v) for v in V])
    KM = coordinates(E, KV)
    MP = coordinates(E, E @ P0 - P0 @ E)
    cross = MP.T @ M
    B = M.T @ KM + 0.5 * (cross + cross.T)
    return 0.5 * (B + B.T), M, E


class OrbitHessian(ArrayModel):
    model_config = ConfigDict(frozen=True)

    full: np.ndarray
    constrained: np.ndarray
    leakage: float


def _orbit_hessian(basis: SpinBasis, W0: np.ndarray, P0: np.ndarray,
                   tolerances: Tolerances) -> OrbitHessian:
    empty = np.zeros(0)
    if norm(W0) == 0.0:
        return OrbitHessian(full=empty, constrained=empty, leakage=0.0)

    B, M, E = orbit_bilinear_form(basis, W0, P0)
    _, sigma, Vt = np.linalg.svd(M)
    if sigma.size == 0 or sigma[0] == 0.0:
        return OrbitHessian(full=empty, constrained=empty, leakage=0.0)
    # Complement van de stabilisator: rechter singuliere vectoren boven de afkapgrens
    tangent = Vt[sigma > tolerances.svd_cutoff * sigma[0]].T
    restricted = tangent.T @ B @ tangent

    # ℙ1-richtingen in coördinaten; ⟨X_α, X_β⟩ = δ/3 dus √3·coord is orthonormaal
    first = np.sqrt(3.0) * coordinates(E, basis.X)
    images = M @ tangent
    leakage = float(np.max(np.linalg.norm(first.T @ images, axis=0) / np.linalg.norm(images, axis=0)))

    Z = null_space(first.T @ images)
    constrained = Z.T @ restricted @ Z if Z.size else np.zeros((0, 0))

    return OrbitHessian(
        full=np.linalg.eigvalsh(restricted),
        constrained=np.linalg.eigvalsh(constrained) if constrained.size else empty,
        leakage=leakage,
    )


def orbit_hessian_spectrum(basis: SpinBasis, W0: np.ndarray, P0: np.ndarray,
                           constrain_momentum: bool = False,
                           tolerances: Tolerances | None = None) -> np.ndarray:
    """Oplopende eigenwaarden van Q op de raakruimte van de coadjoint-baan.

    Met constrain_momentum alleen variaties met ⟨δW, X_α⟩ = 0. Leeg voor W0 = 0.
    """
    tolerances = tolerances or settings.tolerances
    check_steady_pair(basis, W0, P0, tolerances.steady_gate)
    result = _orbit_hessian(basis, W0, P0, tolerances)
    return result.constrained if constrain_momentum else result.full


# ---------------------------------------------------------------------------
# Aanvullende diagnostiek
# ---------------------------------------------------------------------------

def orbit_second_variation(basis: SpinBasis, X: np.ndarray, W0: np.ndarray, eps: float = 1e-3) -> float:
    """Centrale tweede differentie van H langs e^{εX} W0 e^{-εX}; gelijk aan -Q(X) + O(ε²)."""
    U = expm(eps * X)
    forward = hamiltonian(basis, U @ W0 @ U.conj().T)
    backward = hamiltonian(basis, U.conj().T @ W0 @ U)
    return (forward + backward - 2.0 * hamiltonian(basis, W0)) / eps**2


def functional_derivative_bound(f: list[float], p: np.ndarray, samples: int = 1025) -> float:
    """min f' over [min p, max p], inclusief de kritieke punten van f'."""
    derivative = Polynomial(f).deriv()
    lo, hi = float(np.min(p)), float(np.max(p))
    points = [np.linspace(lo, hi, samples)]
    if derivative.degree() >= 2:
        critical = derivative.deriv().roots()
        critical = critical[np.abs(critical.imag) < 1e-12].real
        points.append(critical[(critical >= lo) & (critical <= hi)])
    return float(np.min(derivative(np.concatenate(points))))


def input_hash(A: np.ndarray) -> str:
    """SHA-256 van de little-endian complex128 bytes."""
    return hashlib.sha256(np.ascontiguousarray(A, dtype="<c16").tobytes()).hexdigest()


# ---------------------------------------------------------------------------
# Certificaat
# ---------------------------------------------------------------------------

def _cross_check(hessian: OrbitHessian, ratios: RatioExtrema, tolerances: Tolerances) -> CrossCheck:
    spectra = [hessian.constrained]
    if hessian.leakage <= tolerances.leakage:
        spectra.append(hessian.full)

    if ratios.C < -1 / 6:
        consistent = all(s.size == 0 or s.max() < 0 for s in spectra)
    elif ratios.c > 0:
        consistent = all(s.size == 0 or s.min() > 0 for s in spectra)
    else:
        return CrossCheck.NOT_CHECKED
    return CrossCheck.CONSISTENT if consistent else CrossCheck.INCONSISTENT


def certify(basis: SpinBasis, W0: np.ndarray, P0: np.ndarray, tolerances: Tolerances | None = None,
            f: list[float] | None = None, hessian: bool = True) -> StabilityCertificate:
    """Stabiliteitscertificaat: L > -6 (strikt, met marge) geeft STABLE_BY_RATIO."""
    tolerances = tolerances or settings.tolerances
    check_steady_pair(basis, W0, P0, tolerances.steady_gate)

    spectrum = simultaneous_diagonalize(W0, P0, tolerances.commutator, tolerances.cluster)
    ratios = ratio_extrema(spectrum, tolerances.cluster)

    if norm(W0) <= tolerances.element:
        verdict = Verdict.TRIVIAL
    elif ratios.L > -6 + tolerances.ratio_margin:
        verdict = Verdict.STABLE_BY_RATIO
    else:
        verdict = Verdict.INDETERMINATE

    if hessian and verdict != Verdict.TRIVIAL:
        result = _orbit_hessian(basis, W0, P0, tolerances)
    else:
        result = OrbitHessian(full=np.zeros(0), constrained=np.zeros(0), leakage=0.0)

    cross_check = CrossCheck.NOT_CHECKED
    if hessian and verdict == Verdict.STABLE_BY_RATIO:
        cross_check = _cross_check(result, ratios, tolerances)
        if cross_check == CrossCheck.INCONSISTENT:
            logger.error(f"Hessiaan spreekt het ratiocriterium tegen (L={ratios.L:.6g})")

    bound = functional_derivative_bound(f, spectrum.p) if f is not None else None
    hess_max = float(result.full.max()) if result.full.size else float("nan")
    logger.info(f"Certificaat: L={ratios.L:.6g} verdict={verdict.value} hess_max={hess_max:.6g}")

    return StabilityCertificate(
        ratios=ratios,
        verdict=verdict,
        hessian_full=result.full,
        hessian_constrained=result.constrained,
        p1_leakage=result.leakage,
        cross_check=cross_check,
        functional_bound=bound,
        tolerances=tolerances,
        input_hashes={"W0": input_hash(W0), "P0": input_hash(P0)},
    )
