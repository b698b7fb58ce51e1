"""Stationaire toestanden, de SO(3)-actie en de rigiditeitscontroles.

Een stationair paar voldoet aan [P0, W0] = 0 en W0 = Δn P0. Zonale toestanden zijn
diagonaal in de eigenbasis van X3; Newton-toestanden voldoen daarnaast aan
W0 = i f(-iP0) op de diagonaal, op een gemeenschappelijke verschuiving na.
"""

import logging

import numpy as np
from numpy.polynomial import polynomial
from scipy.linalg import expm, null_space, pinv

from src.algebra import (
    SpinBasis,
    bracket,
    check_dimension,
    laplacian_apply,
    norm,
    norm_sq,
    project_eigenspace_1,
    real_eigenspace_basis,
    validate_element,
)
from src.config import Tolerances, settings
from src.exceptions import (
    DivergenceError,
    InvalidDimensionError,
    InvalidElementError,
    SingularJacobianError,
    SteadyStateError,
)
from src.models import Provenance, ProvenanceKind, RigidityConclusion, RigidityReport, SteadyState
from src.spectral import diagonal_pairing, ratio_extrema, simultaneous_diagonalize

logger = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny


# ---------------------------------------------------------------------------
# Validatie
# ---------------------------------------------------------------------------

def steady_residuals(basis: SpinBasis, W0: np.ndarray, P0: np.ndarray) -> tuple[float, float]:
    """(‖[P0,W0]‖/(‖P0‖‖W0‖), ‖ΔnP0 - W0‖/‖W0‖), beide 0 voor het nulpaar."""
    check_dimension(basis, W0, P0)
    commutator = norm(bracket(P0, W0)) / max(norm(P0) * norm(W0), _TINY)
    laplacian = norm(laplacian_apply(basis, P0) - W0) / max(norm(W0), _TINY)
    return commutator, laplacian


def check_steady_pair(basis: SpinBasis, W0: np.ndarray, P0: np.ndarray,
                      tol: float | None = None) -> tuple[float, float]:
    tol = settings.tolerances.steady_gate if tol is None else tol
    commutator, laplacian = steady_residuals(basis, W0, P0)
    if commutator > tol or laplacian > tol:
        raise SteadyStateError(commutator, laplacian, tol)
    return commutator, laplacian


def validate_steady(basis: SpinBasis, W0: np.ndarray, P0: np.ndarray, provenance: Provenance,
                    tolerances: Tolerances | None = None) -> SteadyState:
    """Valideer (W0, P0) en bundel ze met hun gemeenschappelijk spectrum."""
    tolerances = tolerances or settings.tolerances
    W0 = validate_element(W0, basis.n, tol=tolerances.element)
    P0 = validate_element(P0, basis.n, tol=tolerances.element)
    commutator, laplacian = check_steady_pair(basis, W0, P0, tolerances.steady_state)
    spectrum = simultaneous_diagonalize(W0, P0, tolerances.commutator, tolerances.cluster)
    return SteadyState(
        W0=W0,
        P0=P0,
        spectrum=spectrum,
        commutator_residual=commutator,
        laplacian_residual=laplacian,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# Constructies
# ---------------------------------------------------------------------------

def zonal_state(basis: SpinBasis, d: np.ndarray, provenance: Provenance | None = None) -> SteadyState:
    """P0 = i·diag(d), W0 = Δn P0 = i·diag(T0 d)."""
    d = np.asarray(d, dtype=float)
    if d.shape != (basis.n,):
        raise InvalidDimensionError(f"d moet lengte {basis.n} hebben, kreeg {d.shape}")
    scale = max(1.0, float(np.max(np.abs(d), initial=0.0)))
    if abs(d.sum()) > settings.tolerances.element * scale * basis.n:
        raise InvalidElementError(f"d is niet spoorloos (som {d.sum():.3e})")

    P0 = 1j * np.diag(d)
    W0 = 1j * np.diag(basis.blocks[0].apply(d))
    return validate_steady(basis, W0, P0, provenance or Provenance(kind=ProvenanceKind.ZONAL))


def eigen_state(basis: SpinBasis, l: int, coeffs: np.ndarray | None = None) -> SteadyState:
    """P0 = Σ_m coeffs_m R_{l,m} in de reële basis van de l-de eigenruimte, W0 = -l(l+1)P0.

    Zonder coeffs wordt de zonale richting m = 0 gekozen.
    """
    if not 1 <= l <= basis.n - 1:
        raise InvalidDimensionError(f"l moet in 1..{basis.n - 1} liggen, kreeg {l}")
    if coeffs is None:
        coeffs = np.zeros(2 * l + 1)
        coeffs[l] = 1.0
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (2 * l + 1,):
        raise InvalidDimensionError(f"Verwacht {2 * l + 1} coëfficiënten, kreeg {coeffs.shape}")

    elements = real_eigenspace_basis(basis, l)
    P0 = np.tensordot(coeffs, np.stack(elements), axes=1)
    W0 = -l * (l + 1) * P0
    return validate_steady(basis, W0, P0, Provenance(kind=ProvenanceKind.EIGENSTATE, l=l))


def newton_functional_state(basis: SpinBasis, f: list[float], d_init: np.ndarray | None = None,
                            max_iter: int | None = None, tol: float | None = None) -> SteadyState:
    """Los T0 d = f(d) - κ op over spoorloze d met Newton; f in oplopende machten.

    De stap is de minimum-norm kleinste-kwadratenoplossing op de spoorloze deelruimte,
    zodat een consistent singulier systeem (bijv. f(x) = -2x) naar de projectie van
    d_init op de kern convergeert.
    """
    max_iter = settings.tolerances.newton_max_iter if max_iter is None else max_iter
    tol = settings.tolerances.newton if tol is None else tol
    n = basis.n
    coeffs = np.asarray(f, dtype=float)
    if coeffs.size == 0:
        coeffs = np.zeros(1)
    derivative = polynomial.polyder(coeffs)

    d = np.zeros(n) if d_init is None else np.asarray(d_init, dtype=float).copy()
    if d.shape != (n,):
        raise InvalidDimensionError(f"d_init moet lengte {n} hebben, kreeg {d.shape}")
    d -= d.mean()

    T0 = basis.blocks[0].dense()
    traceless = null_space(np.ones((1, n)))
    spectral_radius = float(np.max(np.abs(basis.blocks[0].eigenvalues)))
    residual = np.inf

    for iteration in range(max_iter + 1):
        lap = T0 @ d
        G = lap - polynomial.polyval(d, coeffs)
        G -= G.mean()
        residual = float(np.linalg.norm(G))
        logger.debug(f"Newton iteratie {iteration}: residu {residual:.3e}")
        if residual <= tol * (1.0 + float(np.linalg.norm(lap))):
            break
        if iteration == max_iter:
            raise DivergenceError(f"Newton niet geconvergeerd na {max_iter} iteraties", residual)

        slope = polynomial.polyval(d, derivative)
        J = (T0 - np.diag(slope)) @ traceless
        J -= J.mean(axis=0)
        # Singuliere waarden onder 1e-12 van de operatorschaal tellen als nul
        scale = spectral_radius + float(np.max(np.abs(slope)))
        step = -pinv(J, atol=1e-12 * scale, rtol=0.0) @ G
        mismatch = float(np.linalg.norm(J @ step + G)) / residual
        if mismatch > 1e-6:
            raise SingularJacobianError(
                f"Singuliere Jacobiaan in iteratie {iteration} (relatief residu {mismatch:.3e}); "
                "probeer een verstoorde d_init"
            )
        d = d + traceless @ step
        d -= d.mean()

    shift = float(np.mean(polynomial.polyval(d, coeffs)))
    logger.info(f"Newton geconvergeerd in {iteration} iteraties: residu {residual:.3e}, κ={shift:.6g}")
    provenance = Provenance(
        kind=ProvenanceKind.NEWTON, f=coeffs.tolist(), shift=shift, iterations=iteration
    )
    return zonal_state(basis, d, provenance)


# ---------------------------------------------------------------------------
# SO(3)-actie
# ---------------------------------------------------------------------------

def hat(rho: np.ndarray) -> np.ndarray:
    x, y, z = rho
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotation_matrix(rho: np.ndarray) -> np.ndarray:
    """Klassieke rotatie exp(ρ̂)."""
    return expm(hat(np.asarray(rho, dtype=float)))


def so3_rotate(basis: SpinBasis, rho: np.ndarray, W: np.ndarray) -> np.ndarray:
    """R·W = F_R W F_R† met F_R = exp((1/ħ) Σ ρ_α X_α) = exp(-iρ·S)."""
    check_dimension(basis, W)
    rho = np.asarray(rho, dtype=float)
    F = expm(np.tensordot(rho, basis.X, axes=1) / basis.hbar)
    return F @ W @ F.conj().T


def align_first_eigenspace(basis: SpinBasis, W: np.ndarray,
                           tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Rotatie ρ zodat ℙ1(R·W) evenredig is met X3, en het geroteerde element."""
    tol = settings.tolerances.alignment_zero if tol is None else tol
    a, _ = project_eigenspace_1(basis, W)
    size = float(np.linalg.norm(a))
    if size <= tol * norm(W):
        logger.warning("ℙ1 W is nul: identieke rotatie gekozen")
        return np.zeros(3), W.copy()

    axis = np.cross(a, [0.0, 0.0, 1.0])
    axis_norm = float(np.linalg.norm(axis))
    if axis_norm <= 1e-15 * size:
        rho = np.zeros(3) if a[2] > 0 else np.array([np.pi, 0.0, 0.0])
    else:
        angle = float(np.arccos(np.clip(a[2] / size, -1.0, 1.0)))
        rho = angle * axis / axis_norm

    aligned = so3_rotate(basis, rho, W)
    b, _ = project_eigenspace_1(basis, aligned)
    if np.linalg.norm(b[:2]) > 1e-10 * size:
        logger.warning(f"Uitlijning onnauwkeurig: ℙ1-componenten 1,2 = {b[:2]}")
    return rho, aligned


# ---------------------------------------------------------------------------
# Rigiditeit
# ---------------------------------------------------------------------------

def rigidity_report(basis: SpinBasis, state: SteadyState,
                    tolerances: Tolerances | None = None) -> RigidityReport:
    """Controleer: L > -2 dwingt W0 = 0; L > -6 dwingt R·W0 diagonaal."""
    tolerances = tolerances or settings.tolerances
    W0, P0 = state.W0, state.P0
    ratios = ratio_extrema(state.spectrum, tolerances.cluster)
    L = ratios.L
    norm_W0 = norm(W0)
    scale = max(norm_W0, _TINY)

    lhs = norm_sq(laplacian_apply(basis, P0))
    rhs = -sum(diagonal_pairing(X, state.spectrum) for X in basis.X) / basis.hbar**2
    energy_residual = abs(lhs - rhs) / max(abs(lhs), _TINY)

    rho, aligned = align_first_eigenspace(basis, W0, tolerances.alignment_zero)
    offdiag = norm(aligned - np.diag(np.diag(aligned))) / scale
    x3_residual = norm(bracket(aligned, basis.X[2])) / scale

    margin = tolerances.ratio_margin
    if L > -2 + margin:
        zero = norm_W0 <= tolerances.rigidity * (1 + norm(P0))
        conclusion = RigidityConclusion.ZERO_CONFIRMED if zero else RigidityConclusion.VIOLATION
    elif L > -6 + margin:
        diagonal = offdiag <= tolerances.rigidity
        conclusion = RigidityConclusion.DIAGONAL_CONFIRMED if diagonal else RigidityConclusion.VIOLATION
    else:
        conclusion = RigidityConclusion.NOT_APPLICABLE

    if conclusion == RigidityConclusion.VIOLATION:
        logger.error(f"Rigiditeit geschonden: L={L:.6g}, ‖W0‖={norm_W0:.3e}, off-diagonaal {offdiag:.3e}")
    else:
        logger.info(f"Rigiditeit: L={L:.6g} -> {conclusion.value}")

    return RigidityReport(
        L=L,
        alignment_rotation=rho,
        offdiag_residual=offdiag,
        x3_commutator_residual=x3_residual,
        energy_identity_residual=energy_residual,
        norm_W0=norm_W0,
        conclusion=conclusion,
    )
