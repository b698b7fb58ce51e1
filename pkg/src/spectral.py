"""Gemeenschappelijk spectrum van commuterende paren en de ratio-extrema L, c, C."""

import logging
import math

import numpy as np

from src.algebra import bracket, norm
from src.config import settings
from src.exceptions import DimensionMismatchError, NotSimultaneouslyDiagonalizableError
from src.models import CommonSpectrum, RatioExtrema

logger = logging.getLogger(__name__)


def _clusters(values: np.ndarray, threshold: float) -> list[np.ndarray]:
    """Splits oplopend gesorteerde waarden waar de sprong groter is dan threshold."""
    cuts = np.flatnonzero(np.diff(values) > threshold) + 1
    return np.split(np.arange(len(values)), cuts)


def simultaneous_diagonalize(W: np.ndarray, P: np.ndarray, tol: float | None = None,
                             tol_cluster: float | None = None) -> CommonSpectrum:
    """Gemeenschappelijke eigenbasis Λ met Λ†PΛ = i·diag(p) en Λ†WΛ = i·diag(w).

    Diagonaliseert eerst de Hermitische -iP. Binnen elk cluster van (bijna) gelijke p
    wordt de restrictie van -iW gediagonaliseerd. Volgorde: p oplopend, bij gelijke p
    w oplopend.
    """
    tol = settings.tolerances.commutator if tol is None else tol
    tol_cluster = settings.tolerances.cluster if tol_cluster is None else tol_cluster
    if W.shape != P.shape or W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionMismatchError(f"Vormen verschillen of niet vierkant: {W.shape} vs {P.shape}")

    n = W.shape[0]
    scale = max(norm(P), norm(W))
    residual = norm(bracket(P, W))
    if residual > tol * scale:
        raise NotSimultaneouslyDiagonalizableError(residual, tol * scale)

    hp = -1j * P
    hw = -1j * W
    hp = 0.5 * (hp + hp.conj().T)
    hw = 0.5 * (hw + hw.conj().T)

    p_values, Lambda = np.linalg.eigh(hp)
    threshold = tol_cluster * max(norm(P), float(np.max(np.abs(p_values), initial=0.0)))
    for cluster in _clusters(p_values, threshold):
        if len(cluster) == 1:
            continue
        V = Lambda[:, cluster]
        _, rotation = np.linalg.eigh(V.conj().T @ hw @ V)
        Lambda[:, cluster] = V @ rotation

    p = np.real(np.einsum("ij,ik,kj->j", Lambda.conj(), hp, Lambda))
    w = np.real(np.einsum("ij,ik,kj->j", Lambda.conj(), hw, Lambda))
    logger.debug(f"Gemeenschappelijk spectrum bepaald: n={n}, commutator-residu {residual:.3e}")
    return CommonSpectrum(n=n, Lambda=Lambda, p=p, w=w)


def diagonal_pairing(X: np.ndarray, spec: CommonSpectrum) -> float:
    """⟨[X,W],[X,P]⟩ via de diagonaal-geïndexeerde som in de basis Λ.

    (1/n) Σ_m Σ_j |Y_{m:j}|² (p_{j+|m|} - p_j)(w_{j+|m|} - w_j) met Y = Λ†XΛ.
    """
    n = spec.n
    if X.shape != (n, n):
        raise DimensionMismatchError(f"Verwacht {n}x{n}, kreeg {X.shape}")
    Y = spec.Lambda.conj().T @ X @ spec.Lambda
    p, w = spec.p, spec.w
    total = 0.0
    for m in range(-(n - 1), n):
        k = abs(m)
        weights = (p[k:] - p[: n - k]) * (w[k:] - w[: n - k])
        total += float(np.sum(np.abs(np.diagonal(Y, m)) ** 2 * weights))
    return total / n


def ratio_extrema(spec: CommonSpectrum, tol_cluster: float | None = None) -> RatioExtrema:
    """L = min (w_k - w_j)/(p_k - p_j), c/C = min/max (p_k - p_j)/(w_k - w_j) over paren j < k."""
    tol_cluster = settings.tolerances.cluster if tol_cluster is None else tol_cluster
    p, w = spec.p, spec.w
    j, k = np.triu_indices(spec.n, 1)
    dp = p[k] - p[j]
    dw = w[k] - w[j]

    equal_p = np.abs(dp) <= tol_cluster * float(np.max(np.abs(p), initial=0.0))
    equal_w = np.abs(dw) <= tol_cluster * float(np.max(np.abs(w), initial=0.0))

    degenerate_p = bool(np.any(equal_p & ~equal_w))
    degenerate_w = bool(np.any(equal_w & ~equal_p))

    if degenerate_p:
        logger.warning("Gelijke p met verschillende w: L = -inf")
        L = -math.inf
    elif np.any(~equal_p):
        L = float(np.min(dw[~equal_p] / dp[~equal_p]))
    else:
        L = math.inf

    if degenerate_w:
        logger.warning("Gelijke w met verschillende p: c = -inf, C = +inf")
        c, C = -math.inf, math.inf
    elif np.any(~equal_w):
        ratios = dp[~equal_w] / dw[~equal_w]
        c, C = float(np.min(ratios)), float(np.max(ratios))
    else:
        c, C = math.inf, -math.inf

    return RatioExtrema(L=L, c=c, C=C, degenerate_p=degenerate_p, degenerate_w=degenerate_w)
