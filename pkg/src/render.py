"""Van matrix naar veld op de bol.

De basis per eigenruimte volgt de ladderrelatie T_{l,k+1} ∝ [S+, T_{l,k}] met positieve
factoren, startend bij een reële T_{l,0} met positief eerste element. Die fase sluit aan
op scipy's sph_harm_y (Condon-Shortley), zodat X3 op +cos θ valt.
"""

import logging

import numpy as np
from scipy.special import sph_harm_y

from src.algebra import SpinBasis, check_dimension, degree_of
from src.exceptions import InvalidDimensionError

logger = logging.getLogger(__name__)


def _raise(basis: SpinBasis, a: np.ndarray, k: int) -> np.ndarray:
    # [S+, T] op diagonaal k+1: c_i a[i+1] - c_{i+k} a[i]
    c = basis.ladder
    i = np.arange(len(a) - 1)
    return c[i] * a[i + 1] - c[i + k] * a[i]


def ladder_vectors(basis: SpinBasis, l: int) -> list[np.ndarray]:
    """Diagonaalvectoren e_0..e_l met (1/n)Σ|e_k|² = 1."""
    block = basis.blocks[0]
    degrees = np.array([degree_of(value) for value in block.eigenvalues])
    v = block.eigenvectors[:, np.flatnonzero(degrees == l)[0]].copy()
    if v[0] < 0:
        v = -v

    n = basis.n
    vectors = [np.sqrt(n) * v]
    for k in range(l):
        e = _raise(basis, vectors[-1], k)
        vectors.append(e / np.sqrt(np.sum(e**2) / n))
    return vectors


def render_coefficients(basis: SpinBasis, W: np.ndarray, l_max: int | None = None) -> dict[tuple[int, int], complex]:
    """h_{l,k} = (1/n) Σ_i e_k[i] (iW)[i, i+k] voor 1 <= l <= l_max, 0 <= k <= l."""
    check_dimension(basis, W)
    n = basis.n
    l_max = n - 1 if l_max is None else min(l_max, n - 1)
    hermitian = 1j * W
    coefficients = {}
    for l in range(1, l_max + 1):
        for k, e in enumerate(ladder_vectors(basis, l)):
            coefficients[(l, k)] = complex(np.dot(e, np.diagonal(hermitian, k)) / n)
    return coefficients


def render_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """θ_i = (i + 1/2)π/nθ, φ_j = 2πj/nφ."""
    if n_theta < 2 or n_phi < 2:
        raise InvalidDimensionError(f"Rooster moet minstens 2x2 zijn, kreeg {n_theta}x{n_phi}")
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    return theta, phi


def render_field(basis: SpinBasis, W: np.ndarray, n_theta: int = 64, n_phi: int = 128,
                 l_max: int | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reëel veld Σ_l [h_{l0} Y_{l0} + 2 Re Σ_{k>0} h_{lk} Y_{lk}] op het (θ, φ)-rooster."""
    theta, phi = render_grid(n_theta, n_phi)
    grid_theta, grid_phi = np.meshgrid(theta, phi, indexing="ij")
    field = np.zeros((n_theta, n_phi))

    for (l, k), h in render_coefficients(basis, W, l_max).items():
        if h == 0:
            continue
        Y = sph_harm_y(l, k, grid_theta, grid_phi)
        field += (h * Y).real if k == 0 else 2.0 * (h * Y).real

    logger.debug(f"Veld gerenderd op {n_theta}x{n_phi} rooster")
    return theta, phi, field
