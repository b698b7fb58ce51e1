"""Gekwantiseerde geometrie van de bol in su(n).

Spin-generatoren X_α = -iħS_α, het geschaalde Frobenius-product
⟨X,Y⟩ = (1/n) tr(X†Y), de Hoppe-Yau Laplaciaan Δn en zijn inverse,
eigenbasis, projectie op de eerste eigenruimte, Casimirs, impuls en
Hamiltoniaan.

Δn laat elke diagonaal invariant. Op diagonaal k (elementen A[i, i+k]) is het
een reële symmetrische tridiagonale matrix:

    (Δn a)_i = (2 μ_i μ_{i+k} - 2 s(s+1)) a_i + c_i c_{i+k} a_{i+1} + c_{i-1} c_{i+k-1} a_{i-1}

met μ_i = s - i en c_i = √(s(s+1) - μ_i μ_{i+1}) de ladder-coëfficiënten van S+.
Diagonaal -k heeft dezelfde matrix (Δn commuteert met transponeren).
"""

import logging
from functools import lru_cache

import numpy as np
from pydantic import ConfigDict, Field
from scipy.linalg import cho_solve_banded, cholesky_banded, eigh_tridiagonal, null_space

from src.config import settings
from src.exceptions import DimensionMismatchError, InvalidDimensionError, InvalidElementError
from src.models import ArrayModel, EigenBasisEntry

logger = logging.getLogger(__name__)


class DiagonalBlock(ArrayModel):
    """Restrictie van Δn tot diagonaal ±k, met gecachte factorisaties."""
    model_config = ConfigDict(frozen=True)

    k: int
    diag: np.ndarray
    off: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    # Banded Cholesky van -Δn (alleen k >= 1; k = 0 heeft de identiteit als kern)
    cholesky: np.ndarray | None
    rows: np.ndarray = Field(repr=False)

    @property
    def size(self) -> int:
        return len(self.diag)

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        if self.size > 1:
            out[:-1] += self.off * v[1:]
            out[1:] += self.off * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


class SpinBasis(ArrayModel):
    """(X1, X2, X3), ħ en de per-diagonaal factorisaties van Δn voor vaste n."""
    model_config = ConfigDict(frozen=True)

    n: int
    hbar: float
    X: np.ndarray
    ladder: np.ndarray = Field(repr=False)
    blocks: tuple[DiagonalBlock, ...] = Field(repr=False)

    @property
    def spin(self) -> float:
        return (self.n - 1) / 2


# ---------------------------------------------------------------------------
# Constructie
# ---------------------------------------------------------------------------

def _spin_matrices(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    s = (n - 1) / 2
    mu = s - np.arange(n)
    ladder = np.sqrt(np.maximum(s * (s + 1) - mu[:-1] * mu[1:], 0.0))
    s_plus = np.diag(ladder, 1).astype(complex)
    s_minus = s_plus.conj().T
    s1 = 0.5 * (s_plus + s_minus)
    s2 = -0.5j * (s_plus - s_minus)
    s3 = np.diag(mu).astype(complex)
    return s1, s2, s3, ladder


def _diagonal_block(n: int, k: int, ladder: np.ndarray) -> DiagonalBlock:
    s = (n - 1) / 2
    mu = s - np.arange(n)
    size = n - k
    i = np.arange(size)
    diag = 2.0 * mu[i] * mu[i + k] - 2.0 * s * (s + 1)
    off = ladder[i[:-1]] * ladder[i[:-1] + k] if size > 1 else np.zeros(0)

    if size == 1:
        eigenvalues, eigenvectors = diag.copy(), np.ones((1, 1))
    else:
        eigenvalues, eigenvectors = eigh_tridiagonal(diag, off)

    cholesky = None
    if k >= 1:
        banded = np.zeros((2, size))
        banded[1] = -diag
        banded[0, 1:] = -off
        cholesky = cholesky_banded(banded, lower=False)

    return DiagonalBlock(
        k=k,
        diag=diag,
        off=off,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        cholesky=cholesky,
        rows=i,
    )


def build_spin_basis(n: int) -> SpinBasis:
    """Bouw X_α = -iħS_α voor spin s = (n-1)/2, met ħ = 2/√(n²-1)."""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidDimensionError(f"Dimensie moet een geheel getal >= 2 zijn, kreeg {n!r}")
    n = int(n)

    hbar = 2.0 / np.sqrt(n**2 - 1)
    s1, s2, s3, ladder = _spin_matrices(n)
    X = -1j * hbar * np.stack([s1, s2, s3])
    blocks = tuple(_diagonal_block(n, k, ladder) for k in range(n))

    logger.debug(f"Spinbasis gebouwd: n={n}, ħ={hbar:.6g}")
    return SpinBasis(n=n, hbar=hbar, X=X, ladder=ladder, blocks=blocks)


@lru_cache(maxsize=16)
def get_spin_basis(n: int) -> SpinBasis:
    """Gedeelde, onveranderlijke basis per n (voor de CLI)."""
    return build_spin_basis(n)


# ---------------------------------------------------------------------------
# Validatie
# ---------------------------------------------------------------------------

def symmetrize(A: np.ndarray) -> np.ndarray:
    """Projectie op het scheef-Hermitische deel."""
    return 0.5 * (A - A.conj().T)


def check_dimension(basis: SpinBasis, *matrices: np.ndarray) -> None:
    for A in matrices:
        if A.shape != (basis.n, basis.n):
            raise DimensionMismatchError(f"Verwacht {basis.n}x{basis.n}, kreeg {A.shape}")


def validate_element(A: np.ndarray, n: int | None = None, traceless: bool = True,
                     tol: float | None = None) -> np.ndarray:
    """Controleer dat A in su(n) ligt (of in u(n) met traceless=False)."""
    tol = settings.tolerances.element if tol is None else tol
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidElementError(f"Geen vierkante matrix: vorm {A.shape}")
    if n is not None and A.shape[0] != n:
        raise DimensionMismatchError(f"Verwacht {n}x{n}, kreeg {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidElementError("Matrix bevat NaN of Inf")

    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    skew_defect = float(np.max(np.abs(A + A.conj().T), initial=0.0))
    if skew_defect > tol * scale:
        raise InvalidElementError(f"Matrix is niet scheef-Hermitisch (afwijking {skew_defect:.3e})")
    if traceless and abs(np.trace(A)) > tol * scale * A.shape[0]:
        raise InvalidElementError(f"Matrix is niet spoorloos (spoor {abs(np.trace(A)):.3e})")
    return A


# ---------------------------------------------------------------------------
# Inproduct en haakje
# ---------------------------------------------------------------------------

def inner(X: np.ndarray, Y: np.ndarray) -> complex:
    """⟨X,Y⟩ = (1/n) tr(X†Y)."""
    if X.shape != Y.shape:
        raise DimensionMismatchError(f"Vormen verschillen: {X.shape} vs {Y.shape}")
    return np.vdot(X, Y) / X.shape[0]


def norm_sq(X: np.ndarray) -> float:
    return float(inner(X, X).real)


def norm(X: np.ndarray) -> float:
    return float(np.sqrt(norm_sq(X)))


def bracket(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    if X.shape != Y.shape:
        raise DimensionMismatchError(f"Vormen verschillen: {X.shape} vs {Y.shape}")
    return X @ Y - Y @ X


# ---------------------------------------------------------------------------
# Laplaciaan
# ---------------------------------------------------------------------------

def laplacian_apply(basis: SpinBasis, W: np.ndarray) -> np.ndarray:
    """ΔnW = (1/ħ²) Σ_α [X_α, [X_α, W]], matrixvrij."""
    check_dimension(basis, W)
    out = np.zeros_like(W, dtype=complex)
    for X in basis.X:
        out += bracket(X, bracket(X, W))
    return out / basis.hbar**2


def laplacian_blocks_apply(basis: SpinBasis, W: np.ndarray) -> np.ndarray:
    """ΔnW via de tridiagonale restricties; exact diagonaal-behoudend."""
    check_dimension(basis, W)
    out = np.zeros_like(W, dtype=complex)
    for block in basis.blocks:
        rows, cols = block.rows, block.rows + block.k
        out[rows, cols] = block.apply(W[rows, cols])
        if block.k:
            out[cols, rows] = block.apply(W[cols, rows])
    return out


def poisson_solve(basis: SpinBasis, W: np.ndarray) -> np.ndarray:
    """Unieke spoorloze P met ΔnP = W, per diagonaal opgelost."""
    check_dimension(basis, W)
    P = np.zeros_like(W, dtype=complex)

    # Diagonaal 0: de identiteit spant de kern, dus los op in het spoor-orthogonale complement
    zero = basis.blocks[0]
    rhs = np.diagonal(W).copy()
    rhs -= rhs.mean()
    keep = np.abs(zero.eigenvalues) > 1e-8 * np.max(np.abs(zero.eigenvalues))
    V = zero.eigenvectors[:, keep]
    sol = V @ ((V.T @ rhs) / zero.eigenvalues[keep])
    P[zero.rows, zero.rows] = sol - sol.mean()

    for block in basis.blocks[1:]:
        rows, cols = block.rows, block.rows + block.k
        upper, lower = W[rows, cols], W[cols, rows]
        stacked = np.column_stack([upper.real, upper.imag, lower.real, lower.imag])
        # Δ_k P = W  <=>  (-Δ_k) P = -W
        sol = -cho_solve_banded((block.cholesky, False), stacked, check_finite=False)
        P[rows, cols] = sol[:, 0] + 1j * sol[:, 1]
        P[cols, rows] = sol[:, 2] + 1j * sol[:, 3]
    return P


def laplacian_spectrum(basis: SpinBasis) -> list[tuple[int, float, int]]:
    """(l, -l(l+1), multipliciteit) uit de diagonaalblokken, zonder de kern l = 0."""
    values = np.concatenate(
        [block.eigenvalues for block in basis.blocks]
        + [block.eigenvalues for block in basis.blocks[1:]]
    )
    degrees = np.rint((-1.0 + np.sqrt(np.maximum(1.0 - 4.0 * values, 0.0))) / 2.0).astype(int)
    spectrum = []
    for l in range(1, basis.n):
        mask = degrees == l
        spectrum.append((l, float(values[mask].mean()), int(mask.sum())))
    return spectrum


# ---------------------------------------------------------------------------
# Eigenbasis
# ---------------------------------------------------------------------------

def degree_of(eigenvalue: float) -> int:
    return int(round((-1.0 + np.sqrt(max(1.0 - 4.0 * eigenvalue, 0.0))) / 2.0))


def eigenbasis_build(basis: SpinBasis, l_max: int | None = None) -> list[EigenBasisEntry]:
    """Orthonormale T_{l,m} voor l <= l_max, gesorteerd op (l, m).

    Fase: het eerste niet-nul element van elke T is positief imaginair.
    """
    n = basis.n
    l_max = n - 1 if l_max is None else l_max
    if not 1 <= l_max <= n - 1:
        raise InvalidDimensionError(f"l_max moet in 1..{n - 1} liggen, kreeg {l_max}")

    entries = []
    for block in basis.blocks:
        for j in range(block.size):
            l = degree_of(block.eigenvalues[j])
            if l == 0 or l > l_max:
                continue
            v = block.eigenvectors[:, j].copy()
            lead = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))[0]
            if v[lead] < 0:
                v = -v
            values = 1j * np.sqrt(n) * v
            rows, cols = block.rows, block.rows + block.k
            for m in sorted({block.k, -block.k}):
                T = np.zeros((n, n), dtype=complex)
                if m >= 0:
                    T[rows, cols] = values
                else:
                    T[cols, rows] = values
                entries.append(EigenBasisEntry(l=l, m=m, T=T))

    entries.sort(key=lambda e: (e.l, e.m))
    return entries


def real_eigenspace_basis(basis: SpinBasis, l: int) -> list[np.ndarray]:
    """Reële orthonormale basis van (l-de eigenruimte) ∩ su(n), geïndexeerd m = -l..l.

    m = 0: T_{l,0}; m > 0: (T_{l,m} + T_{l,-m})/√2; m < 0: i(T_{l,|m|} - T_{l,-|m|})/√2.
    """
    if not 1 <= l <= basis.n - 1:
        raise InvalidDimensionError(f"l moet in 1..{basis.n - 1} liggen, kreeg {l}")
    by_m = {e.m: e.T for e in eigenbasis_build(basis, l) if e.l == l}
    elements = []
    for m in range(-l, l + 1):
        if m == 0:
            elements.append(by_m[0])
        elif m > 0:
            elements.append((by_m[m] + by_m[-m]) / np.sqrt(2))
        else:
            elements.append(1j * (by_m[-m] - by_m[m]) / np.sqrt(2))
    return elements


# ---------------------------------------------------------------------------
# Projectie, Casimirs, impuls, energie
# ---------------------------------------------------------------------------

def project_eigenspace_1(basis: SpinBasis, W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonale projectie op span{X1, X2, X3}: (coëfficiënten a, P1 W)."""
    check_dimension(basis, W)
    a = np.array([(inner(W, X) / inner(X, X)).real for X in basis.X])
    return a, np.tensordot(a, basis.X, axes=1)


def casimir(W: np.ndarray, k: int) -> float:
    """C_k(W) = (1/n) tr((-iW)^k)."""
    if k < 1:
        raise ValueError(f"Casimir-orde moet >= 1 zijn, kreeg {k}")
    return float(np.trace(np.linalg.matrix_power(-1j * W, k)).real / W.shape[0])


def casimirs(W: np.ndarray, k_max: int) -> np.ndarray:
    """C_2..C_kmax via het spectrum van de Hermitische -iW."""
    eigenvalues = np.linalg.eigvalsh(-1j * W)
    return np.array([np.mean(eigenvalues**k) for k in range(2, k_max + 1)])


def momentum(basis: SpinBasis, W: np.ndarray) -> np.ndarray:
    """L(W) = (⟨W, X_α⟩)_α."""
    check_dimension(basis, W)
    return np.array([inner(W, X).real for X in basis.X])


def hamiltonian(basis: SpinBasis, W: np.ndarray) -> float:
    """H(W) = (1/2)⟨P, W⟩ met ΔnP = W."""
    return 0.5 * float(inner(poisson_solve(basis, W), W).real)


def su_basis(n: int) -> np.ndarray:
    """Reële orthonormale basis van su(n) onder ⟨·,·⟩, vorm (n²-1, n, n).

    Off-diagonaal: i√(n/2)(e_jk + e_kj) en √(n/2)(e_jk - e_kj); diagonaal: i√n·diag(u)
    met u een orthonormale basis van de spoorloze vectoren.
    """
    if n < 2:
        raise InvalidDimensionError(f"Dimensie moet >= 2 zijn, kreeg {n}")
    j, k = np.triu_indices(n, 1)
    pairs = len(j)
    scale = np.sqrt(n / 2)

    symmetric = np.zeros((pairs, n, n), dtype=complex)
    antisymmetric = np.zeros((pairs, n, n), dtype=complex)
    idx = np.arange(pairs)
    symmetric[idx, j, k] = symmetric[idx, k, j] = 1j * scale
    antisymmetric[idx, j, k] = scale
    antisymmetric[idx, k, j] = -scale

    traceless = null_space(np.ones((1, n)))
    diagonal = np.zeros((n - 1, n, n), dtype=complex)
    diagonal[:, np.arange(n), np.arange(n)] = 1j * np.sqrt(n) * traceless.T
    return np.concatenate([symmetric, antisymmetric, diagonal])


def coordinates(E: np.ndarray, A: np.ndarray) -> np.ndarray:
    """Coördinaten Re⟨E_k, A⟩ van A (of een stapel A's) in de basis E."""
    n = E.shape[-1]
    if A.ndim == 2:
        return np.real(np.einsum("kij,ij->k", E.conj(), A)) / n
    return np.real(np.einsum("kij,bij->kb", E.conj(), A)) / n


def random_element(rng: np.random.Generator, n: int) -> np.ndarray:
    """X = (G - G†)/2 - (tr/n)I met G standaard-normaal complex."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    X = symmetrize(G)
    return X - np.trace(X) / n * np.eye(n)
