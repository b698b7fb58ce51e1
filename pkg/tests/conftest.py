import numpy as np
import pytest

from src.algebra import SpinBasis, build_spin_basis, random_element
from src.steady import newton_functional_state, zonal_state


@pytest.fixture(scope="session")
def bases() -> dict[int, SpinBasis]:
    """Spinbases voor veelgebruikte n, eenmalig opgebouwd."""
    return {n: build_spin_basis(n) for n in (2, 3, 4, 5, 6, 8, 16)}


@pytest.fixture(scope="session")
def basis16(bases) -> SpinBasis:
    return bases[16]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240613)


@pytest.fixture
def random_su():
    """Willekeurig su(n)-element met ‖X‖ = scale."""

    def make(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
        X = random_element(rng, n)
        return scale * X / np.sqrt(np.vdot(X, X).real / n)

    return make


@pytest.fixture
def commuting_pair():
    """(W, P) gelijktijdig diagonaal in een willekeurige unitaire basis.

    Met degenerate=True komt elke eigenwaarde van P twee keer voor.
    """

    def make(rng: np.random.Generator, n: int, degenerate: bool = False) -> tuple[np.ndarray, np.ndarray]:
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        U, _ = np.linalg.qr(G)
        p = np.repeat(rng.standard_normal((n + 1) // 2), 2)[:n] if degenerate else rng.standard_normal(n)
        w = rng.standard_normal(n)
        p -= p.mean()
        w -= w.mean()
        P = U @ np.diag(1j * p) @ U.conj().T
        W = U @ np.diag(1j * w) @ U.conj().T
        return 0.5 * (W - W.conj().T), 0.5 * (P - P.conj().T)

    return make


@pytest.fixture
def zonal_profile():
    """Willekeurige spoorloze d met eenheidsnorm."""

    def make(rng: np.random.Generator, n: int) -> np.ndarray:
        d = rng.standard_normal(n)
        d -= d.mean()
        return d / np.linalg.norm(d)

    return make


@pytest.fixture
def mixed_state():
    """Zonale toestand d = v1 + 0.05·v2 uit de eerste twee eigenvectoren van T0; L ligt tussen -6 en -2."""

    def make(basis: SpinBasis):
        block = basis.blocks[0]

        def vector(eigenvalue: float) -> np.ndarray:
            return block.eigenvectors[:, int(np.argmin(np.abs(block.eigenvalues - eigenvalue)))]

        d = vector(-2.0) + 0.05 * vector(-6.0)
        return zonal_state(basis, d - d.mean())

    return make


@pytest.fixture
def cubic_state():
    """Niet-triviale Newton-toestand voor f(x) = -1.9x - 0.01x³, gestart bij 0.5·μ; L ligt tussen -6 en -2."""

    def make(basis: SpinBasis):
        mu = basis.spin - np.arange(basis.n)
        return newton_functional_state(basis, [0.0, -1.9, 0.0, -0.01], 0.5 * mu)

    return make
