"""Domeinfouten. De CLI vertaalt ze naar exit codes (zie src/main.py)."""


class ZeitlinError(Exception):
    """Basisklasse voor alle fouten uit dit pakket."""


class InvalidDimensionError(ZeitlinError, ValueError):
    pass


class DimensionMismatchError(ZeitlinError, ValueError):
    pass


class InvalidElementError(ZeitlinError, ValueError):
    """Matrix is niet scheef-Hermitisch, niet spoorloos of bevat NaN/Inf."""


class NotSimultaneouslyDiagonalizableError(ZeitlinError):
    def __init__(self, residual: float, threshold: float):
        self.residual = residual
        self.threshold = threshold
        super().__init__(
            f"Matrices commuteren niet: residu {residual:.3e} > drempel {threshold:.3e}"
        )


class SteadyStateError(ZeitlinError):
    """(W0, P0) voldoet niet aan [P0, W0] = 0, W0 = Δn P0."""

    def __init__(self, commutator_residual: float, laplacian_residual: float, threshold: float):
        self.commutator_residual = commutator_residual
        self.laplacian_residual = laplacian_residual
        self.threshold = threshold
        super().__init__(
            f"Geen stationair paar: commutator-residu {commutator_residual:.3e}, "
            f"Laplace-residu {laplacian_residual:.3e} (drempel {threshold:.3e})"
        )


class DivergenceError(ZeitlinError):
    def __init__(self, message: str, last_residual: float):
        self.last_residual = last_residual
        super().__init__(f"{message} (laatste residu {last_residual:.3e})")


class SingularJacobianError(ZeitlinError):
    pass


class IntegratorError(ZeitlinError):
    def __init__(self, message: str, residual: float, step: int | None = None):
        self.residual = residual
        self.step = step
        prefix = f"stap {step}: " if step is not None else ""
        super().__init__(f"{prefix}{message} (inner residu {residual:.3e})")
