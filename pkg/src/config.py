from pydantic import BaseModel
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class Tolerances(BaseModel):
    """Alle numerieke toleranties op één plek. Elke operatie accepteert een override."""

    model_config = {"extra": "forbid"}

    # Validatie van su(n) elementen (relatief t.o.v. max(1, max|entry|))
    element: float = 1e-12

    # Clusterdrempel voor gedegenereerde eigenwaarden, relatief t.o.v. de spectrale schaal
    cluster: float = 1e-9

    # Commutatie-precondities
    commutator: float = 1e-8
    steady_gate: float = 1e-8
    steady_state: float = 1e-10

    # Strikte ongelijkheden L > -6 en L > -2
    ratio_margin: float = 1e-9

    # Hessiaan op de baan-raakruimte
    svd_cutoff: float = 1e-10
    leakage: float = 1e-10

    # Iteratieve solvers
    newton: float = 1e-12
    newton_max_iter: int = 50
    inner: float = 1e-13
    max_inner: int = 100
    fixed_point_iterations: int = 20

    # Rigiditeit en uitlijning
    alignment_zero: float = 1e-13
    rigidity: float = 1e-8


class Settings(BaseSettings):
    log_level: str = "INFO"

    tolerances: Tolerances = Tolerances()

    # Aantal Casimirs in de monitors: C2..C_k
    casimir_max: int = 5

    model_config = SettingsConfigDict(extra="forbid")

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        # Geen omgevingsvariabelen of .env: alle toestand is expliciet
        return (init_settings,)


settings = Settings()
