from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings, extra="ignore"):
    model_config = SettingsConfigDict(
        env_file=".env", env_file_encoding="utf-8", env_ignore_env_file=True
    )

    SSH_WORKERS: int = Field(default=4, json_schema_extra={"env": "SSH_WORKERS"})
    OUTPUT_DIR: str = Field(default="results", json_schema_extra={"env": "OUTPUT_DIR"})
    LOG_LEVEL: str = Field(default="WARNING", json_schema_extra={"env": "LOG_LEVEL"})

    # classification and branch bookkeeping
    K_GRID: int = Field(default=4096, json_schema_extra={"env": "K_GRID"})
    BOUNDARY_TOLERANCE: float = Field(
        default=1e-12, json_schema_extra={"env": "BOUNDARY_TOLERANCE"}
    )
    BRANCH_TOLERANCE: float = Field(
        default=1e-10, json_schema_extra={"env": "BRANCH_TOLERANCE"}
    )

    # bound-state root finding
    ROOT_TOLERANCE: float = Field(
        default=1e-12, json_schema_extra={"env": "ROOT_TOLERANCE"}
    )
    NEWTON_STEP: float = Field(default=1e-6, json_schema_extra={"env": "NEWTON_STEP"})
    NEWTON_MAX_ITER: int = Field(
        default=100, json_schema_extra={"env": "NEWTON_MAX_ITER"}
    )
    SCAN_POINTS: int = Field(default=41, json_schema_extra={"env": "SCAN_POINTS"})
    TAIL_TOLERANCE: float = Field(
        default=1e-10, json_schema_extra={"env": "TAIL_TOLERANCE"}
    )

    # contour transforms
    CONTOUR_MARGIN: float = Field(
        default=0.05, json_schema_extra={"env": "CONTOUR_MARGIN"}
    )
    CONTOUR_POINTS: int = Field(
        default=65536, json_schema_extra={"env": "CONTOUR_POINTS"}
    )
    CONTOUR_SPAN_FACTOR: float = Field(
        default=8.0, json_schema_extra={"env": "CONTOUR_SPAN_FACTOR"}
    )
    MOMENT_ORDER: int = Field(default=10, json_schema_extra={"env": "MOMENT_ORDER"})
    PAIR_POINTS: int = Field(default=32768, json_schema_extra={"env": "PAIR_POINTS"})
    PAIR_SPAN_FACTOR: float = Field(
        default=16.0, json_schema_extra={"env": "PAIR_SPAN_FACTOR"}
    )

    # lattice oracle
    INTEGRATOR: str = Field(default="DOP853", json_schema_extra={"env": "INTEGRATOR"})
    INTEGRATOR_RTOL: float = Field(
        default=1e-10, json_schema_extra={"env": "INTEGRATOR_RTOL"}
    )
    INTEGRATOR_ATOL: float = Field(
        default=1e-12, json_schema_extra={"env": "INTEGRATOR_ATOL"}
    )
    EIGEN_TOLERANCE: float = Field(
        default=1e-10, json_schema_extra={"env": "EIGEN_TOLERANCE"}
    )
    MAX_OPERATOR_DIMENSION: int = Field(
        default=10000, json_schema_extra={"env": "MAX_OPERATOR_DIMENSION"}
    )
    CONTOUR_CHECK_TOLERANCE: float = Field(
        default=1e-6, json_schema_extra={"env": "CONTOUR_CHECK_TOLERANCE"}
    )
    PAIR_CONTOUR_OFFSET: float = Field(
        default=0.025, json_schema_extra={"env": "PAIR_CONTOUR_OFFSET"}
    )


settings = Settings()
