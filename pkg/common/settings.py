import logging
from functools import lru_cache

import dotenv
from i_dot_ai_utilities.logging.structured_logger import StructuredLogger
from i_dot_ai_utilities.logging.types.enrichment_types import ExecutionEnvironmentType
from i_dot_ai_utilities.logging.types.log_output_format import LogOutputFormat
from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from common.logger import setup_logger, setup_structured_logger

setup_logger()
logger = logging.getLogger(__name__)

DOT_ENV_PATH = ".env"
# environments that log as text on a developer machine; anything else is treated as deployed
LOCAL_ENVIRONMENTS = {"local", "test"}

dotenv_detected = dotenv.load_dotenv(dotenv_path=DOT_ENV_PATH)
if dotenv_detected:
    logger.info("A .env file was detected and loaded. Values from it will override environment variables")
else:
    logger.debug("No .env file was detected. Using environment variables as is")


class Settings(BaseSettings):
    ENVIRONMENT: str = Field(default="local", description="Deployment name; sets the structured logger defaults")

    # Structured logger setup
    EXECUTION_ENVIRONMENT: ExecutionEnvironmentType = ExecutionEnvironmentType.LOCAL
    LOGGING_FORMAT: LogOutputFormat = LogOutputFormat.TEXT
    LOG_LEVEL: str = Field(description="The level at which to emit structured logs", default="info")

    # Logging settings
    LOG_FILE_PATH: str = Field(
        default=".data/logs/lab.log",
        description="Path to the log file for persistent logging",
    )
    LOG_FILE_MAX_BYTES: int = Field(
        default=5 * 1024 * 1024,  # 5MB
        description="Maximum size of each log file in bytes before rotation",
    )
    LOG_FILE_BACKUP_COUNT: int = Field(
        default=5,
        description="Number of backup log files to keep",
    )

    # bound suites
    N0: int = Field(default=4, description="First index n at which the bound suites are asserted")
    ORDER_WINDOW: float = Field(
        default=20.0,
        description="Maximum max/min ratio of error*(n+2)/(b_n+1) accepted as a two-sided order",
    )
    SLOPE_TOLERANCE: float = Field(
        default=0.1,
        description="Accepted distance between the fitted error slope and the reference rate slope",
    )
    VORONOVSKAJA_SLOPE_TOLERANCE: float = Field(
        default=0.2,
        description="Accepted distance between the fitted residual slope and the squared reference rate slope",
    )
    N_STAR_CAP: int = Field(
        default=10**7,
        description="Largest n searched when locating the index n* of the lower-bound floor",
    )

    # series and quadrature
    SERIES_TOL: float = Field(default=1e-14, description="Absolute tolerance for Poisson series truncation")
    K_MAX: int = Field(default=10**6, description="Largest Poisson series truncation index allowed")
    DIRECT_SERIES_RTOL: float = Field(
        default=1e-10,
        description="Accuracy, relative to 1 + |value|, a direct Poisson series must reach in double precision",
    )
    P_MAX: int = Field(default=64, description="Largest moment index a table may hold")
    QUADRATURE_NODES: int = Field(
        default=96,
        description="Gauss-Legendre node count for the inner integrals of the direct operator",
    )
    CERTIFICATE_TAIL_TOL: float = Field(
        default=1e-30,
        description="Presets keep Taylor coefficients until M (A R)^p / (2p)! falls below this",
    )

    # contours and sup norms
    CONTOUR_NODES: int = Field(default=256, description="Initial node count on a circle")
    CONTOUR_MAX_NODES: int = Field(default=4096, description="Node count at which doubling stops")
    CONTOUR_RTOL: float = Field(default=1e-11, description="Agreement required between two node counts")
    SUP_NORM_SAMPLES: int = Field(default=256, description="Boundary samples used for disk sup norms")

    SWEEP_WORKERS: int = Field(
        default=1,
        description="Number of ray workers for n-sweeps. 1 runs sweeps in-process without ray",
    )

    # use a dotenv file for local development
    @model_validator(mode="after")
    def derive_logging_from_environment(self) -> "Settings":
        local = self.ENVIRONMENT.lower() in LOCAL_ENVIRONMENTS
        if "EXECUTION_ENVIRONMENT" not in self.model_fields_set:
            self.EXECUTION_ENVIRONMENT = (
                ExecutionEnvironmentType.LOCAL if local else ExecutionEnvironmentType.FARGATE
            )
        if "LOGGING_FORMAT" not in self.model_fields_set:
            self.LOGGING_FORMAT = LogOutputFormat.TEXT if local else LogOutputFormat.JSON
        return self

    if dotenv_detected:
        model_config = SettingsConfigDict(env_file=DOT_ENV_PATH, extra="ignore")


def get_settings():
    return Settings()


@lru_cache
def get_structured_logger() -> StructuredLogger:
    return setup_structured_logger(
        level=get_settings().LOG_LEVEL or "info",
        execution_environment=get_settings().EXECUTION_ENVIRONMENT,
        logging_format=get_settings().LOGGING_FORMAT,
    )
