import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

from i_dot_ai_utilities.logging.structured_logger import StructuredLogger
from i_dot_ai_utilities.logging.types.enrichment_types import ExecutionEnvironmentType
from i_dot_ai_utilities.logging.types.log_output_format import LogOutputFormat

DEFAULT_LOG_FILE_PATH = ".data/logs/lab.log"
DEFAULT_LOG_FILE_MAX_BYTES = 5 * 1024 * 1024  # 5MB
DEFAULT_LOG_FILE_BACKUP_COUNT = 5
DEFAULT_LOG_LEVEL = "info"

# chatty on every ray task
QUIET_LOGGERS = ("ray", "filelock")


def setup_logger(
    log_file_path: str | None = None,
    log_file_max_bytes: int | None = None,
    log_file_backup_count: int | None = None,
    level: str | None = None,
):
    """
    Set up logging with a stderr console handler and a rotating file handler.

    Reports are written to their own files, so nothing here touches stdout.

    Args:
        log_file_path: Path to the log file. Defaults to .data/logs/lab.log
        log_file_max_bytes: Max size of each log file in bytes. Defaults to 5MB
        log_file_backup_count: Number of backup files to keep. Defaults to 5
        level: Level name for the root logger and both handlers. Defaults to LOG_LEVEL, then info
    """
    log_file = log_file_path or os.environ.get("LOG_FILE_PATH", DEFAULT_LOG_FILE_PATH)
    max_bytes = log_file_max_bytes or int(os.environ.get("LOG_FILE_MAX_BYTES", DEFAULT_LOG_FILE_MAX_BYTES))
    backup_count = log_file_backup_count or int(
        os.environ.get("LOG_FILE_BACKUP_COUNT", DEFAULT_LOG_FILE_BACKUP_COUNT)
    )
    level_name = (level or os.environ.get("LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
    numeric_level = logging.getLevelNamesMapping().get(level_name, logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    root_logger.handlers.clear()

    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    console_handler = logging.StreamHandler()
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    try:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=max_bytes,
            backupCount=backup_count,
            encoding="utf-8",
        )
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)
        root_logger.debug("File logging enabled: %s", log_file)
    except OSError as e:
        root_logger.warning("Could not set up file logging: %s", e)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(numeric_level, logging.WARNING))


def setup_structured_logger(
    level: str,
    execution_environment: ExecutionEnvironmentType,
    logging_format: LogOutputFormat,
) -> StructuredLogger:
    return StructuredLogger(
        level=level or "info",
        options={
            "execution_environment": execution_environment,
            "log_format": logging_format,
        },
    )
