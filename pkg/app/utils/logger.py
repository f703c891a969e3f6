import logging
import os
import sys
from typing import Optional

LOGGER_NAME = "spatial_qsr"

_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
_DATEFMT = '%Y-%m-%d %H:%M:%S'

logger = logging.getLogger(LOGGER_NAME)


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """Setup logging configuration

    Console output goes to stderr so that triples written to stdout stay
    byte-identical between runs. Calling it again replaces the handlers.
    """
    formatter = logging.Formatter(_FORMAT, datefmt=_DATEFMT)

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    logger.propagate = False
    return logger


def log_event(event_type: str, message: str, level: str = "info"):
    """
    Structured event logging with different levels

    Args:
        event_type: Type of event (e.g., "SCENE_LOAD", "PAIR_EVAL")
        message: Log message
        level: Log level ("info", "warning", "error", "debug")
    """
    log_message = f"{event_type}: {message}"

    if level == "error":
        logger.error(log_message)
    elif level == "warning":
        logger.warning(log_message)
    elif level == "debug":
        logger.debug(log_message)
    else:
        logger.info(log_message)


def log_pipeline_step(step_name: str, subject: str, results_count: int = None):
    """Log extraction workflow steps"""
    message = f"Step: {step_name}, Subject: {subject}"
    if results_count is not None:
        message += f", Results: {results_count}"
    log_event("PIPELINE_STEP", message, "debug")


def log_error(context: str, error: Exception):
    """Log errors with context"""
    log_event(
        "ERROR",
        f"Context: {context}, Error: {type(error).__name__}: {error}",
        "error"
    )


def log_performance(operation: str, duration: float, details: str = None):
    """Log performance metrics"""
    message = f"Operation: {operation}, Duration: {duration:.3f}s"
    if details:
        message += f", Details: {details}"
    log_event("PERFORMANCE", message, "debug")
