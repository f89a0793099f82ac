import logging
import os

# Logging is configured once, when the package is first imported.
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

logging.basicConfig(format=LOG_FORMAT, level=LOG_LEVEL)

PACKAGE_LOGGER = __name__.rpartition(".")[0]


def get_logger(name):
    """
    Get a logger with the specified name.

    Args:
        name (str): The name of the logger, usually the module's ``__name__``.

    Returns:
        logging.Logger: A logger instance with the specified name.
    """
    return logging.getLogger(name)


def set_log_level(level: str) -> None:
    """
    Override the level of every logger in the package.

    Used by the command line ``--log-level`` flag; ``LOG_LEVEL`` in the
    environment still sets the default.
    """
    logging.getLogger(PACKAGE_LOGGER).setLevel(level.upper())
