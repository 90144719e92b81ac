import asyncio
import logging
import time
from functools import wraps

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str = "INFO") -> None:
    """
    Configure the root logger for the CLI and the HTTP server.

    Args:
        level (str): Logging level name, e.g. "DEBUG" or "WARNING".

    Raises:
        ValueError: If the level name is unknown.
    """
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        raise ValueError(f"Unknown log level '{level}'")
    logging.basicConfig(level=numeric_level, format=LOG_FORMAT)


def timeit(func):
    """
    Monitoring Utilities

    Decorator measuring the execution time of asynchronous and synchronous
    functions. Durations are logged at DEBUG level on this module's logger,
    so expensive eliminations and traces show up with ``--log-level DEBUG``.
    """

    @wraps(func)
    async def async_timeit_wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = await func(*args, **kwargs)
        total_time = time.perf_counter() - start_time
        logger.debug("Async function %s took %.4f seconds", func.__qualname__, total_time)
        return result

    @wraps(func)
    def sync_timeit_wrapper(*args, **kwargs):
        start_time = time.perf_counter()
        result = func(*args, **kwargs)
        total_time = time.perf_counter() - start_time
        logger.debug("Function %s took %.4f seconds", func.__qualname__, total_time)
        return result

    if asyncio.iscoroutinefunction(func):
        return async_timeit_wrapper
    else:
        return sync_timeit_wrapper
