"""Runtime container: output location and the worker pool"""

import logging
import os
from concurrent.futures import Executor, ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from ..errors import ConfigError

logger = logging.getLogger(__name__)

THREADS_ENV = "EPDIFF_THREADS"


def threads_from_env(environ: Optional[Mapping[str, str]] = None) -> int:
    """Thread cap from EPDIFF_THREADS, else the CPU count"""
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", THREADS_ENV) from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", THREADS_ENV)
    return value


class AppConfig:
    """Application configuration"""

    def __init__(
        self,
        output_dir: Optional[Path] = None,
        max_workers: Optional[int] = None,
    ):
        self.output_dir = Path(output_dir) if output_dir is not None else Path.cwd()
        self.max_workers = max_workers if max_workers is not None else threads_from_env()
        if self.max_workers < 1:
            raise ConfigError("max_workers must be positive", "max_workers")


class RuntimeContainer:
    """Owns the thread pool shared by independent runs"""

    def __init__(self, config: AppConfig):
        self.config = config
        self._services: Dict[str, Any] = {}
        self._initialized = False

    def initialize(self) -> None:
        """Create the output directory and the worker pool"""
        if self._initialized:
            return

        try:
            self.config.output_dir.mkdir(parents=True, exist_ok=True)
            self._services["executor"] = ThreadPoolExecutor(
                max_workers=self.config.max_workers, thread_name_prefix="epdiff"
            )
            self._initialized = True
            logger.info(
                f"Runtime initialized with {self.config.max_workers} worker threads"
            )
        except Exception as e:
            logger.error(f"Failed to initialize runtime container: {e}")
            raise

    def shutdown(self) -> None:
        """Wait for pending runs and release the pool"""
        try:
            executor = self._services.pop("executor", None)
            if executor is not None:
                executor.shutdown(wait=True)
            self._services.clear()
            self._initialized = False
            logger.debug("Runtime container shut down")
        except Exception as e:
            logger.error(f"Error during container shutdown: {e}")

    @property
    def executor(self) -> Executor:
        if not self._initialized:
            self.initialize()
        return self._services["executor"]

    @property
    def output_dir(self) -> Path:
        return self.config.output_dir

    def __enter__(self) -> "RuntimeContainer":
        self.initialize()
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self.shutdown()
