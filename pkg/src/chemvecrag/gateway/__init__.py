"""CLI and HTTP gateway over the shared engine."""

from .config import Config, ConfigError, load_config
from .engine import Engine, IngestError

__all__ = ["Config", "ConfigError", "Engine", "IngestError", "load_config"]
