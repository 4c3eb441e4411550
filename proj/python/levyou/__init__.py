from ._core import (
    AccuracyError,
    ConfigError,
    DimensionError,
    DomainError,
    Error,
    Model,
    RefusedError,
    UnsupportedError,
    __version__,
    example_config,
    example_ids,
    reproduce,
    theorem1_constants,
)

__all__ = [
    "AccuracyError",
    "ConfigError",
    "DimensionError",
    "DomainError",
    "Error",
    "Model",
    "RefusedError",
    "UnsupportedError",
    "__version__",
    "example_config",
    "example_ids",
    "reproduce",
    "theorem1_constants",
]
