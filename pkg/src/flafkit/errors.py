"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value is out of range, inconsistent, or unknown."""


class InvalidInputError(ValueError):
    """A signal buffer is empty, mis-sized, or contains non-finite samples."""


class UnsupportedOperationError(RuntimeError):
    """The operation is not defined for this configuration (e.g. samplewise
    expansion of a random-vector expander)."""


class DivergenceError(RuntimeError):
    """Adaptive weights left the finite / bounded region."""
