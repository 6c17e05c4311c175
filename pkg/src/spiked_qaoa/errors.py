"""Exception types shared across the package."""


class CapacityError(ValueError):
    """A requested size exceeds a configured memory or runtime cap."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""
