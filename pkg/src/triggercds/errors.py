"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """An input object violates its documented invariants."""


class DegenerateParameterError(ValidationError):
    """Parameters sit on (or within tolerance of) a removable singularity,
    e.g. a basket contagion level b equal to 1/i or a collision between two
    ordered-default rates."""


class NumericRangeError(FloatingPointError):
    """A computation overflowed the representable floating-point range."""


class ConfigError(ValidationError):
    """A run-configuration file failed validation.

    Carries the offending ``section.key`` so the CLI can report it.
    """

    def __init__(self, section: str, key: str | None, message: str):
        self.section = section
        self.key = key
        where = section if key is None else f"{section}.{key}"
        super().__init__(f"[{where}] {message}")


class PrecisionWarning(UserWarning):
    """Tracked cancellation error in a compensated sum exceeded the
    acceptable fraction of the result."""
