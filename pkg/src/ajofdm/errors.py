"""Exception types shared across the library."""


class ConfigurationError(ValueError):
    """Raised for invalid dimensioning or unsupported parameter combinations."""


class InputError(ValueError):
    """Raised for malformed runtime inputs (length mismatches, out-of-alphabet values)."""
