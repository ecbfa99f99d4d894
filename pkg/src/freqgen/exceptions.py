"""Exception hierarchy for freqgen."""


class FreqgenError(Exception):
    """Base class for all freqgen errors."""


class InvalidInputError(FreqgenError, ValueError):
    """An argument violates a documented precondition."""


class InvalidParameterError(FreqgenError, ValueError):
    """A configuration value is outside its allowed range."""


class InvalidStateError(FreqgenError, RuntimeError):
    """An object is used in a state it does not support (e.g. layout mismatch)."""


class DecodeError(FreqgenError):
    """A file could not be decoded as an image."""


class UnsupportedFormatError(FreqgenError):
    """The image format or bit depth is not supported."""


class ConfigError(FreqgenError, ValueError):
    """A config file could not be parsed; message carries line/key context."""
