"""Exception hierarchy shared across the package."""


class VircisError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(VircisError, ValueError):
    """A parameter value is outside its documented range."""


class AudioFormatError(VircisError):
    """The byte stream is not a well-formed RIFF/WAVE file."""


class UnsupportedAudioError(VircisError):
    """The file is valid WAV but uses a codec/layout we do not read."""


class InputTooShortError(VircisError):
    """Audio too short to produce at least one analysis frame."""


class ModelError(VircisError):
    """Acoustic model is inconsistent with the data it is applied to."""


class EmptyObservationsError(VircisError):
    """Decoding was requested for an empty observation sequence."""


class TrainingDataError(VircisError):
    """Training data cannot support the requested model topology."""


class IndexingError(VircisError):
    """Document collection violates index preconditions."""


class ConfigurationError(VircisError):
    """A runtime configuration value is invalid or missing."""


class MembershipError(VircisError):
    """Operation attempted by someone who is not a session member."""


class SessionNotFoundError(VircisError):
    """No session registered under the given id."""


class SessionConflictError(VircisError):
    """A session with the given id already exists."""
