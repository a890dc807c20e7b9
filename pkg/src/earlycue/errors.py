"""Exception types shared across the pipeline."""


class EarlycueError(Exception):
    """Base class for all domain errors."""


class RecordingParseError(EarlycueError):
    """A recording file line could not be parsed; message names the line."""


class SchemaError(EarlycueError):
    """Frame width or channel layout disagrees with the declared schema."""


class AnnotationError(EarlycueError):
    """State spans violate ordering, overlap or alternation invariants."""


class ManifestError(EarlycueError):
    """A pipeline manifest is incomplete or references missing artifacts."""


class TotalConflictError(EarlycueError):
    """Dempster's rule is undefined: the two beliefs are in total conflict."""


class NumericError(EarlycueError):
    """A numeric computation produced a non-finite value."""


class ConfigError(EarlycueError):
    """A pipeline configuration is malformed or contains unknown keys."""
