"""Exception taxonomy shared across the pipeline.

Every error raised on purpose by this package derives from PipelineError so
callers (CLI, service) can distinguish expected failures from bugs.
"""


class PipelineError(Exception):
    """Base class for all expected pipeline failures."""


class DecodeError(PipelineError):
    """Input bytes are not a well-formed audio container."""


class UnsupportedFormat(PipelineError):
    """Format or codec is recognized but not handled."""


class TranscoderUnavailable(PipelineError):
    """A non-WAV input needs the external transcoder, which is not configured."""


class TranscodeFailed(PipelineError):
    """The external transcoder ran and exited nonzero."""


class InvalidInput(PipelineError):
    """An argument violates an operation's precondition."""


class InvalidSpec(PipelineError):
    """Synthesis parameters violate the generator's invariants."""


class SchemaError(PipelineError):
    """A persisted artifact carries an incompatible schema version."""


class CorpusLayoutError(PipelineError):
    """Corpus root is missing the expected DD/ and NDD/ subdirectories."""


class BatchError(PipelineError):
    """Every file in a batch failed; there is nothing to continue with."""
