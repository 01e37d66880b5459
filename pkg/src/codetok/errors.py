"""Exception types shared across the toolkit."""


class CodetokError(Exception):
    """Base class for all toolkit errors."""


class NormalizeError(CodetokError):
    """Lexical normalization failure, with source location when known."""

    def __init__(self, message, path=None, line=None, col=None):
        self.path = path
        self.line = line
        self.col = col
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"{line}:"
        if col is not None:
            loc += f"{col}:"
        super().__init__(f"{loc} {message}" if loc else message)


class UnterminatedString(NormalizeError):
    pass


class UnterminatedComment(NormalizeError):
    pass


class InconsistentIndentation(NormalizeError):
    pass


class CorpusFormatError(CodetokError):
    """A serialized corpus line does not parse back into atoms."""


class UnsupportedLevel(CodetokError):
    """Boundary pre-tokenization requested for a level that has none."""


class EmptyCorpus(CodetokError):
    pass


class VocabTooSmall(CodetokError):
    pass


class ModelFormatError(CodetokError):
    """Model file cannot be loaded."""


class FormatVersionMismatch(ModelFormatError):
    pass


class ChecksumMismatch(ModelFormatError):
    pass


class UnknownId(CodetokError):
    pass


class InconsistentSources(CodetokError):
    """fair_crop inputs do not share one underlying text."""
