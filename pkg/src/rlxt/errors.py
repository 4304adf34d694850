"""Exception types shared across the package."""


class FormatError(ValueError):
    """Malformed input file or byte stream."""


class PreorderError(FormatError):
    """Edge list is not a valid pre-order numbering."""


class DeterminismError(FormatError):
    """A node has two outgoing edges with the same label."""


class DomainError(ValueError):
    """Query violates an operation precondition (e.g. label not present)."""


class NoSuccessorError(ValueError):
    """Successor function evaluated on the last node in co-lex order."""


class IndexFileError(ValueError):
    """Bad magic, version, or structure in a serialized index file."""
