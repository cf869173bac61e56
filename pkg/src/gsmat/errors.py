"""Exception hierarchy shared across the engine."""


class GsmatError(Exception):
    """Base class for all engine errors."""


class ParseError(GsmatError):
    """Malformed data or query text.

    ``line`` is the 1-based line number when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFeatureError(ParseError):
    """Syntactically valid input using a feature the engine does not support."""


class UnknownIdError(GsmatError, KeyError):
    """Decode of an id that is not present in a dictionary namespace."""

    def __init__(self, namespace: str, id_: int):
        self.namespace = namespace
        self.id = id_
        super().__init__(f"no {namespace} term with id {id_}")

    def __str__(self) -> str:
        return f"no {self.namespace} term with id {self.id}"


class UnknownPredicateError(GsmatError, KeyError):
    """Lookup of a predicate id with no stored matrix."""

    def __init__(self, pid: int):
        self.pid = pid
        super().__init__(f"no matrix for predicate id {pid}")

    def __str__(self) -> str:
        return f"no matrix for predicate id {self.pid}"


class StoreFormatError(GsmatError):
    """A persisted store directory is missing, truncated, or incompatible."""


class ResourceLimitError(GsmatError):
    """A single join would exceed the configured row budget."""
