"""Exception types shared across the toolkit."""


class LrstError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(LrstError):
    """A corpus file violates the TSV/JSONL grammar.

    Carries the offending line number (1-based) when known.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class CorpusIOError(LrstError):
    """Reading or writing a corpus file failed at the OS level."""


class DuplicateIdError(LrstError):
    """Two utterances in one corpus share an id."""

    def __init__(self, utterance_id: str):
        self.utterance_id = utterance_id
        super().__init__(f"duplicate utterance id: {utterance_id!r}")


class LanguageMismatchError(LrstError):
    """An operation received corpora with incompatible language pairs."""


class ConfigError(LrstError):
    """A pipeline configuration file is malformed or violates invariants."""


class AdapterError(LrstError):
    """Base class for inference-adapter failures."""


class AdapterUnreachableError(AdapterError):
    """The adapter process/endpoint cannot be reached; aborts the whole run."""


class AdapterResponseError(AdapterError):
    """The adapter answered ok=false for one request (fail-soft per item)."""


class AdapterProtocolError(AdapterError):
    """The adapter violated the wire protocol (bad JSON, positive score, ...)."""


class CapabilityError(AdapterError):
    """The adapter does not support the requested task or language pair."""
