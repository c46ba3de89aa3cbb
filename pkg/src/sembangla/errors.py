"""Exception hierarchy.

Every error carries an exit code so the CLI can map failures without
inspecting messages.
"""


class SemSearchError(Exception):
    exit_code = 2


class UsageError(SemSearchError):
    exit_code = 1


class DataError(SemSearchError):
    """Malformed input data, resources or persisted state."""

    exit_code = 2


class TextEncodingError(DataError):
    def __init__(self, offset, reason="invalid UTF-8"):
        self.offset = offset
        super().__init__(f"{reason} at byte offset {offset}")


class LoadError(DataError):
    pass


class CorpusError(DataError):
    pass


class StateError(DataError):
    pass


class SchemaMismatchError(DataError):
    pass


class TrainingError(DataError):
    pass


class InvariantError(SemSearchError):
    exit_code = 3
