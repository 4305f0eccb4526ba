"""Exception types shared across the package."""


class TileForgeError(Exception):
    """Base class for all tileforge errors."""


class InvalidArgument(TileForgeError):
    pass


class MissingTileType(TileForgeError):
    pass


class MalformedSpec(TileForgeError):
    pass


class LabelTooLong(TileForgeError):
    pass


class WidthBoundViolation(TileForgeError):
    pass


class IncompleteAddressMap(TileForgeError):
    pass


class InvalidDecomposition(TileForgeError):
    pass


class NonterminatingProgram(TileForgeError):
    pass


class PatternUndecidableAtPoint(TileForgeError):
    pass


class NondeterministicAttachment(TileForgeError):
    """Two distinct tile types compete for one position during seeded growth."""

    def __init__(self, position, candidates):
        self.position = position
        self.candidates = sorted(candidates)
        super().__init__(
            f"nondeterministic attachment at {position}: {', '.join(self.candidates)}"
        )


class NoProgress(TileForgeError):
    """Seeded growth stalled before the declared completion size."""


class ParseError(TileForgeError):
    """A file violated its grammar; carries the offending location."""

    def __init__(self, path, line, message, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = f"{path}:{line}"
        if column is not None:
            where += f":{column}"
        super().__init__(f"{where}: {message}")
