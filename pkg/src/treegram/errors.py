"""Exception hierarchy shared by all treegram modules."""


class TreegramError(Exception):
    """Base class for every error raised by this package."""


class EmptyDocument(TreegramError):
    """Raised when there is nothing to parse."""


class SelectorMiss(TreegramError):
    """A selector matched no node where at least one was required."""


class CorruptSnapshot(TreegramError):
    """A serialized tree-gram could not be decoded."""


class UnsupportedXPath(TreegramError):
    """The expression uses syntax outside the supported XPath subset."""


class MixedTrees(TreegramError):
    """Nodes passed together belong to different documents."""


class InvalidWrapper(TreegramError):
    """A wrapper document failed validation.

    ``path`` names the offending field, e.g. ``patterns/1/parent``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class UnsupportedTrigger(InvalidWrapper):
    """A trigger that is reserved in the schema but not implemented."""


class NoSnapshot(TreegramError):
    """Adaptation was requested for a pattern without stored tree-grams."""


class CorpusError(TreegramError):
    """Evaluation inputs are missing or inconsistent."""

    def __init__(self, message: str, paths=()):
        self.paths = list(paths)
        if self.paths:
            message = message + ": " + ", ".join(str(p) for p in self.paths)
        super().__init__(message)
