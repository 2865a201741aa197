"""Exception hierarchy shared by all tabsel modules."""


class TabselError(Exception):
    """Base class for every error raised by tabsel."""


class SchemaError(TabselError):
    pass


class ParseError(TabselError):
    pass


class EmptyDatasetError(TabselError):
    pass


class EncodeError(TabselError):
    pass


class LabelError(TabselError):
    """Raised when labels are degenerate (fewer than two classes)."""


class StratificationError(TabselError):
    pass


class ShapeError(TabselError, ValueError):
    pass


class DataError(TabselError, ValueError):
    pass


class ParameterError(TabselError, ValueError):
    pass


class SolveError(TabselError):
    pass


class EmptySelectionError(TabselError):
    pass


class CapabilityError(TabselError):
    pass


class AucUndefinedError(TabselError):
    pass


class ConfigError(TabselError):
    pass


class CellError(TabselError):
    """Wraps an error raised inside one (selection, classifier) grid cell."""

    def __init__(self, selection, classifier, cause):
        self.selection = selection
        self.classifier = classifier
        self.cause = cause
        super().__init__(f"cell ({selection}, {classifier}) failed: {type(cause).__name__}: {cause}")
