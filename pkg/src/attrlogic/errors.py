"""Exception hierarchy shared across the toolkit."""


class AttrLogicError(Exception):
    """Base class for all toolkit errors."""


class RuleSyntaxError(AttrLogicError):
    """Malformed rule source. Carries 1-based line and column."""

    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class UnknownAttributeError(AttrLogicError):
    def __init__(self, name: str, line: int | None = None):
        loc = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown attribute {name!r}{loc}")
        self.name = name
        self.line = line


class DuplicateGroupError(AttrLogicError):
    def __init__(self, name: str):
        super().__init__(f"duplicate group name {name!r}")
        self.name = name


class EmptyExhaustiveGroupError(AttrLogicError):
    def __init__(self, name: str):
        super().__init__(f"group {name!r} is empty but marked exhaustive")
        self.name = name


class UnknownPresetError(AttrLogicError):
    def __init__(self, name: str):
        super().__init__(f"unknown rule preset {name!r}")
        self.name = name


class DimensionMismatchError(AttrLogicError):
    pass


class EmptyBatchError(AttrLogicError):
    pass


class NoExclusiveGroupsError(AttrLogicError):
    pass


class NoExhaustiveGroupsError(AttrLogicError):
    pass


class MissingConfidencesError(AttrLogicError):
    """Raised when an operation needs confidence scores but got hard 0/1 labels."""


class UnsatisfiableRulesError(AttrLogicError):
    pass


class LabelsParseError(AttrLogicError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class HeaderMismatchError(AttrLogicError):
    pass


class ValueOutOfRangeError(AttrLogicError):
    def __init__(self, line: int, value: str):
        super().__init__(f"line {line}: value {value!r} outside [0, 1]")
        self.line = line
        self.value = value


class ShapeMismatchError(AttrLogicError):
    pass


class DomainError(AttrLogicError):
    pass


class ConfigError(AttrLogicError):
    pass
