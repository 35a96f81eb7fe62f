"""Exception hierarchy shared by every module."""


class BnConcurError(Exception):
    """Base class for all errors raised by the library."""


class ParseError(BnConcurError):
    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: "
        super().__init__(where + message)


class StructureError(BnConcurError):
    """A model violates a structural requirement (e.g. empty preset, loops)."""


class DimensionError(BnConcurError):
    """Dimension mismatch or exhaustive-operation cap exceeded."""


class BudgetExceeded(BnConcurError):
    """An exploration hit its configured state/cycle/step budget."""


class SafetyViolation(BnConcurError):
    """Firing would put a second token on a place of a safe net."""

    def __init__(self, transition, marking, places):
        self.transition = transition
        self.marking = marking
        self.places = places
        super().__init__(
            f"firing {transition!r} from {sorted(marking)} would double-mark {sorted(places)}"
        )


class NotEnabled(BnConcurError):
    pass


class InvariantViolation(BnConcurError):
    """A property that the theory guarantees failed during exploration."""
