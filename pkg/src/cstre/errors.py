"""Exception hierarchy shared by all modules."""


class CstreError(ValueError):
    """Base class for every error raised by this package."""


class NotHermitian(CstreError):
    pass


class TraceNotOne(CstreError):
    pass


class NotPSD(CstreError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class BadIndexSet(CstreError):
    pass


class BadExcitationNumber(CstreError):
    pass


class SupportViolation(CstreError):
    pass


class DegenerateSupport(CstreError):
    pass


class NoSignChange(CstreError):
    """Bisection bracket [lo, hi] does not straddle a sign change.

    The endpoint criterion values are kept so callers can report what the
    criterion looked like on the family.
    """

    def __init__(self, message, value_lo=None, value_hi=None):
        super().__init__(message)
        self.value_lo = value_lo
        self.value_hi = value_hi


class MatrixParseError(CstreError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column
