"""Exception and warning types raised across the toolkit."""


class DefectSpectroError(Exception):
    """Base class for all toolkit errors."""


class ParseError(DefectSpectroError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(DefectSpectroError):
    """Missing field, unknown field or wrong type; ``location`` is a JSON path."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class ValidationError(DefectSpectroError):
    """A domain invariant is violated."""


class UnknownSpecies(DefectSpectroError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class EqualCharges(DefectSpectroError, ValueError):
    pass


class EmptyInput(DefectSpectroError, ValueError):
    pass


class ConvergenceFailure(DefectSpectroError, RuntimeError):
    pass


class InvalidSpin(DefectSpectroError, ValueError):
    pass


class NonHermitian(DefectSpectroError, ValueError):
    pass


class MalformedPromotion(DefectSpectroError, ValueError):
    pass


class SingularDesign(DefectSpectroError, ValueError):
    pass


class EmptyData(DefectSpectroError, ValueError):
    pass


class FermiOutOfGap(UserWarning):
    """Fermi level outside [0, band gap]; the result is still returned."""


class QuadrupoleForbidden(UserWarning):
    """Quadrupole term requested for I <= 1/2."""
