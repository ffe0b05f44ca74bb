"""Exception types raised across the package."""


class TvpGarError(Exception):
    """Base class for all package errors."""

    kind = "error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class InputError(TvpGarError, ValueError):
    kind = "input_error"


class LengthError(InputError):
    kind = "length_error"


class DomainError(InputError):
    kind = "domain_error"


class InsufficientDataError(InputError):
    kind = "insufficient_data"


class AlignmentError(InputError):
    kind = "alignment_error"


class ShapeError(InputError):
    kind = "shape_error"


class ParameterError(InputError):
    kind = "parameter_error"


class RankDeficiencyError(InputError):
    kind = "rank_deficiency"

    def __init__(self, message: str, columns: list[str] | None = None):
        super().__init__(message)
        self.columns = list(columns or [])

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["columns"] = self.columns
        return d


class SchemaError(InputError):
    kind = "schema_error"

    def __init__(self, message: str, column: str | None = None, row: int | None = None):
        super().__init__(message)
        self.column = column
        self.row = row

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["column"] = self.column
        d["row"] = self.row
        return d


class ConfigError(TvpGarError):
    kind = "config_error"


class DependencyError(TvpGarError):
    """A required upstream artifact is missing."""

    kind = "dependency_error"

    def __init__(self, message: str, producer: str | None = None):
        super().__init__(message)
        self.producer = producer

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["producer"] = self.producer
        return d


class NumericalError(TvpGarError, ArithmeticError):
    kind = "numerical_error"
