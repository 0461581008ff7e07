"""Exception hierarchy. Each class carries a stable ``code`` used by the CLI."""


class AcideError(Exception):
    code = "ERROR"


class AssumptionError(AcideError, ValueError):
    """A cluster breaks a capacity assumption the optimizer relies on."""

    code = "ASSUMPTION_VIOLATED"

    def __init__(self, violations):
        self.violations = list(violations)
        names = ", ".join(v.code for v in self.violations)
        super().__init__(f"cluster violates {names}")


class SingularSystemError(AcideError, ArithmeticError):
    code = "SINGULAR"


class InfeasibleError(AcideError):
    """Phase 2 (plus notification time) leaves no room for Phase 1."""

    code = "INFEASIBLE"


class NoFeasibleClusterError(AcideError):
    code = "NO_FEASIBLE_CLUSTER"


class SizeLimitError(AcideError, ValueError):
    code = "SIZE_LIMIT"


class DimensionMismatchError(AcideError, ValueError):
    code = "DIMENSION_MISMATCH"


class RangeConflictError(AcideError, ValueError):
    code = "RANGE_CONFLICT"


class ParseError(AcideError, ValueError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UnitError(ParseError):
    code = "UNIT_ERROR"
