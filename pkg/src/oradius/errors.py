"""Exception hierarchy shared by every module."""


class OradiusError(Exception):
    """Base class; ``code`` is the short name printed by the CLI."""

    @property
    def code(self) -> str:
        return type(self).__name__


class DimensionMismatch(OradiusError, ValueError):
    pass


class InvalidMatrix(OradiusError, ValueError):
    pass


class NotHermitian(OradiusError, ValueError):
    pass


class DomainError(OradiusError, ValueError):
    pass


class NegativeArgument(OradiusError, ValueError):
    pass


class NotConvex(OradiusError, ValueError):
    pass


class MaximizerUnbounded(OradiusError, ArithmeticError):
    pass


class ToleranceUnreachable(OradiusError, ArithmeticError):
    pass


class UnknownBound(OradiusError, LookupError):
    pass


class MissingInput(OradiusError, ValueError):
    pass


class ParamOutOfRange(OradiusError, ValueError):
    pass


class NotPSD(OradiusError, ValueError):
    pass


class NotContraction(OradiusError, ValueError):
    pass


class NotSubmultiplicative(OradiusError, ValueError):
    pass


class NotCommuting(OradiusError, ValueError):
    pass


class IncomparableBounds(OradiusError, ValueError):
    pass


class UnknownEnsemble(OradiusError, LookupError):
    pass


class ManifestError(OradiusError, ValueError):
    pass


class SpecifierError(OradiusError, ValueError):
    pass
