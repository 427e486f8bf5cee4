"""Exception hierarchy shared across the package."""


class EcoGradeError(Exception):
    """Base class for all domain errors raised by this package."""


class ConfigError(EcoGradeError):
    """A configuration file or parameter is malformed or incomplete."""


class UnknownCity(EcoGradeError):
    """The bedroom lookup table has no rows for the requested city."""


class OutOfRange(EcoGradeError):
    """A floor area falls outside the lookup table's covered span."""


class NoOption(EcoGradeError):
    """No transport point of the requested mode exists in any snapshot."""

    def __init__(self, mode: str):
        super().__init__(f"no transport option of mode {mode!r}")
        self.mode = mode


class NoTransportData(EcoGradeError):
    """No transport points of any mode are available for a listing."""


class NoComparableData(EcoGradeError):
    """No certificate neighbors exist even after widening the search."""


class FactorUnavailable(EcoGradeError):
    """A score factor cannot be computed because its inputs are absent."""


class NoScore(EcoGradeError):
    """No factor at all is available, so no overall score exists."""


class DegenerateVariance(EcoGradeError):
    """Pooled variance is zero; the effect size is undefined."""


class InsufficientSamples(EcoGradeError):
    """Too few samples for the effect-size computation."""


class InsufficientData(EcoGradeError):
    """A statistical test needs more data (n >= 2 and positive variance)."""
