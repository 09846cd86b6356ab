"""Exception types raised by the library."""


class WeylapError(Exception):
    """Base class for all library errors."""


class NonIntegrableTail(WeylapError, ValueError):
    """A primitive anchored at -inf was requested for a signal whose left tail
    cannot be certified integrable."""


class DegenerateScan(WeylapError, ValueError):
    """The xi-scan (or window) describes an empty set of evaluation points."""


class DimensionMismatch(WeylapError, ValueError):
    """Two signals with different output dimensions were combined."""


class EmptyRange(WeylapError, ValueError):
    """A translation query spans no tau values."""


class NegativeTime(WeylapError, ValueError):
    """A semigroup was evaluated at t < 0."""


class StabilityViolation(WeylapError):
    """The declared stability envelope (M, delta) does not hold."""


class InvalidExponent(WeylapError, ValueError):
    """An exponent outside the admissible range was supplied."""


class ExponentMismatch(WeylapError, ValueError):
    """Exponents q, r do not combine into an admissible p >= 1."""


class NotAContraction(WeylapError):
    """The solution operator is not certified to be a contraction."""


class HypothesisViolated(WeylapError, ValueError):
    """A lemma was invoked outside its hypotheses."""


class ConfigError(WeylapError, ValueError):
    """Invalid run configuration; `field` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class _WithHistory(WeylapError):
    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class NotConverged(_WithHistory):
    """An iterative estimate did not meet its stopping rule.

    The recorded history is available as ``.history``.
    """


class MaxIterExceeded(_WithHistory):
    """Picard iteration ran out of iterations; residuals are in ``.history``."""
