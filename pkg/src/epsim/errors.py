"""Exception hierarchy.

Every error carries a ``module`` tag so the CLI can report which stage of the
pipeline rejected its input.
"""


class EpsimError(Exception):
    """Base class for all errors raised by this package."""

    module = "epsim"


class CsvParseError(EpsimError):
    """A CSV row could not be parsed; the message names the line number."""

    module = "market_data"


class ValidationError(EpsimError):
    """A bar violates OHLCV consistency; the message names the date."""

    module = "market_data"


class EmptyInputError(EpsimError):
    """An input file contains no data rows."""

    module = "market_data"


class AlignmentError(EpsimError):
    """Calendar intersection across series is empty."""

    module = "market_data"


class ConfigurationError(EpsimError):
    """A configuration value is inconsistent (bad split, unknown key, ...)."""

    module = "config"


class WindowError(EpsimError):
    """Not enough history to form the requested window."""

    module = "market_data"


class FitError(EpsimError):
    """Predictor fitting failed (singular system, too little data)."""

    module = "predictor"


class PredictionImportError(EpsimError):
    """An external prediction file does not match the trading calendar."""

    module = "predictor"


class EvaluationError(EpsimError):
    """A metric was requested over an empty or uncovered day range."""

    module = "predictor"


class SimulationSetupError(EpsimError):
    """Predictions and the test calendar do not line up."""

    module = "trade_engine"


class MetricError(EpsimError):
    """A performance metric was requested on degenerate input."""

    module = "trade_engine"


class AttackSetupError(EpsimError):
    """A perturbation cannot be crafted for the requested day."""

    module = "attack"


class ReportError(EpsimError):
    """A result file is missing, empty, or has a mismatched schema."""

    module = "report"


class ZeroVolatilityWarning(RuntimeWarning):
    """Sharpe ratio was requested on a zero-volatility return stream."""
