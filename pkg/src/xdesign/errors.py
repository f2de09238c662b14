"""Exception types raised by the planning pipeline."""


class XDesignError(ValueError):
    """Base class for all library errors."""


class ConfigurationError(XDesignError):
    """A config value is out of range or inconsistent; the message names the field."""


class IngestionError(XDesignError):
    """A CSV log could not be parsed; the message cites the offending row."""


class CalibrationError(XDesignError):
    """Outcome scales could not be derived from the panel."""


class PlanningError(XDesignError):
    """A design cannot be evaluated on this panel (e.g. too few assignment units)."""
