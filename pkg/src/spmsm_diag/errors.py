"""Exception hierarchy shared by every module of the toolkit."""


class SpmsmError(Exception):
    """Base class for all toolkit errors."""


class InvalidSpecError(SpmsmError, ValueError):
    """A motor or vehicle parameter set violates its invariants."""


class DemagnetizationRiskError(SpmsmError, ValueError):
    """The magnet remanence cannot sustain the requested airgap field."""


class InvalidFaultError(SpmsmError, ValueError):
    """A fault description is out of range or inconsistent with the motor."""


class RotorContactError(SpmsmError, ValueError):
    """Eccentricity is severe enough to close the airgap somewhere."""


class InvalidInputError(SpmsmError, ValueError):
    """A waveform or numeric argument does not meet an operation's preconditions."""


class UndefinedRippleError(InvalidInputError):
    """Ripple is relative to the mean, which is zero here."""


class OutOfBandError(InvalidInputError):
    """A requested frequency lies above the Nyquist limit."""


class InconsistentScenariosError(SpmsmError, ValueError):
    """Scenarios cannot share a table (different bins or frequency columns)."""


class ConfigError(SpmsmError, ValueError):
    """The scenario file cannot be parsed or violates the schema."""
