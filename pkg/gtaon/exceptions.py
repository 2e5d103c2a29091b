"""gtaon exceptions."""


class GTAONException(Exception):
    """Base gtaon exceptions class."""


class InvalidParameterError(GTAONException, ValueError):
    """Exception for invalid model or design parameters."""


class DegenerateDesignError(GTAONException):
    """Class for designs that collapse to a trivial matrix."""


class InvalidDesignError(GTAONException):
    """Class for matrices that do not have the structure a routine expects."""


class UnsupportedDesignError(GTAONException):
    """Class for design kinds a routine does not handle."""


class InstanceTooLargeError(GTAONException):
    """Exceptions class for exhaustive routines over their guard."""


class NoConsistentSetError(GTAONException):
    """Exceptions class for outcomes that no k-set reproduces."""


class ModelViolationError(GTAONException):
    """Class for outcomes impossible under the noiseless OR model."""


class RegimeError(GTAONException):
    """Exceptions class for bounds evaluated outside their range."""


class ConfigError(GTAONException):
    """Exceptions class for errors in sweep configurations."""


class ParsingError(ConfigError):
    """Exceptions class for error in grid expression parsing."""


class SerializationError(GTAONException):
    """Exceptions class for errors in loading dumps."""


class OracleFailure(GTAONException):
    """Exceptions class for oracle mismatches."""


class GTAONWarning(UserWarning):
    """Class for gtaon warnings."""


class DuplicateTestCountWarning(GTAONWarning):
    """Two grid points round to the same number of tests."""


class IndeterminateWitnessWarning(GTAONWarning):
    """Randomised witness search ran out of budget."""


class RegimeWarning(GTAONWarning):
    """A bound is evaluated outside the hypothesis it comes from."""
