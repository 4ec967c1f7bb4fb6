"""Exception and warning classes raised by chainlambda."""

import numpy as np


class ChainLambdaError(Exception):
    """Base class for all chainlambda errors."""


class ConfigurationError(ChainLambdaError, ValueError):
    """Invalid physical scenario (bad list lengths, negative rates, ...)."""


class UnsupportedChainLengthError(ChainLambdaError, ValueError):
    """No closed form or coupling table exists for the requested chain."""


class UnsupportedModeError(ChainLambdaError, ValueError):
    """Requested loss-model mode is not available for this chain length."""


class DegenerateInputError(ChainLambdaError, ValueError):
    """Input lies on a singular point of the formula (zero Rabi frequency, zero vector)."""


class StepSizeError(ChainLambdaError, ValueError):
    """Finite-difference or integration step outside its validity range."""


class BranchCutError(ChainLambdaError, ValueError):
    """Refractive index requested on the branch cut of sqrt(1 + chi)."""


class SingularSystemError(ChainLambdaError, np.linalg.LinAlgError):
    """Linear system is singular to working precision."""


class NonUniqueSteadyStateError(SingularSystemError):
    """The Liouvillian has more than one stationary state."""


class IntegrationInstabilityError(ChainLambdaError, RuntimeError):
    """Time integration drifted outside the density-matrix invariants."""


class ValidityWarning(UserWarning):
    """Parameters are outside the regime where an approximation holds."""
