"""Dark states, EIT susceptibility and intensity-dependent dispersion of Chain-Lambda atoms."""

from .darkstate import DarkState, dark_state_analytic, dark_state_numeric, normalize
from .errors import (
    BranchCutError,
    ChainLambdaError,
    ConfigurationError,
    DegenerateInputError,
    IntegrationInstabilityError,
    NonUniqueSteadyStateError,
    SingularSystemError,
    StepSizeError,
    UnsupportedChainLengthError,
    UnsupportedModeError,
    ValidityWarning,
)
from .linalg import (
    SymmetricTridiagonal,
    eig_symmetric_tridiagonal,
    nearest_zero_eigenpair,
    solve_complex_linear,
)
from .master import (
    DensityMatrix,
    Liouvillian,
    absorption_surface,
    adiabatic_fidelity,
    build_liouvillian,
    dispersion_master,
    evolve,
    steady_state,
    susceptibility_from_rho,
)
from .model import (
    ChainConfig,
    Detunings,
    build_hamiltonian,
    clebsch_gordan_couplings,
    kappa,
)
from .optics import (
    DispersionResult,
    GroupVelocityResult,
    Susceptibility,
    dispersion_analytic,
    dispersion_maximum,
    dispersion_numeric,
    group_velocity,
    susceptibility_from_state,
    sweep_dispersion,
)

__version__ = "0.1.0"
