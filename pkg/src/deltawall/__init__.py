"""Spectra, adiabatic cycles and level permutations of a box with a movable delta wall."""

from .cycles import (
    CyclePath,
    SpectralFlow,
    concatenate,
    holonomy_permutation,
    inverse_cycle,
    make_cx,
    make_cy,
    plan_connection,
    plan_permutation,
    trace,
)
from .errors import (
    BranchError,
    DeltaWallError,
    DomainError,
    ExceptionalConfigurationError,
    NormDriftError,
    UnsupportedEndpointError,
)
from .model import DEFAULT_CONFIG, INF, Level, SideLabel, Spectrum, WallState, WellConfig
from .oracle import oracle_eigenvalues, oracle_spectrum
from .permutation import Permutation, compose, compose_all, inverse
from .spectrum import (
    characteristic_value,
    characteristic_value_negative,
    eigenfunction,
    exceptional_levels,
    separated_spectrum,
    solve_spectrum,
    unperturbed_energy,
)

__version__ = "0.1.0"
