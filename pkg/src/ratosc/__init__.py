"""Coherent states and phase-space diagnostics for rational extensions of
the harmonic oscillator."""

__version__ = "0.1.0"

from .specfun import (
    HypergeometricSpec,
    IntegralResult,
    NumericalError,
    SeriesResult,
    SignedLog,
    hermite,
    hermite_phi,
    hypergeometric,
    integrate,
    log_pochhammer,
    mod_hermite,
)
from .system import (
    DeformedOscillator,
    EigenfunctionEvaluator,
    StateLabel,
    algebra_residual,
    energy,
    hamiltonian_potential,
    ladder_element,
    linearized_element,
    lowest_weights,
    potential,
    q_polynomial,
    verify_hamiltonian,
    wavefunction,
)
from .coherent import (
    CoefficientVector,
    CoherentSpec,
    cat_coefficients,
    coefficients,
    count_local_maxima,
    count_wavepackets,
    density,
    density_profile,
    eigen_residual,
    evolve,
    fringe_wavelength,
    normalization_F,
    overlap,
    overlap_closed_form,
)
from .observables import (
    MomentMatrices,
    UncertaintyResult,
    WignerGrid,
    energy_expectation,
    mandel_q,
    moment_matrices,
    number_moments,
    uncertainty,
    wigner_cross_term,
    wigner_grid,
)
from .beamsplitter import (
    EntropyResult,
    OutputState,
    TwoModeDistribution,
    linear_entropy,
    rank_one_residual,
    split,
    two_photon_distribution,
)

__all__ = [name for name in dir() if not name.startswith("_")]
