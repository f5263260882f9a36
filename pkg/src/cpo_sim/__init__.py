"""Pump depletion, phase-sensitive probe transmission, and quadrature noise
in a Lambda medium with a long-lived ground-state grating.

The library is organised bottom-up: `medium` holds parameters and the
steady state, `pump` the depletion profile, `probe` the linear response of
the probe field, `noise` the closed-form quadrature spectra, `oracle` the
independent checks (deterministic integrals, Monte Carlo, the fluctuation
to dissipation bookkeeping), and `fitting` the four-parameter model for
measured transmission curves.
"""

from .errors import DomainError, FitConvergenceError, UsageError, ValidityWarning
from .fitting import (
    PARAM_NAMES,
    DataRow,
    FitParams,
    FitResult,
    TransmissionDataset,
    fit,
    medium_for,
    model_transmission,
    synthesize_dataset,
)
from .medium import (
    BASIS,
    MediumParams,
    SteadyStateDensityMatrix,
    saturation_from_power,
    steady_state,
)
from .noise import (
    DiffusionMatrix,
    InputFieldState,
    QuadratureSpectrum,
    VarianceEvolution,
    diffusion_coefficients,
    spectrum,
    squeezing_spectrum_p,
    squeezing_spectrum_q,
    variance_evolution,
)
from .oracle import (
    DETERMINISTIC,
    MONTE_CARLO,
    DeltaModelResolution,
    OracleConfig,
    OracleReport,
    deterministic_noise_integral,
    dissipator_heisenberg,
    einstein_diffusion,
    force_correlators,
    monte_carlo_fluctuations,
    resolve_delta_model,
)
from .probe import (
    DELTA_MODELS,
    PropagationEigenvalues,
    TransmissionResult,
    adiabatic_expansion,
    delta_cpo,
    eigenvalues,
    propagate_mean_quadratures,
    transmission,
)
from .pump import (
    GainFactor,
    SaturationProfile,
    gain_at,
    integrate_profile_ode,
    saturation_exact,
    solve_profile,
    solve_saturation,
    zeta_for_gain,
)

__version__ = "0.1.0"

__all__ = [
    "BASIS",
    "DELTA_MODELS",
    "DETERMINISTIC",
    "MONTE_CARLO",
    "PARAM_NAMES",
    "DataRow",
    "DeltaModelResolution",
    "DiffusionMatrix",
    "DomainError",
    "FitConvergenceError",
    "FitParams",
    "FitResult",
    "GainFactor",
    "InputFieldState",
    "MediumParams",
    "OracleConfig",
    "OracleReport",
    "PropagationEigenvalues",
    "QuadratureSpectrum",
    "SaturationProfile",
    "SteadyStateDensityMatrix",
    "TransmissionDataset",
    "TransmissionResult",
    "UsageError",
    "ValidityWarning",
    "VarianceEvolution",
    "adiabatic_expansion",
    "delta_cpo",
    "deterministic_noise_integral",
    "diffusion_coefficients",
    "dissipator_heisenberg",
    "einstein_diffusion",
    "fit",
    "force_correlators",
    "gain_at",
    "integrate_profile_ode",
    "medium_for",
    "model_transmission",
    "monte_carlo_fluctuations",
    "propagate_mean_quadratures",
    "resolve_delta_model",
    "saturation_exact",
    "saturation_from_power",
    "solve_profile",
    "solve_saturation",
    "spectrum",
    "squeezing_spectrum_p",
    "squeezing_spectrum_q",
    "steady_state",
    "synthesize_dataset",
    "transmission",
    "variance_evolution",
    "zeta_for_gain",
]
