"""Survival-probability dynamics: lattice oracle, spectral solver, approximants."""
from .approximants import (
    REFERENCE_COEFFICIENTS,
    Approximant,
    ApproximantForm,
    Timescales,
    build_approximant,
    ep2b_coefficients,
    evaluate_approximant,
    timescales,
)
from .lattice import lattice_hamiltonian, lattice_survival, required_sites
from .series import TimeSeries, linear_grid, log_grid
from .spectral import (
    bessel_amplitude,
    bessel_survival_amplitude,
    edge_asymptote,
    green_derivative,
    green_lambda,
    spectral_amplitude,
    spectral_density,
    spectral_survival,
)

__all__ = [
    "TimeSeries",
    "linear_grid",
    "log_grid",
    "lattice_hamiltonian",
    "lattice_survival",
    "required_sites",
    "green_lambda",
    "green_derivative",
    "spectral_density",
    "spectral_amplitude",
    "spectral_survival",
    "edge_asymptote",
    "bessel_amplitude",
    "bessel_survival_amplitude",
    "ApproximantForm",
    "Approximant",
    "Timescales",
    "REFERENCE_COEFFICIENTS",
    "build_approximant",
    "evaluate_approximant",
    "ep2b_coefficients",
    "timescales",
]
