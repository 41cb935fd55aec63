"""Exceptional points and survival dynamics in open tight-binding models.

Submodules
----------
models      Hamiltonian families, dispersion, self-energies.
spectra     Discrete spectra, linearised pencils, norms.
eppoints    Exceptional-point location, classification, Puiseux series.
dynamics    Lattice and spectral survival probabilities, approximants.
fitting     Power-law fits and log-log slopes.
cli         Command-line front end (``epdyn``).
"""
__version__ = "0.1.0"

from .models import Family, ModelSpec  # noqa: E402

__all__ = ["Family", "ModelSpec", "__version__"]
