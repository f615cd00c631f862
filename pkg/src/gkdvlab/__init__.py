"""Pseudo-spectral laboratory for integrable / non-integrable gKdV proximity experiments."""

__version__ = "0.1.0"

from .spectral import (  # noqa: F401
    Grid,
    RealField,
    SpectralCoeffs,
    dealiased_product,
    derivative,
    forward,
    inverse,
    l2_norm,
    linf_norm,
    sobolev_norm,
)
from .models import ModelSpec, PolynomialNonlinearity  # noqa: F401
