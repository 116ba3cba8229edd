"""Random induced states, partial transposes and their spectral phase transitions."""

__version__ = "0.1.0"

from .ensembles import (
    DensityMatrix,
    RngStream,
    SamplingError,
    density_log_weight,
    make_stream,
    sample_ginibre,
    sample_induced_state_trace,
    sample_induced_state_wishart,
    sample_mixture_state,
    sample_pure_state,
)
from .bipartite import is_ppt, is_separable_small, partial_trace, partial_transpose
from .laws import SpectralLaw, marchenko_pastur, semicircle
from .spectra import Spectrum, hermitian_eigenvalues

__all__ = [
    "DensityMatrix",
    "RngStream",
    "SamplingError",
    "SpectralLaw",
    "Spectrum",
    "density_log_weight",
    "hermitian_eigenvalues",
    "is_ppt",
    "is_separable_small",
    "make_stream",
    "marchenko_pastur",
    "partial_trace",
    "partial_transpose",
    "sample_ginibre",
    "sample_induced_state_trace",
    "sample_induced_state_wishart",
    "sample_mixture_state",
    "sample_pure_state",
    "semicircle",
]
