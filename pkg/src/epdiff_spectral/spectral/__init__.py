"""Fourier-space building blocks: grids, fields, multipliers, convolution"""

from .convolution import ConvolutionPlan, convolution_size, convolve_direct, convolve_fft
from .field import (
    NormWeight,
    SpectralField,
    check_hermitian,
    extend,
    hermitian_defect,
    inverse_estimate_constant,
    is_hermitian,
    resymmetrize,
    sobolev_norm,
    sobolev_weights,
    truncate,
)
from .grid import FrequencyGrid
from .multipliers import FourierMultiplier, MultiplierKind, apply_multiplier
from .sampling import (
    analyze_from_grid,
    evaluate_at_points,
    grid_pairing,
    grid_points,
    synthesize_on_grid,
)

__all__ = [
    "ConvolutionPlan",
    "FourierMultiplier",
    "FrequencyGrid",
    "MultiplierKind",
    "NormWeight",
    "SpectralField",
    "analyze_from_grid",
    "apply_multiplier",
    "check_hermitian",
    "convolution_size",
    "convolve_direct",
    "convolve_fft",
    "evaluate_at_points",
    "extend",
    "grid_pairing",
    "grid_points",
    "hermitian_defect",
    "inverse_estimate_constant",
    "is_hermitian",
    "resymmetrize",
    "sobolev_norm",
    "sobolev_weights",
    "synthesize_on_grid",
    "truncate",
]
