"""Repetitive transient extraction: decompose a noisy 1-D signal into two
periodic group-sparse components plus residual, and identify their
repetition frequencies from envelope spectra.
"""

from .analysis import EnvelopeSpectrum, PeakReport, envelope_spectrum, find_peaks, rmse
from .penalties import PenaltySpec, majorize_scalar, majorizer_denom, penalty, smoothed_penalty
from .params import (
    NoiseEstimate,
    PeriodSpec,
    beta_lookup,
    build_weight_array,
    choose_lambdas,
    default_config,
    estimate_sigma,
    mca_config,
)
from .regularizers import (
    WeightArray,
    combined_majorizer_weights,
    combined_penalty,
    group_majorizer_gap,
    group_penalty,
    majorizer_weights,
)
from .solver import (
    DecompositionResult,
    NumericalError,
    SolverConfig,
    check_convexity,
    combined_majorizer_gap,
    eval_cost,
    pogs_solve,
    rtea_solve,
    rtea_step,
)
from .synth import GeneratedTrain, Mixture, TransientTrain, add_awgn, gen_mixture, gen_train, gen_transient

__version__ = "0.1.0"

__all__ = [
    "DecompositionResult",
    "EnvelopeSpectrum",
    "GeneratedTrain",
    "Mixture",
    "NoiseEstimate",
    "NumericalError",
    "PeakReport",
    "PenaltySpec",
    "PeriodSpec",
    "SolverConfig",
    "TransientTrain",
    "WeightArray",
    "add_awgn",
    "beta_lookup",
    "build_weight_array",
    "check_convexity",
    "choose_lambdas",
    "combined_majorizer_gap",
    "combined_majorizer_weights",
    "combined_penalty",
    "default_config",
    "envelope_spectrum",
    "estimate_sigma",
    "eval_cost",
    "find_peaks",
    "gen_mixture",
    "gen_train",
    "gen_transient",
    "group_majorizer_gap",
    "group_penalty",
    "majorize_scalar",
    "majorizer_denom",
    "majorizer_weights",
    "mca_config",
    "penalty",
    "pogs_solve",
    "rmse",
    "rtea_solve",
    "rtea_step",
    "smoothed_penalty",
]
