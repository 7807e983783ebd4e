"""Ultra-narrowband composite pulse design and motional-state detection
simulation for a two-level system coupled to a harmonic oscillator."""

from .coupling import (
    CouplingParams,
    CouplingSignError,
    bsb_coupling,
    laguerre_assoc,
    ld_coupling,
    relative_area,
)
from .data import get_sequence, sequence_names
from .distributions import PhononDistribution, TruncationError
from .optimizer import OptimizationSpec, optimize, verify_table
from .profiles import (
    AlphaResult,
    DegenerateProfileError,
    ExcitationProfile,
    alpha_of,
    band_by_reference,
    calibrate_band_coupling,
    phonon_passband,
    profile,
    separable_transitions,
    single_pulse_alpha,
)
from .protocols import (
    NoiseModel,
    ProbeOutcome,
    coherent_scan,
    confusion_matrix,
    detection_probability,
    single_shot_exact,
    single_shot_run,
    single_shot_statistics,
    triple_detection,
)
from .pulses import PhaseSequence, compose, excitation, excitation_profile, rotation

__version__ = "0.1.0"

__all__ = [
    "AlphaResult",
    "CouplingParams",
    "CouplingSignError",
    "DegenerateProfileError",
    "ExcitationProfile",
    "NoiseModel",
    "OptimizationSpec",
    "PhaseSequence",
    "PhononDistribution",
    "ProbeOutcome",
    "TruncationError",
    "alpha_of",
    "band_by_reference",
    "bsb_coupling",
    "calibrate_band_coupling",
    "coherent_scan",
    "compose",
    "confusion_matrix",
    "detection_probability",
    "excitation",
    "excitation_profile",
    "get_sequence",
    "laguerre_assoc",
    "ld_coupling",
    "optimize",
    "phonon_passband",
    "profile",
    "relative_area",
    "rotation",
    "separable_transitions",
    "sequence_names",
    "single_pulse_alpha",
    "single_shot_exact",
    "single_shot_run",
    "single_shot_statistics",
    "triple_detection",
    "verify_table",
]
