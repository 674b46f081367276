"""Entanglement detection with the conditional sandwiched Tsallis relative entropy."""

from .entropy import (
    EntropyResult,
    ar_q_conditional,
    cstre,
    q_tilde,
    renyi_entropy,
    sandwiched_relative_renyi,
    sandwiched_relative_tsallis,
    traditional_relative_renyi,
    traditional_relative_tsallis,
    tsallis_entropy,
    vn_conditional,
    von_neumann_entropy,
)
from .qlinalg import DensityMatrix, Partition, Spectrum, validate_density
from .separability import Criterion, SweepConfig, ThresholdReport, criteria_table, limit_threshold
from .states import Family, FamilySpec, isospectral_pair, noisy_family

__version__ = "0.1.0"
