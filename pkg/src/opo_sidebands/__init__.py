"""Gaussian-state model of the six sideband modes of a triply resonant OPO.

The pipeline runs mean fields -> crystal drift -> gain -> open-cavity
scattering -> quadrature covariance, optionally dressed by phonon reservoirs.
"""

from .numerics import SingularMatrixError, direct_sum, expm, solve
from .sideband import MeanFields, drift_matrix_sa, gain_matrix_full, gain_matrix_sa, lambda_transform
from .steady_state import CavityLosses, OperatingPoint, mean_fields, threshold_strength
from .cavity import MirrorSet, OscillationBoundaryError, cavity_loop, mirror_set, phase_matrix
from .phonon import PhononParams
from .config import ConfigError, OpoConfig, load_config, reference_config
from .covariance import CovarianceMatrix, PhysicalityError, SABlocks, output_covariance, to_sa_blocks

__version__ = "0.1.0"

__all__ = [
    "CavityLosses",
    "ConfigError",
    "CovarianceMatrix",
    "MeanFields",
    "MirrorSet",
    "OperatingPoint",
    "OpoConfig",
    "OscillationBoundaryError",
    "PhononParams",
    "PhysicalityError",
    "SABlocks",
    "SingularMatrixError",
    "cavity_loop",
    "direct_sum",
    "drift_matrix_sa",
    "expm",
    "gain_matrix_full",
    "gain_matrix_sa",
    "lambda_transform",
    "load_config",
    "mean_fields",
    "mirror_set",
    "output_covariance",
    "phase_matrix",
    "reference_config",
    "solve",
    "threshold_strength",
    "to_sa_blocks",
]
