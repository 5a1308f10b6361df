"""Half-line scattering through full-line transfer matrices."""

from .core import (Barrier, BoundaryCondition, Delta, PotentialSpec, ScatteringAmplitudes,
                   TransferMatrix, amplitudes_from_matrix, barrier_transfer_matrix, compose,
                   delta_transfer_matrix, matrix_from_amplitudes, transfer_matrix)
from .errors import (ConvergenceError, DomainError, EvaluationError, ScatterError,
                     SpectralSingularityAtRealK, TransmissionSingularityError)
from .halfline import (HalfLineProblem, SpectralKind, SpectralPoint, absorption_residual,
                       boundary_from_external_reflection, find_perfect_absorption,
                       find_spectral_points, halfline_reflection, singularity_residual)
from .numerics import ComplexRegion, RootList, find_complex_roots, find_real_roots, integrate_schrodinger

__version__ = "0.1.0"

__all__ = [
    "Barrier", "BoundaryCondition", "ComplexRegion", "ConvergenceError", "Delta", "DomainError",
    "EvaluationError", "HalfLineProblem", "PotentialSpec", "RootList", "ScatterError",
    "ScatteringAmplitudes", "SpectralKind", "SpectralPoint", "SpectralSingularityAtRealK",
    "TransferMatrix", "TransmissionSingularityError", "absorption_residual",
    "amplitudes_from_matrix", "barrier_transfer_matrix", "boundary_from_external_reflection",
    "compose", "delta_transfer_matrix", "find_complex_roots", "find_perfect_absorption",
    "find_real_roots", "find_spectral_points", "halfline_reflection", "integrate_schrodinger",
    "matrix_from_amplitudes", "singularity_residual", "transfer_matrix",
]
