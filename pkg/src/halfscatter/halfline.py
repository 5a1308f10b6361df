"""Half-line scattering reduced to the trivial full-line extension.

A potential on [0, inf) with the boundary condition at x = 0 is extended
by zero to x < 0. With (c_A, c_B) the homogeneous boundary pair, the left
amplitudes are proportional to (c_B, -c_A) and the half-line reflection
amplitude is

    R = (c_B m11 - c_A m12) / (c_B m21 - c_A m22).

Zeros of the denominator are bound states, resonances and spectral
singularities; zeros of the numerator at real k > 0 are perfect absorption.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import (BoundaryCondition, PotentialSpec, ScatteringAmplitudes, TransferMatrix,
                   amplitudes_from_matrix, transfer_matrix)
from .errors import DomainError, SpectralSingularityAtRealK
from .numerics import ComplexRegion, find_complex_roots, find_real_zeros_complex

AXIS_TOL = 1e-8


class SpectralKind(enum.Enum):
    BOUND_STATE = "BoundState"
    RESONANCE = "Resonance"
    ANTI_RESONANCE = "AntiResonance"
    SPECTRAL_SINGULARITY = "SpectralSingularity"
    PERFECT_ABSORPTION = "PerfectAbsorption"
    NON_PHYSICAL = "NonPhysical"


@dataclass(frozen=True)
class SpectralPoint:
    k: complex
    kind: SpectralKind
    residual: float
    physical: bool = True


@dataclass(frozen=True)
class HalfLineProblem:
    pot: PotentialSpec
    bc: BoundaryCondition

    def __post_init__(self):
        support = self.pot.support
        if support is not None and support[0] < 0:
            raise DomainError("half-line potentials must be supported in [0, inf)")

    def matrix(self, k) -> TransferMatrix:
        return transfer_matrix(self.pot, k)


def _real_positive(k) -> float:
    if isinstance(k, complex):
        if k.imag != 0:
            raise DomainError(f"k must be real, got {k}")
        k = k.real
    k = float(k)
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    return k


def _numerator(M, c_a, c_b):
    return c_b * M.m11 - c_a * M.m12


def _denominator(M, c_a, c_b):
    return c_b * M.m21 - c_a * M.m22


def reflection_from_amplitudes(amps: ScatteringAmplitudes, c_a: complex, c_b: complex) -> complex:
    """Half-line reflection from full-line R^l, R^r, T.

    ``R = R^r - T^2 / (R^l + gamma)``, written homogeneously.
    """
    return amps.r_right - amps.t ** 2 * c_b / (c_b * amps.r_left + c_a)


def halfline_reflection(prob: HalfLineProblem, k, cross_check: bool = False) -> complex:
    """Reflection amplitude A+/B+ of the half-line problem at real k > 0.

    Raises SpectralSingularityAtRealK where the denominator vanishes.
    With ``cross_check`` the amplitude form is evaluated as well and the
    two are required to agree to 1e-12 (relative to max(1, |R|)).
    """
    k = _real_positive(k)
    c_a, c_b = prob.bc.homogeneous(k)
    M = prob.matrix(k)
    num, den = _numerator(M, c_a, c_b), _denominator(M, c_a, c_b)
    if abs(den) <= 1e-14 * max(abs(num), 1e-300):
        raise SpectralSingularityAtRealK(k)
    R = num / den
    if cross_check:
        alt = reflection_from_amplitudes(amplitudes_from_matrix(M), c_a, c_b)
        if abs(alt - R) > 1e-12 * max(1.0, abs(R)):
            raise AssertionError(f"reflection formulas disagree at k={k}: {R} vs {alt}")
    return R


def _normalized(value, c_a, c_b, p, q):
    return value / (max(abs(c_a), abs(c_b)) * max(abs(p), abs(q)))


def singularity_residual(prob: HalfLineProblem, k) -> complex:
    """Scale-free ``c_B m21 - c_A m22``; its zeros are the poles of R."""
    k = complex(k)
    c_a, c_b = prob.bc.homogeneous(k)
    M = prob.matrix(k)
    return _normalized(_denominator(M, c_a, c_b), c_a, c_b, M.m21, M.m22)


def absorption_residual(prob: HalfLineProblem, k) -> complex:
    """Scale-free ``c_B m11 - c_A m12``; its real zeros are perfect absorption."""
    k = complex(k)
    c_a, c_b = prob.bc.homogeneous(k)
    M = prob.matrix(k)
    return _normalized(_numerator(M, c_a, c_b), c_a, c_b, M.m11, M.m12)


def classify(k: complex, tol: float = AXIS_TOL) -> tuple[SpectralKind, bool]:
    """Kind of a pole of R at k, and whether it is physical."""
    size = abs(k)
    if size == 0:
        return SpectralKind.NON_PHYSICAL, False
    on_imag = abs(k.real) < tol * size
    on_real = abs(k.imag) < tol * size
    if on_imag:
        if k.imag > 0:
            return SpectralKind.BOUND_STATE, True
        return SpectralKind.NON_PHYSICAL, False
    if on_real:
        if k.real > 0:
            return SpectralKind.SPECTRAL_SINGULARITY, True
        return SpectralKind.NON_PHYSICAL, False
    # time dependence exp(-i k^2 t): decays for Im(k^2) < 0
    if (k * k).imag < 0:
        return SpectralKind.RESONANCE, True
    return SpectralKind.ANTI_RESONANCE, True


def find_spectral_points(prob: HalfLineProblem, region: ComplexRegion,
                         tol: float = 1e-10) -> list[SpectralPoint]:
    """Poles of the half-line reflection amplitude inside ``region``."""

    def raw(k):
        if k == 0:
            return complex("inf")
        c_a, c_b = prob.bc.homogeneous(k)
        return _denominator(prob.matrix(k), c_a, c_b)

    roots = find_complex_roots(raw, region, tol=tol)
    points = []
    for k in roots:
        kind, physical = classify(k)
        points.append(SpectralPoint(k, kind, abs(singularity_residual(prob, k)), physical))
    return points


def find_perfect_absorption(prob: HalfLineProblem, lo: float, hi: float,
                            tol: float = 1e-9, n_grid: int = 2000) -> list[float]:
    """Real k in [lo, hi] at which the half-line reflection vanishes."""
    if not lo > 0:
        raise DomainError("perfect absorption search needs lo > 0")
    return find_real_zeros_complex(lambda k: absorption_residual(prob, k), lo, hi, tol, n_grid)


def boundary_from_external_reflection(R_minus: complex) -> BoundaryCondition:
    """Boundary condition equivalent to a scatterer on the left of x = 0.

    ``R_minus`` is the right-incidence reflection amplitude A0/B0 of the
    left scatterer, measured just right of x = 0 with free space there.
    Matching ``psi(0) = B0 (R + 1)`` and ``psi'(0) = i k B0 (R - 1)``
    gives ``alpha = i (R - 1)``, ``beta = -(R + 1)`` and so
    ``gamma = -1 / R``.
    """
    R = complex(R_minus)
    return BoundaryCondition(1j * (R - 1), -(R + 1))
