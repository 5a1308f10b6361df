"""Point nonlinearity ``f(|psi|) psi delta(x - a)`` on the half-line.

The transfer matrix of the nonlinear delta is the linear one with the
coupling replaced by ``f(|psi(a)|)``. On the half-line the left amplitudes
are ``(A-, B-) = w (c_B, -c_A)``, so ``|psi(a)| = |w| q`` with
``q = |c_B e^{2iak} - c_A|`` and the problem collapses to one real
equation for the field modulus at the scatterer.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import BoundaryCondition, TransferMatrix, delta_transfer_matrix
from .errors import ConvergenceError, DomainError
from .numerics import find_real_roots, find_real_zeros_complex

log = logging.getLogger(__name__)

MatrixFunc = Callable[[complex, complex], TransferMatrix]


@dataclass(frozen=True)
class PointNonlinearity:
    f: Callable[[float], complex]
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"scatterer position must be positive, got {self.a}")

    def coupling(self, u: float) -> complex:
        return complex(self.f(u))


@dataclass(frozen=True)
class KerrPoint:
    """Kerr profile ``f(u) = z + s u^2`` of a thin slab of thickness b."""

    z: complex
    s: complex
    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError(f"slab thickness must be positive, got {self.b}")

    def f(self, u: float) -> complex:
        return complex(self.z) + complex(self.s) * u * u

    def sigma(self, k: float) -> complex:
        return -complex(self.s) / (self.b * k * k)

    @classmethod
    def from_optics(cls, eps_hat: complex, sigma: complex, b: float, k: float) -> "KerrPoint":
        return cls(b * k * k * (1 - complex(eps_hat)), -b * k * k * complex(sigma), b)

    def at(self, a: float) -> PointNonlinearity:
        return PointNonlinearity(self.f, a)


def field_at_scatterer(a: float, k: float, A_minus: complex, B_minus: complex) -> float:
    """``|psi(a)|`` for ``psi = A- e^{ikx} + B- e^{-ikx}`` left of the scatterer."""
    return abs(cmath.exp(2j * a * k) * A_minus + B_minus)


def nl_delta_transfer_matrix(pn: PointNonlinearity, k: float, A_minus: complex,
                             B_minus: complex) -> TransferMatrix:
    u = field_at_scatterer(pn.a, k, A_minus, B_minus)
    return delta_transfer_matrix(pn.coupling(u), pn.a, k)


def gauge_transform(M_func: MatrixFunc, f1: Callable[[complex, complex], complex],
                    f2: Callable[[complex, complex], complex]) -> MatrixFunc:
    """``M + [[f1 B-, -f1 A-], [f2 B-, -f2 A-]]``, which acts identically on (A-, B-)."""

    def transformed(A_minus, B_minus):
        M = M_func(A_minus, B_minus)
        p, q = complex(f1(A_minus, B_minus)), complex(f2(A_minus, B_minus))
        return TransferMatrix(M.m11 + p * B_minus, M.m12 - p * A_minus,
                              M.m21 + q * B_minus, M.m22 - q * A_minus)

    return transformed


@dataclass(frozen=True)
class NLSolution:
    A_minus: complex
    B_minus: complex
    A_plus: complex
    R: complex
    branch_index: int
    field: float
    residual: float


@dataclass
class NLSolutionList:
    solutions: list[NLSolution] = field(default_factory=list)
    u_max: float = 0.0
    diagnostics: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]


def _default_matrix(pn: PointNonlinearity, k: float) -> MatrixFunc:
    return lambda A, B: nl_delta_transfer_matrix(pn, k, A, B)


def nl_halfline_solve(pn: PointNonlinearity, bc: BoundaryCondition, k: float, A_r: complex,
                      u_max: Optional[float] = None, matrix: Optional[MatrixFunc] = None,
                      n_grid: int = 4000, max_expand: int = 8) -> NLSolutionList:
    """All solutions for a wave of amplitude ``A_r`` incident from the right.

    Returns one branch per root of the modulus equation
    ``u |D(u)| = q |A_r|``, ordered by |A-|. ``matrix`` may replace the
    nonlinear delta matrix, e.g. by a gauge-transformed one.
    """
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    A_r = complex(A_r)
    if A_r == 0:
        raise DomainError("incident amplitude must be nonzero")
    c_a, c_b = bc.homogeneous(k)
    M_func = matrix or _default_matrix(pn, k)
    e = cmath.exp(2j * pn.a * k)
    q = abs(c_b * e - c_a)

    def amplitudes(w):
        return w * c_b, -w * c_a

    def D(u, w=None):
        if w is None:
            w = u / q if q > 0 else 1.0
        M = M_func(*amplitudes(w))
        return c_b * M.m21 - c_a * M.m22

    out = NLSolutionList()
    if q == 0:
        roots = [0.0]
    else:
        modulus = lambda u: u * abs(D(u)) - q * abs(A_r)
        if u_max is None:
            f0 = abs(pn.coupling(0.0))
            u_max = 10 * abs(A_r) * (1 + q) * max(1.0, 2 * k / f0 if f0 > 0 else 2 * k)
        for _ in range(max_expand):
            if modulus(u_max) > 0:
                break
            out.diagnostics.append(f"modulus equation still negative at u_max={u_max:.6g}; expanding")
            u_max *= 4
        else:
            log.warning("u_max=%g exceeded without closing the modulus equation", u_max)
            out.diagnostics.append(f"u_max={u_max:.6g} exceeded; large-field branches may be missing")
        rl = find_real_roots(modulus, 0.0, u_max, n_grid=n_grid)
        out.diagnostics.extend(rl.diagnostics)
        roots = list(rl.roots)
    out.u_max = float(u_max or 0.0)
    if not roots:
        out.diagnostics.append("no root of the modulus equation in [0, u_max]")
    sols = []
    for u in roots:
        d = D(u)
        if d == 0:
            out.diagnostics.append(f"D(u) = 0 at u={u:.6g}: spectral singularity, skipped")
            continue
        w = A_r / d
        A_m, B_m = amplitudes(w)
        M = M_func(A_m, B_m)
        A_p, B_p = M.apply(A_m, B_m)
        res = abs(B_p - A_r) / abs(A_r)
        sols.append((abs(A_m), A_m, B_m, A_p, A_p / A_r, field_at_scatterer(pn.a, k, A_m, B_m), res))
    sols.sort(key=lambda s: s[0])
    for i, (_, A_m, B_m, A_p, R, u, res) in enumerate(sols):
        out.solutions.append(NLSolution(A_m, B_m, A_p, R, i, u, res))
    return out


def singularity_coupling(bc: BoundaryCondition, a: float, k: float) -> complex:
    """Coupling value at which the delta is a spectral singularity at k.

    ``2ik c_A / (c_A - c_B e^{2iak})``, i.e. ``2ik (1 - e^{2iak}/gamma)^{-1}``.
    """
    c_a, c_b = bc.homogeneous(k)
    den = c_a - c_b * cmath.exp(2j * a * k)
    if abs(den) <= 1e-14 * max(abs(c_a), abs(c_b)):
        raise DomainError("gamma = e^{2iak}: no finite singular coupling")
    if c_a == 0:
        raise DomainError("gamma = 0: singular coupling vanishes identically")
    return 2j * k * c_a / den


@dataclass
class NLSingularity:
    amplitudes: list[float] = field(default_factory=list)
    degenerate: bool = False
    target: complex = 0j
    diagnostics: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.amplitudes)

    def __len__(self):
        return len(self.amplitudes)


def nl_spectral_singularity_amplitude(pn: PointNonlinearity, bc: BoundaryCondition, k: float,
                                      u_max: float = 1e3, n_grid: int = 20000,
                                      tol: float = 1e-10,
                                      matrix: Optional[MatrixFunc] = None) -> NLSingularity:
    """Outgoing amplitudes |A+| > 0 of purely outgoing (lasing) solutions at k.

    Solves ``f(|A+|) = 2ik / (1 - e^{2iak}/gamma)`` and checks each root by
    building the field and verifying that no wave comes in
    (``B+ = 0``) and that ``|A+|`` equals the field at the scatterer.
    A constant f equal to the target is reported as ``degenerate``.
    """
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    target = singularity_coupling(bc, pn.a, k)
    out = NLSingularity(target=target)
    scale = max(1.0, abs(target))
    probe = np.linspace(0.0, u_max, 257)
    gap = np.array([abs(pn.coupling(u) - target) for u in probe])
    if np.all(gap < tol * scale):
        out.degenerate = True
        out.diagnostics.append("f equals the singular coupling identically: linear spectral singularity")
        return out
    roots = find_real_zeros_complex(lambda u: (pn.coupling(u) - target) / scale, 0.0, u_max,
                                    tol, n_grid=n_grid)
    c_a, c_b = bc.homogeneous(k)
    q = abs(c_b * cmath.exp(2j * pn.a * k) - c_a)
    M_func = matrix or _default_matrix(pn, k)
    for u in roots:
        if u <= 0:
            continue
        w = u / q
        A_m, B_m = w * c_b, -w * c_a
        A_p, B_p = M_func(A_m, B_m).apply(A_m, B_m)
        ok_in = abs(B_p) < 1e-9 * max(1.0, abs(A_p))
        ok_out = abs(abs(A_p) - u) < 1e-9 * max(1.0, u)
        if ok_in and ok_out:
            out.amplitudes.append(abs(A_p))
        else:
            out.diagnostics.append(f"root u={u:.12g} failed the outgoing-wave check")
    if not out.amplitudes:
        out.diagnostics.append("singular coupling not attained by f on [0, u_max]")
    return out


def nl_left_scattering(pn: PointNonlinearity, k: float, A_l: complex, tol: float = 1e-13,
                       max_iter: int = 500) -> tuple[complex, complex]:
    """Full-line left incidence ``M(A_l, A_l R) (A_l, A_l R) = (A_l T, 0)``.

    Fixed point in R; returns ``(R, T)``.
    """
    A_l = complex(A_l)
    R = 0j
    trace = []
    for _ in range(max_iter):
        M = nl_delta_transfer_matrix(pn, k, A_l, A_l * R)
        R_new = -M.m21 / M.m22
        trace.append(R_new)
        if abs(R_new - R) < tol * max(1.0, abs(R_new)):
            M = nl_delta_transfer_matrix(pn, k, A_l, A_l * R_new)
            return R_new, M.m11 + M.m12 * R_new
        R = 0.5 * (R + R_new)
    raise ConvergenceError("left-incidence fixed point did not converge", trace)


# Kerr thin-slab laser relations; g0 = 1 / (b Re eps) is the linear threshold.

def _check_kerr(b, k, sigma):
    if not (b > 0 and k > 0):
        raise DomainError("need b > 0 and k > 0")
    if not complex(sigma).imag > 0:
        raise DomainError("Im(sigma) must be positive for a saturating Kerr gain")


def kerr_laser_intensity(g: float, g0: float, b: float, k: float, sigma: complex) -> float:
    """Outgoing intensity ``I = |A+|^2 / 2`` from ``g = g0 (1 + 2bk Im(sigma) I)``.

    Negative values mean the gain is below threshold.
    """
    _check_kerr(b, k, sigma)
    return (g - g0) / (2 * b * k * g0 * complex(sigma).imag)


def kerr_threshold_residuals(kp: KerrPoint, re_eps: float, a: float, k: float, g: float,
                             I: float) -> tuple[float, float]:
    if not (kp.b > 0 and k > 0):
        raise DomainError("need b > 0 and k > 0")
    s = math.sin(a * k)
    if abs(s) < 1e-14:
        raise DomainError("cot(ak) has a pole: ak is a multiple of pi")
    sigma = kp.sigma(k)
    b = kp.b
    g0 = 1 / (b * re_eps)
    r1 = g - g0 * (1 + 2 * b * k * sigma.imag * I)
    r2 = re_eps + 2 * sigma.real * I - 1 - math.cos(a * k) / s / (b * k)
    return r1, r2


def kerr_wavenumber_shift(g: float, g0: float, sigma: complex, a: float, b: float, k: float) -> float:
    """First-order shift of the lasing wavenumber above threshold."""
    if not (a > 0 and b > 0 and k > 0):
        raise DomainError("need a, b, k > 0")
    sigma = complex(sigma)
    if sigma.imag == 0:
        raise DomainError("Im(sigma) must be nonzero")
    dk = -k * (g - g0) * sigma.real / (g0 * a * k * sigma.imag)
    I = (g - g0) / (2 * b * k * g0 * sigma.imag)
    other = -2 * b * sigma.real * I * k / a
    assert abs(dk - other) <= 1e-12 * max(abs(dk), abs(other), 1e-300)
    return dk + 0.0  # no signed zero
