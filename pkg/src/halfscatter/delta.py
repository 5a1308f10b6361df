"""Delta interaction ``z delta(x - a)`` on the half-line.

Everything here has a closed form; the generic machinery in
:mod:`halfscatter.halfline` is used only to confirm candidates.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .core import BoundaryCondition, Delta, PotentialSpec
from .errors import DomainError, SpectralSingularityAtRealK
from .halfline import HalfLineProblem, absorption_residual, singularity_residual
from .numerics import find_real_zeros_complex

log = logging.getLogger(__name__)

CONFIRM_TOL = 1e-9


@dataclass(frozen=True)
class DeltaHalfLine:
    z: complex
    a: float
    bc: BoundaryCondition

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"delta position must be positive, got {self.a}")

    @property
    def problem(self) -> HalfLineProblem:
        return HalfLineProblem(PotentialSpec((Delta(self.z, self.a),)), self.bc)


@dataclass
class Candidates:
    """Modulus-equation candidates split by the exact residual check."""

    candidates: list[float] = field(default_factory=list)
    confirmed: list[float] = field(default_factory=list)
    rejected: list[float] = field(default_factory=list)

    def __iter__(self):
        return iter(self.confirmed)

    def __len__(self):
        return len(self.confirmed)


def _constant_homogeneous(bc: BoundaryCondition) -> tuple[complex, complex]:
    if callable(bc.alpha) or callable(bc.beta):
        raise DomainError("closed-form delta results need a k-independent boundary condition")
    return bc.homogeneous()


def delta_halfline_reflection(d: DeltaHalfLine, k: float) -> complex:
    """Closed-form reflection amplitude; homogeneous in (c_A, c_B)."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    c_a, c_b = d.bc.homogeneous(k)
    z, a = complex(d.z), d.a
    e = cmath.exp(2j * k * a)
    num = -2 * k * c_b + 1j * z * (c_b - c_a / e)
    den = 2 * k * c_a + 1j * z * (c_a - c_b * e)
    if abs(den) <= 1e-14 * max(abs(num), 1e-300):
        raise SpectralSingularityAtRealK(k)
    return num / den


def _real_gamma(bc: BoundaryCondition) -> float | None:
    c_a, c_b = _constant_homogeneous(bc)
    if c_b == 0:
        return math.inf
    g = c_a / c_b
    if abs(g.imag) > 1e-12 * max(1.0, abs(g)):
        return None
    return g.real


def count_bound_states(d: DeltaHalfLine) -> int:
    """Number of bound states for real gamma, from the closed classification.

    With ``u = a|z|/gamma`` and ``x0 = ln(u)/2a``:
    gamma = 0 gives 0, gamma < 0 gives 1, gamma > 1 gives 1,
    gamma = 1 gives 1 iff a|z| > 1, and for 0 < gamma < 1 there are two
    bound states iff ``1 + ln u < a|z|`` (one at tangency, else none).
    """
    gamma = _real_gamma(d.bc)
    if gamma is None:
        raise DomainError("count_bound_states needs a real gamma")
    z = complex(d.z)
    if z.imag != 0:
        log.info("no real-gamma bound state for complex coupling z=%s", z)
        return 0
    if z.real >= 0:
        return 0
    t = d.a * abs(z.real)
    if math.isinf(gamma):
        return 1
    if gamma == 0:
        return 0
    if gamma < 0 or gamma > 1:
        return 1
    if gamma == 1:
        return 1 if t > 1 else 0
    u = t / gamma
    if u <= 1:
        return 0
    depth = 1 + math.log(u) - t
    if depth < 0:
        return 2
    return 1 if depth == 0 else 0


def bound_state_bracket(d: DeltaHalfLine) -> tuple[float, float]:
    """Interval containing every bound-state momentum (before widening)."""
    c_a, c_b = _constant_homogeneous(d.bc)
    size = abs(complex(d.z))
    inv = abs(c_b / c_a)
    return max(0.0, (1 - inv) * size / 2), (1 + inv) * size / 2


def find_bound_states(d: DeltaHalfLine, n_grid: int = 2000) -> list[float]:
    """Momenta kappa > 0 (k = i kappa) of the bound states, ascending.

    Solves ``c_B z exp(-2 kappa a) = c_A (z + 2 kappa)``, the homogeneous
    form of ``exp(-2 kappa a) = gamma (1 + 2 kappa / z)``. States with
    kappa below 1e-8 |z| cannot be told apart from the threshold zero at
    kappa = 0 and are not reported.
    """
    c_a, c_b = _constant_homogeneous(d.bc)
    z, a = complex(d.z), d.a
    if c_a == 0 or z == 0:
        return []
    if c_b == 0:
        kappa = -z / 2
        return [kappa.real] if abs(kappa.imag) < 1e-14 and kappa.real > 0 else []
    lo, hi = bound_state_bracket(d)
    width = hi - lo
    lo = max(lo - 0.1 * width, 1e-8 * abs(z))
    hi = hi + 0.1 * width

    def h(kappa):
        val = c_b * z * math.exp(-2 * kappa * a) - c_a * (z + 2 * kappa)
        return val / (abs(z) + 2 * kappa)

    nodes = []
    gamma = c_a / c_b
    if abs(gamma.imag) < 1e-12 and gamma.real > 0 and z.real < 0:
        u = a * abs(z) / gamma.real
        if u > 1:
            nodes.append(math.log(u) / (2 * a))
    return find_real_zeros_complex(h, lo, hi, 1e-10, n_grid=n_grid, nodes=nodes)


def _confirm(d: DeltaHalfLine, ks: Iterable[float], residual) -> Candidates:
    out = Candidates()
    for k in sorted(ks):
        out.candidates.append(k)
        if abs(residual(d.problem, k)) < CONFIRM_TOL:
            out.confirmed.append(k)
        else:
            out.rejected.append(k)
    return out


def _quadratic_roots(shift: float, radicand: float) -> list[float]:
    if radicand < 0:
        return []
    root = math.sqrt(radicand)
    ks = {0.5 * (shift + root), 0.5 * (shift - root)}
    return [k for k in ks if k > 0]


def spectral_singularity_candidates(d: DeltaHalfLine) -> Candidates:
    """Real k > 0 passing the modulus test for a spectral singularity.

    Candidates solve ``|z - 2ik| = |z/gamma|``; each is then checked
    against the exact singularity residual.
    """
    c_a, c_b = _constant_homogeneous(d.bc)
    if c_a == 0:
        return Candidates()
    z = complex(d.z)
    ratio = abs(z) * abs(c_b / c_a)
    return _confirm(d, _quadratic_roots(z.imag, ratio ** 2 - z.real ** 2), singularity_residual)


def perfect_absorption_candidates(d: DeltaHalfLine) -> Candidates:
    """Real k > 0 passing the modulus test for perfect absorption.

    Candidates solve ``|z + 2ik| = |gamma z|``. For |gamma| = 1 the only
    one is ``k = -z_i``, which needs a lossy coupling (z_i < 0).
    """
    c_a, c_b = _constant_homogeneous(d.bc)
    if c_a == 0:
        return Candidates()
    z = complex(d.z)
    if c_b == 0:
        return Candidates()
    ratio = abs(z) * abs(c_a / c_b)
    return _confirm(d, _quadratic_roots(-z.imag, ratio ** 2 - z.real ** 2), absorption_residual)


def _cot_coupling(x: float, size: float) -> float:
    s = math.sin(x)
    if abs(s) < 1e-14:
        raise DomainError("mirror distance at node: cot(a|z_i| - phi/2) has a pole")
    return -math.cos(x) / s * size


def ss_coupling_real_part(z_i: float, a: float, phi: float) -> float:
    """z_r making ``z_r + i z_i`` a spectral singularity at k = z_i for gamma = e^{i phi}."""
    if not (z_i > 0 and a > 0):
        raise DomainError("need z_i > 0 and a > 0")
    return _cot_coupling(a * z_i - phi / 2, z_i)


def pa_coupling_real_part(z_i: float, a: float, phi: float) -> float:
    """z_r making ``z_r + i z_i`` perfectly absorbing at k = |z_i| for gamma = e^{i phi}."""
    if not (z_i < 0 and a > 0):
        raise DomainError("need z_i < 0 and a > 0")
    return _cot_coupling(a * abs(z_i) - phi / 2, abs(z_i))


def time_reverse(d: DeltaHalfLine) -> DeltaHalfLine:
    """Conjugate configuration: z -> z*, gamma -> 1/gamma*."""
    return DeltaHalfLine(complex(d.z).conjugate(), d.a, d.bc.conjugate())


@dataclass(frozen=True)
class ThinSlabOptics:
    """Thin slab of thickness b equivalent to a delta coupling at one k."""

    b: float
    eps_s: complex
    zeta: complex
    g: float


def slab_from_coupling(z: complex, b: float, k: float) -> ThinSlabOptics:
    if not (b > 0 and k > 0):
        raise DomainError("need b > 0 and k > 0")
    z = complex(z)
    eps = 1 - z / (b * k * k)
    if eps.real == 0:
        raise DomainError("Re(eps_s) = 0: gain coefficient undefined")
    g = -k * eps.imag / eps.real
    return ThinSlabOptics(b, eps, -z / (k * k), g)


def threshold_gain_thin_slab(b: float, re_eps: float) -> float:
    if not (b > 0 and re_eps > 0):
        raise DomainError("need b > 0 and re_eps > 0")
    return 1.0 / (b * re_eps)


def mirror_distance(k: float, b: float, re_eps: float, m: int) -> float:
    """Mirror-to-slab distance of lasing mode m."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    return (-math.atan(b * k * (re_eps - 1)) + math.pi * (m + 0.5)) / k


def mirror_distance_approx(k: float, m: int) -> float:
    """Quarter-wave estimate ``(2m+1) lambda / 4``."""
    return (2 * m + 1) * math.pi / (2 * k)


def select_operating_mode(dispersion: Callable[[float], complex], a0: float, b: float,
                          m_range: Iterable[int]) -> int:
    """Mode m minimising ``|b k_m Im eps(k_m) + 1|`` with ``k_m = (2m+1) pi / 2 a0``."""
    best, best_val = None, math.inf
    for m in sorted(m_range):
        k = (2 * m + 1) * math.pi / (2 * a0)
        val = abs(b * k * complex(dispersion(k)).imag + 1)
        if val < best_val:
            best, best_val = m, val
    if best is None:
        raise DomainError("empty mode range")
    return best
