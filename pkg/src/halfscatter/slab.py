"""Gain slab of index ``eta + i kappa`` on [a, a+L] next to a mirror at x = 0.

The mirror enters through ``gamma = 1 - eps``; ``eps = 0`` is a perfect
mirror. With ``n~ = (n+1)/(n-1)`` and ``X = gamma exp(2ik(a+L))`` the
lasing condition is

    exp(2ikLn) = n~ (1 + n~ X) / (X + n~),

and writing ``n = eta - ig/2k`` splits it into a threshold gain (modulus)
and a mode condition (phase).
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.optimize import brentq, root

from .core import barrier_transfer_matrix
from .errors import ConvergenceError, DomainError

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class SlabLaserConfig:
    eta: float
    L: float
    a: float = 0.0
    eps_mirror: complex = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not self.L > 0:
            raise DomainError(f"slab thickness must be positive, got {self.L}")
        if not self.eta > 1:
            raise DomainError(f"eta must exceed 1, got {self.eta}")
        if self.a < 0:
            raise DomainError(f"mirror gap must be nonnegative, got {self.a}")

    @property
    def gamma(self) -> complex:
        return 1 - complex(self.eps_mirror)

    @property
    def n(self) -> complex:
        return complex(self.eta, self.kappa)

    def X(self, k: float) -> complex:
        return self.gamma * cmath.exp(2j * k * (self.a + self.L))

    def replace(self, **kw) -> "SlabLaserConfig":
        vals = dict(eta=self.eta, L=self.L, a=self.a, eps_mirror=self.eps_mirror, kappa=self.kappa)
        vals.update(kw)
        return SlabLaserConfig(**vals)


@dataclass(frozen=True)
class ThresholdResult:
    g: float
    g_slab: float
    g_mirror: float
    k: float
    m: int
    vartheta: float


def n_tilde(n: complex) -> complex:
    n = complex(n)
    if n == 1:
        raise DomainError("n = 1: no index contrast, n~ undefined")
    return (n + 1) / (n - 1)


def gain_index(cfg: SlabLaserConfig, k: float, g: float) -> complex:
    """Complex index ``eta - i g / 2k`` of the pumped slab."""
    return complex(cfg.eta, -g / (2 * k))


def _rhs(nt: complex, X: complex) -> complex:
    den = X + nt
    if abs(den) < 1e-300:
        raise DomainError("X + n~ = 0: slab residual has a pole")
    return nt * (1 + nt * X) / den


def slab_ss_residual(cfg: SlabLaserConfig, k: float, g: float) -> complex:
    """``exp(2ikLn) - n~(1 + n~X)/(X + n~)`` with ``n = eta - ig/2k``."""
    n = gain_index(cfg, k, g)
    return cmath.exp(2j * k * cfg.L * n) - _rhs(n_tilde(n), cfg.X(k))


def slab_ss_residual_matrix(cfg: SlabLaserConfig, k: float, g: float) -> complex:
    """The same residual assembled from the barrier transfer matrix.

    The lasing condition is ``M12 = gamma M22``; the prefactor turns that
    combination into the algebraic residual exactly.
    """
    n = gain_index(cfg, k, g)
    nt, X = n_tilde(n), cfg.X(k)
    if abs(X + nt) < 1e-300:
        raise DomainError("X + n~ = 0: slab residual has a pole")
    M = barrier_transfer_matrix(n, cfg.a, cfg.L, k)
    combo = M.m12 - cfg.gamma * M.m22
    pref = 4 * n * cmath.exp(1j * k * cfg.L * n) * cmath.exp(1j * k * (cfg.L + 2 * cfg.a))
    return pref * combo / ((n - 1) ** 2 * (X + nt))


def _split(cfg: SlabLaserConfig, k: float, n: complex) -> tuple[float, float, float]:
    nt, X = n_tilde(n), cfg.X(k)
    g_s = 2 / cfg.L * math.log(abs(nt))
    g_m = math.log(abs((X + 1 / nt) / (X + nt))) / cfg.L
    theta = cmath.phase(_rhs(nt, X)) % TWO_PI
    return g_s, g_m, theta


def _result(cfg, k, g_s, g_m, theta) -> ThresholdResult:
    m = int(round((2 * cfg.eta * cfg.L * k - theta) / TWO_PI))
    return ThresholdResult(g_s + g_m, g_s, g_m, k, m, theta)


def threshold_gain_kappa0(cfg: SlabLaserConfig, k: float) -> ThresholdResult:
    """Threshold gain with n~ evaluated at the fixed index ``eta + i cfg.kappa``."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    return _result(cfg, k, *_split(cfg, k, cfg.n))


def threshold_gain(cfg: SlabLaserConfig, k: float, self_consistent: bool = True,
                   tol: float = 1e-12, max_iter: int = 100) -> ThresholdResult:
    """Threshold gain ``g = g_slab + g_mirror`` at wavenumber k.

    By default the index inside n~ is the pumped one, ``eta - ig/2k``, and
    g is found by fixed-point iteration started from the kappa-free value.
    """
    first = threshold_gain_kappa0(cfg, k)
    if not self_consistent:
        return first
    g = first.g
    trace = [g]
    for _ in range(max_iter):
        g_s, g_m, theta = _split(cfg, k, gain_index(cfg, k, g))
        g_new = g_s + g_m
        trace.append(g_new)
        if abs(g_new - g) < tol * max(1.0, abs(g_new)):
            return _result(cfg, k, g_s, g_m, theta)
        g = g_new
    raise ConvergenceError(f"threshold gain fixed point did not converge at k={k}", trace)


@dataclass
class ModeList:
    modes: list[ThresholdResult] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.modes)

    def __len__(self):
        return len(self.modes)

    def __getitem__(self, i):
        return self.modes[i]


def _unwrap_near(theta: float, ref: float) -> float:
    return theta + TWO_PI * round((ref - theta) / TWO_PI)


def _solve_mode(cfg, m, self_consistent, max_iter=200):
    scale = 2 * cfg.eta * cfg.L
    angle = lambda k: threshold_gain(cfg, k, self_consistent).vartheta
    k = (TWO_PI * m + math.pi) / scale
    theta = math.pi
    lam, last_step = 1.0, None
    for _ in range(max_iter):
        theta = _unwrap_near(angle(k), theta)
        step = (TWO_PI * m + theta) / scale - k
        if last_step is not None and step * last_step < 0:
            lam *= 0.5
        k_new = k + lam * step
        if not k_new > 0:
            break
        if abs(k_new - k) < 1e-12 * k:
            return k_new
        k, last_step = k_new, step
    # fall back to bracketing the phase condition on the mode's own interval
    lo = max(TWO_PI * m / scale, 1e-9 / cfg.L)
    hi = TWO_PI * (m + 1) / scale
    F = lambda q: scale * q - TWO_PI * m - angle(q)
    try:
        k = brentq(F, lo, hi, xtol=1e-15, rtol=1e-15)
    except ValueError:
        return None
    return k if abs(F(k)) < 1e-9 else None


def lasing_modes(cfg: SlabLaserConfig, m_range: Iterable[int], self_consistent: bool = True) -> ModeList:
    """Solve ``k = (2 pi m + vartheta(k)) / (2 eta L)`` for each m."""
    out = ModeList()
    for m in m_range:
        try:
            k = _solve_mode(cfg, m, self_consistent)
        except (ConvergenceError, DomainError) as exc:
            k = None
            out.diagnostics.append(f"mode m={m}: {exc}")
        if k is None:
            out.diagnostics.append(f"mode m={m}: phase condition not solved, skipped")
            continue
        res = threshold_gain(cfg, k, self_consistent)
        if res.m != m:
            # vartheta wrapped on the way: this m has no solution of its own
            out.diagnostics.append(f"mode m={m}: no solution, iteration landed on m={res.m}")
            continue
        if any(abs(r.k - res.k) < 1e-10 * res.k for r in out.modes):
            continue
        out.modes.append(res)
    out.modes.sort(key=lambda r: r.k)
    return out


def Z(cfg: SlabLaserConfig, k: float) -> float:
    eta = cfg.eta
    return eta / (eta ** 2 + 1 + (eta ** 2 - 1) * math.cos(2 * k * (cfg.a + cfg.L)))


def vartheta_s(cfg: SlabLaserConfig, k: float) -> float:
    """Perfect-mirror mode angle ``2 arctan(tan(k(L+a)) / eta)`` in [0, 2 pi)."""
    x = k * (cfg.L + cfg.a)
    # atan2 form avoids the poles of tan and lands on the same angle mod 2 pi
    return (2 * math.atan2(math.sin(x), cfg.eta * math.cos(x))) % TWO_PI


def vartheta_approx(cfg: SlabLaserConfig, k: float) -> float:
    return (vartheta_s(cfg, k) - 2 * Z(cfg, k) * complex(cfg.eps_mirror).imag) % TWO_PI


def g_mirror_approx(cfg: SlabLaserConfig, k: float) -> float:
    eta = cfg.eta
    return -(math.log((eta + 1) / (eta - 1)) + 2 * Z(cfg, k) * complex(cfg.eps_mirror).real) / cfg.L


def threshold_gain_approx(cfg: SlabLaserConfig, k: float) -> float:
    """First-order threshold gain, accurate to O(kappa) + O(eps^2)."""
    eta = cfg.eta
    return (math.log((eta + 1) / (eta - 1)) - 2 * Z(cfg, k) * complex(cfg.eps_mirror).real) / cfg.L


def optimal_positions(cfg: SlabLaserConfig, k: float, l_range: Iterable[int]) -> list[tuple[float, float]]:
    """Mirror gaps a >= 0 minimising the first-order threshold gain.

    For Re(eps) >= 0 the minimum sits at cos 2k(a+L) = -1, i.e.
    ``a + L = (2l+1) pi / 2k``; for Re(eps) < 0 at cos = +1,
    ``a + L = l pi / k``. Returns ``(a, g_min)`` pairs.
    """
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    eta, re = cfg.eta, complex(cfg.eps_mirror).real
    base = math.log((eta + 1) / (eta - 1))
    if re >= 0:
        g_min = (base - eta * re) / cfg.L
        spot = lambda l: (2 * l + 1) * math.pi / (2 * k)
    else:
        g_min = (base - re / eta) / cfg.L
        spot = lambda l: l * math.pi / k
    out = []
    for l in l_range:
        a = spot(l) - cfg.L
        if a >= -1e-12 * cfg.L:
            out.append((max(a, 0.0), g_min))
    return out


def solve_exact_lasing_point(cfg: SlabLaserConfig, k_guess: float, g_guess: float,
                             tol: float = 1e-10) -> tuple[float, float]:
    """Zero of the slab residual in the real (k, g) plane."""

    def F(v):
        k, g = v
        if not k > 0:
            return [1e3, 1e3]
        r = slab_ss_residual(cfg, k, g)
        return [r.real, r.imag]

    sol = root(F, [k_guess, g_guess], method="hybr", options={"xtol": 1e-14})
    k, g = (float(x) for x in sol.x)
    # a couple of plain Newton steps polish the last digits
    for _ in range(5):
        r = slab_ss_residual(cfg, k, g)
        if abs(r) < 1e-14:
            break
        h = 1e-7
        dk = (slab_ss_residual(cfg, k + h * k, g) - slab_ss_residual(cfg, k - h * k, g)) / (2 * h * k)
        dg = (slab_ss_residual(cfg, k, g + h) - slab_ss_residual(cfg, k, g - h)) / (2 * h)
        J = np.array([[dk.real, dg.real], [dk.imag, dg.imag]])
        try:
            step = np.linalg.solve(J, [-r.real, -r.imag])
        except np.linalg.LinAlgError:
            break
        k, g = k + float(step[0]), g + float(step[1])
    if not (k > 0 and math.isfinite(g)) or abs(slab_ss_residual(cfg, k, g)) >= tol:
        raise ConvergenceError(f"lasing point solve diverged from (k={k_guess}, g={g_guess})",
                               [(k, g)])
    return k, g
