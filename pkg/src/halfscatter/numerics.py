"""Root finding on the real line and in the complex plane, and an ODE oracle.

The ODE integrator is deliberately independent of the transfer-matrix
code: it marches the Schrodinger equation with classical RK4 and inserts
the exact derivative jump at every delta.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import Barrier, Delta, PotentialSpec
from .errors import DomainError, EvaluationError

DEFAULT_ROOT_TOL = 1e-10
DEFAULT_MAX_ITER = 50
ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class ComplexRegion:
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    grid_n: int = 60

    def __post_init__(self):
        if not self.re_min < self.re_max:
            raise DomainError("re_min must be below re_max")
        if not self.im_min < self.im_max:
            raise DomainError("im_min must be below im_max")
        if self.grid_n < 2:
            raise DomainError("grid_n must be at least 2")

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= z.real <= self.re_max + pad
                and self.im_min - pad <= z.imag <= self.im_max + pad)


@dataclass
class RootList:
    """Roots with their residual magnitudes and multiplicity flags.

    ``diagnostics`` lists candidates that were dropped and why.
    """

    roots: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    multiple: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    def __repr__(self):
        return f"RootList({self.roots!r})"


def _eval_real(f, x):
    y = float(f(x))
    if not math.isfinite(y):
        raise EvaluationError(x, y)
    return y


def find_real_roots(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12,
                    n_grid: int = 2000, nodes: Iterable[float] = ()) -> RootList:
    """All sign-change roots of ``f`` on [lo, hi], sorted ascending.

    The interval is scanned on a uniform grid (plus any extra ``nodes``)
    and every sign change is refined by Brent's method. A bracketed sign
    change whose refined residual is not small (a pole, say) is dropped
    and reported in ``diagnostics``.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, n_grid + 1)
    extra = [x for x in nodes if lo < x < hi]
    if extra:
        xs = np.unique(np.concatenate([xs, extra]))
    ys = np.array([_eval_real(f, x) for x in xs])
    scale = float(np.median(np.abs(ys)))
    bound = max(tol, 1e-8 * max(scale, 1e-300))
    out = RootList()
    found = []
    for i, (x, y) in enumerate(zip(xs, ys)):
        if y == 0.0:
            left = ys[i - 1] if i > 0 else None
            right = ys[i + 1] if i + 1 < len(ys) else None
            touching = (left is not None and right is not None and left * right > 0)
            found.append((float(x), 0.0, touching))
    for i in range(len(xs) - 1):
        y0, y1 = ys[i], ys[i + 1]
        if y0 * y1 < 0:
            x0, x1 = xs[i], xs[i + 1]
            r = brentq(f, x0, x1, xtol=tol * max(1.0, abs(x0)) * 1e-2, rtol=1e-15, maxiter=200)
            res = abs(_eval_real(f, r))
            if res <= bound:
                found.append((float(r), res, False))
            else:
                out.diagnostics.append(f"sign change near x={r:.6g} with residual {res:.3g} (pole?)")
    found.sort()
    for x, res, mult in found:
        if out.roots and abs(x - out.roots[-1]) <= tol * max(1.0, abs(x)):
            continue
        out.roots.append(x)
        out.residuals.append(res)
        out.multiple.append(mult)
    return out


def find_real_zeros_complex(f: Callable[[float], complex], lo: float, hi: float, accept: float,
                            n_grid: int = 2000, nodes: Iterable[float] = ()) -> list[float]:
    """Real zeros of a complex-valued function of a real variable.

    Sign changes of the real and of the imaginary part are located
    separately; a candidate is kept when ``|f|`` is below ``accept``.
    A part that vanishes identically on the interval is skipped.
    """
    probe = np.linspace(lo, hi, 65)
    sample = np.array([complex(f(x)) for x in probe])
    ref = float(np.max(np.abs(sample))) or 1.0
    parts = []
    if np.max(np.abs(sample.real)) > 1e-13 * ref:
        parts.append(lambda x: complex(f(x)).real)
    if np.max(np.abs(sample.imag)) > 1e-13 * ref:
        parts.append(lambda x: complex(f(x)).imag)
    cands = []
    for part in parts:
        cands.extend(find_real_roots(part, lo, hi, n_grid=n_grid, nodes=nodes).roots)
    out: list[float] = []
    for x in sorted(cands):
        if abs(f(x)) < accept and not any(abs(x - y) < 1e-9 * max(1.0, abs(x)) for y in out):
            out.append(x)
    return out


def _eval_complex(f, z):
    try:
        w = complex(f(z))
    except (ZeroDivisionError, OverflowError):
        return complex("inf")
    return w


def _newton(f, z0, max_iter, h_rel=1e-7):
    z = complex(z0)
    fz = _eval_complex(f, z)
    for _ in range(max_iter):
        if not cmath.isfinite(fz):
            return None, fz
        h = h_rel * max(1.0, abs(z))
        d = (_eval_complex(f, z + h) - _eval_complex(f, z - h)) / (2 * h)
        if d == 0 or not cmath.isfinite(d):
            return None, fz
        step = fz / d
        # simple backtracking keeps Newton from jumping into a neighbouring basin
        lam = 1.0
        for _ in range(20):
            z_new = z - lam * step
            f_new = _eval_complex(f, z_new)
            if cmath.isfinite(f_new) and abs(f_new) < abs(fz) or lam < 1e-3:
                break
            lam /= 2
        z, fz = z_new, f_new
        if abs(lam * step) <= 1e-14 * max(1.0, abs(z)) or fz == 0:
            return z, fz
    return z, fz


def find_complex_roots(f: Callable[[complex], complex], region: ComplexRegion,
                       tol: float = DEFAULT_ROOT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                       dedup_radius: float | None = None) -> RootList:
    """Roots of an analytic ``f`` inside ``region``.

    Local minima of |f| on a ``grid_n x grid_n`` grid seed Newton's method
    (central-difference derivative). A root is accepted when
    ``|f(root)| < tol * scale`` with ``scale`` the median of |f| on the grid.
    Returned roots are sorted by real, then imaginary part.
    """
    n = region.grid_n
    re = np.linspace(region.re_min, region.re_max, n)
    im = np.linspace(region.im_min, region.im_max, n)
    vals = np.empty((n, n))
    for i, y in enumerate(im):
        for j, x in enumerate(re):
            w = _eval_complex(f, complex(x, y))
            vals[i, j] = abs(w) if cmath.isfinite(w) else np.inf
    finite = vals[np.isfinite(vals)]
    out = RootList()
    if finite.size == 0:
        out.diagnostics.append("f is non-finite on the whole grid")
        return out
    scale = float(np.median(finite)) or 1.0
    if dedup_radius is None:
        dedup_radius = 1e-6 * region.diameter
    pad = 0.5 * max(re[1] - re[0], im[1] - im[0])

    seeds = []
    for i in range(n):
        for j in range(n):
            v = vals[i, j]
            if not np.isfinite(v):
                continue
            nb = vals[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
            if v <= nb.min() and (nb > v).any():
                seeds.append(complex(re[j], im[i]))
            elif v == 0.0:
                seeds.append(complex(re[j], im[i]))

    for z0 in seeds:
        z, fz = _newton(f, z0, max_iter)
        if z is None:
            out.diagnostics.append(f"Newton failed from seed {z0:.6g}")
            continue
        res = abs(fz)
        if not res < tol * scale:
            out.diagnostics.append(f"no convergence from seed {z0:.6g} (|f|={res:.3g})")
            continue
        if not region.contains(z, pad):
            continue
        if any(abs(z - r) <= dedup_radius for r in out.roots):
            continue
        out.roots.append(z)
        out.residuals.append(res)
        out.multiple.append(False)

    # flag near-coincident roots as possibly multiple
    for idx, z in enumerate(out.roots):
        h = 1e-6 * max(1.0, abs(z))
        d = (_eval_complex(f, z + h) - _eval_complex(f, z - h)) / (2 * h)
        out.multiple[idx] = abs(d) * h < 1e-3 * tol * scale
    order = sorted(range(len(out.roots)), key=lambda q: (out.roots[q].real, out.roots[q].imag))
    out.roots = [out.roots[q] for q in order]
    out.residuals = [out.residuals[q] for q in order]
    out.multiple = [out.multiple[q] for q in order]
    return out


def _rk4_step_matrix(h: float, v: complex, k2: complex) -> np.ndarray:
    # y = (psi, psi'), y' = A y ; one RK4 step of a linear autonomous
    # system is multiplication by the 4th-order Taylor polynomial of hA
    A = np.array([[0.0, 1.0], [v - k2, 0.0]], dtype=complex)
    hA = h * A
    hA2 = hA @ hA
    return np.eye(2) + hA + hA2 / 2 + hA2 @ hA / 6 + hA2 @ hA2 / 24


def integrate_schrodinger(pot: PotentialSpec, k: complex, x_from: float, x_to: float,
                          psi0: complex, dpsi0: complex, tol: float = ORACLE_TOL,
                          max_halvings: int = 24) -> tuple[complex, complex]:
    """Integrate ``-psi'' + v psi = k^2 psi`` from ``x_from`` to ``x_to``.

    Piecewise-constant segments are marched with fixed-step RK4; every
    delta contributes the jump ``psi'(a+) - psi'(a-) = z psi(a)``. The
    step is halved until the propagator changes by less than ``tol``
    (relative to max(1, |P|)).
    """
    if x_from == x_to:
        raise DomainError("x_from and x_to coincide")
    k = complex(k)
    k2 = k * k
    lo, hi = min(x_from, x_to), max(x_from, x_to)
    deltas = [p for p in pot.pieces if isinstance(p, Delta)]
    barriers = [p for p in pot.pieces if isinstance(p, Barrier)]
    for d in deltas:
        if d.a == x_from or d.a == x_to:
            raise DomainError(f"delta at integration endpoint x={d.a}: jump is ill-posed")
    cuts = {lo, hi}
    for b in barriers:
        cuts.update(x for x in (b.start, b.end) if lo < x < hi)
    cuts.update(d.a for d in deltas if lo < d.a < hi)
    cuts = sorted(cuts)
    forward = x_to > x_from
    if not forward:
        cuts = cuts[::-1]

    def height(x):
        return sum((b.height(k) for b in barriers if b.start < x < b.end), 0j)

    jumps = {}
    for d in deltas:
        if lo < d.a < hi:
            jumps[d.a] = jumps.get(d.a, 0j) + complex(d.z)

    scale_k = max(1.0, math.sqrt(max(abs(k2 - height(0.5 * (a + b))) for a, b in zip(cuts, cuts[1:]))))

    def run(n_per_unit):
        # propagator of (psi, psi'); refining it rather than one solution keeps
        # the result exactly linear in the initial data
        P = np.eye(2, dtype=complex)
        for x0, x1 in zip(cuts, cuts[1:]):
            v = height(0.5 * (x0 + x1))
            length = abs(x1 - x0)
            steps = max(1, int(math.ceil(length * n_per_unit)))
            h = (x1 - x0) / steps
            P = np.linalg.matrix_power(_rk4_step_matrix(h, v, k2), steps) @ P
            z = jumps.get(x1)
            if z is not None:
                P = np.array([[1, 0], [z if forward else -z, 1]], dtype=complex) @ P
        return P

    y0 = np.array([psi0, dpsi0], dtype=complex)
    n_per_unit = 20.0 * scale_k
    prev = run(n_per_unit)
    for _ in range(max_halvings):
        n_per_unit *= 2
        cur = run(n_per_unit)
        if np.max(np.abs(cur - prev)) < tol * max(1.0, float(np.max(np.abs(cur)))):
            y = cur @ y0
            return complex(y[0]), complex(y[1])
        prev = cur
    raise DomainError("RK4 step refinement did not reach the oracle tolerance")


def oracle_transfer_matrix(pot: PotentialSpec, k: complex, margin: float = 0.5,
                           tol: float = ORACLE_TOL):
    """Transfer matrix obtained by plane-wave matching of ODE solutions."""
    from .core import TransferMatrix

    k = complex(k)
    support = pot.support or (0.0, 0.0)
    xl, xr = support[0] - margin, support[1] + margin
    cols = []
    for a_m, b_m in ((1.0, 0.0), (0.0, 1.0)):
        psi = a_m * cmath.exp(1j * k * xl) + b_m * cmath.exp(-1j * k * xl)
        dpsi = 1j * k * (a_m * cmath.exp(1j * k * xl) - b_m * cmath.exp(-1j * k * xl))
        p, dp = integrate_schrodinger(pot, k, xl, xr, psi, dpsi, tol=tol)
        a_p = 0.5 * (p + dp / (1j * k)) * cmath.exp(-1j * k * xr)
        b_p = 0.5 * (p - dp / (1j * k)) * cmath.exp(1j * k * xr)
        cols.append((a_p, b_p))
    return TransferMatrix(cols[0][0], cols[1][0], cols[0][1], cols[1][1])
