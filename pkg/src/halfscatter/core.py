"""Full-line scattering data model.

Waves are written as ``psi(x) = A exp(ikx) + B exp(-ikx)`` in free regions.
A transfer matrix maps the amplitudes (A-, B-) to the left of a potential
to the amplitudes (A+, B+) to its right.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import DomainError, TransmissionSingularityError

Scalar = Union[complex, float]


@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @classmethod
    def identity(cls) -> "TransferMatrix":
        return cls(1.0 + 0j, 0j, 0j, 1.0 + 0j)

    @classmethod
    def from_array(cls, arr) -> "TransferMatrix":
        arr = np.asarray(arr, dtype=complex)
        return cls(complex(arr[0, 0]), complex(arr[0, 1]), complex(arr[1, 0]), complex(arr[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def apply(self, a_minus: complex, b_minus: complex) -> tuple[complex, complex]:
        """Return (A+, B+) for the given left amplitudes."""
        return (self.m11 * a_minus + self.m12 * b_minus,
                self.m21 * a_minus + self.m22 * b_minus)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Left/right reflection and the (reciprocal) transmission amplitude."""

    r_left: complex
    r_right: complex
    t: complex


class BoundaryCondition:
    """Homogeneous condition ``alpha psi(0) + beta psi'(0)/k = 0``.

    ``alpha`` and ``beta`` may be numbers or callables of k. The condition
    is carried projectively through ``(c_A, c_B) = (alpha + i beta,
    alpha - i beta)`` so that ``gamma = c_A / c_B`` may be infinite.
    On the left of the potential it enforces ``c_A A- + c_B B- = 0``.
    """

    def __init__(self, alpha: Scalar | Callable[[complex], complex],
                 beta: Scalar | Callable[[complex], complex]):
        self.alpha = alpha
        self.beta = beta
        if not (callable(alpha) or callable(beta)):
            if abs(complex(alpha)) == 0 and abs(complex(beta)) == 0:
                raise DomainError("alpha and beta cannot both vanish")

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(1.0, 0.0)

    @classmethod
    def neumann(cls) -> "BoundaryCondition":
        return cls(0.0, 1.0)

    @classmethod
    def from_gamma(cls, gamma: complex) -> "BoundaryCondition":
        """Build the condition with the given gamma; ``inf`` means c_B = 0."""
        if cmath.isinf(gamma):
            c_a, c_b = 1.0 + 0j, 0j
        else:
            c_a, c_b = complex(gamma), 1.0 + 0j
        return cls.from_homogeneous(c_a, c_b)

    @classmethod
    def from_homogeneous(cls, c_a: complex, c_b: complex) -> "BoundaryCondition":
        alpha = (c_a + c_b) / 2
        beta = (c_a - c_b) / 2j
        return cls(alpha, beta)

    def _values(self, k=None) -> tuple[complex, complex]:
        alpha = self.alpha(k) if callable(self.alpha) else self.alpha
        beta = self.beta(k) if callable(self.beta) else self.beta
        alpha, beta = complex(alpha), complex(beta)
        if alpha == 0 and beta == 0:
            raise DomainError(f"alpha and beta both vanish at k={k!r}")
        return alpha, beta

    def homogeneous(self, k=None) -> tuple[complex, complex]:
        """Return (c_A, c_B) scaled so that max(|c_A|, |c_B|) = 1."""
        alpha, beta = self._values(k)
        c_a, c_b = alpha + 1j * beta, alpha - 1j * beta
        scale = max(abs(c_a), abs(c_b))
        return c_a / scale, c_b / scale

    def gamma(self, k=None) -> complex:
        c_a, c_b = self.homogeneous(k)
        if c_b == 0:
            return complex(float("inf"), 0.0)
        return c_a / c_b

    def conjugate(self) -> "BoundaryCondition":
        """Condition with alpha -> alpha*, beta -> beta* (gamma -> 1/gamma*)."""
        def conj(v):
            if callable(v):
                return lambda k, _v=v: complex(_v(k)).conjugate()
            return complex(v).conjugate()
        return BoundaryCondition(conj(self.alpha), conj(self.beta))

    def __repr__(self):
        return f"BoundaryCondition(alpha={self.alpha!r}, beta={self.beta!r})"


@dataclass(frozen=True)
class Delta:
    """Point interaction ``z delta(x - a)``."""

    z: complex
    a: float

    @property
    def start(self) -> float:
        return self.a

    @property
    def end(self) -> float:
        return self.a


@dataclass(frozen=True)
class Barrier:
    """Constant slab on [a, a + L].

    Give either a refractive index ``n`` (optical convention,
    ``v = k^2 (1 - n^2)``) or a height ``v0`` (``v = v0``).
    """

    a: float
    L: float
    n: complex | None = None
    v0: complex | None = None

    def __post_init__(self):
        if (self.n is None) == (self.v0 is None):
            raise DomainError("give exactly one of n or v0")
        if not self.L > 0:
            raise DomainError(f"barrier thickness must be positive, got {self.L}")

    @property
    def start(self) -> float:
        return self.a

    @property
    def end(self) -> float:
        return self.a + self.L

    def index(self, k: complex) -> complex:
        if self.n is not None:
            return complex(self.n)
        # principal branch, cut on the negative real axis
        return cmath.sqrt(1 - complex(self.v0) / complex(k) ** 2)

    def height(self, k: complex) -> complex:
        if self.v0 is not None:
            return complex(self.v0)
        return complex(k) ** 2 * (1 - complex(self.n) ** 2)


Piece = Union[Delta, Barrier]


@dataclass(frozen=True)
class PotentialSpec:
    """Ordered, non-overlapping pieces supported in [0, inf)."""

    pieces: tuple = ()

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda p: (p.start, p.end)))
        object.__setattr__(self, "pieces", pieces)
        for p in pieces:
            if isinstance(p, Delta) and not p.a > 0:
                raise DomainError(f"delta position must be positive, got {p.a}")
            if isinstance(p, Barrier) and p.a < 0:
                raise DomainError(f"barrier must start at x >= 0, got {p.a}")
        barriers = [p for p in pieces if isinstance(p, Barrier)]
        for b1, b2 in zip(barriers, barriers[1:]):
            if b2.start < b1.end:
                raise DomainError("barrier pieces overlap")
        for d in (p for p in pieces if isinstance(p, Delta)):
            for b in barriers:
                if b.start < d.a < b.end:
                    raise DomainError("delta lies strictly inside a barrier")

    @classmethod
    def empty(cls) -> "PotentialSpec":
        return cls(())

    @property
    def support(self) -> tuple[float, float] | None:
        if not self.pieces:
            return None
        return min(p.start for p in self.pieces), max(p.end for p in self.pieces)

    def is_real(self, k: complex = 1.0) -> bool:
        """True when every piece is real-valued at this (real) k."""
        for p in self.pieces:
            value = p.z if isinstance(p, Delta) else p.height(k)
            if abs(complex(value).imag) > 0:
                return False
        return True


def _check_k(k) -> complex:
    k = complex(k)
    if k == 0:
        raise DomainError("transfer matrices are undefined at k = 0")
    return k


def delta_transfer_matrix(z: complex, a: float, k: complex) -> TransferMatrix:
    k = _check_k(k)
    zt = complex(z) / (2 * k)
    ph = cmath.exp(2j * k * a)
    return TransferMatrix(1 - 1j * zt, -1j * zt / ph, 1j * zt * ph, 1 + 1j * zt)


def barrier_transfer_matrix(n: complex, a: float, L: float, k: complex) -> TransferMatrix:
    """Transfer matrix of a slab with refractive index n on [a, a + L]."""
    k = _check_k(k)
    n = complex(n)
    if n == 0:
        raise DomainError("refractive index n = 0 (k^2 equals the barrier height)")
    if not L > 0:
        raise DomainError(f"barrier thickness must be positive, got {L}")
    n_plus = (n + 1 / n) / 2
    n_minus = (n - 1 / n) / 2
    c, s = cmath.cos(k * L * n), cmath.sin(k * L * n)
    return TransferMatrix(
        (c + 1j * n_plus * s) * cmath.exp(-1j * k * L),
        1j * n_minus * s * cmath.exp(-1j * k * (L + 2 * a)),
        -1j * n_minus * s * cmath.exp(1j * k * (L + 2 * a)),
        (c - 1j * n_plus * s) * cmath.exp(1j * k * L),
    )


def compose(left: TransferMatrix, right: TransferMatrix) -> TransferMatrix:
    """Matrix of ``left`` followed by ``right`` (``right`` sits at larger x)."""
    return right @ left


def piece_transfer_matrix(piece: Piece, k: complex) -> TransferMatrix:
    if isinstance(piece, Delta):
        return delta_transfer_matrix(piece.z, piece.a, k)
    return barrier_transfer_matrix(piece.index(k), piece.a, piece.L, k)


def transfer_matrix(pot: PotentialSpec | Sequence[Piece], k: complex) -> TransferMatrix:
    pieces = pot.pieces if isinstance(pot, PotentialSpec) else PotentialSpec(tuple(pot)).pieces
    m = TransferMatrix.identity()
    _check_k(k)
    for piece in pieces:
        m = compose(m, piece_transfer_matrix(piece, k))
    return m


def amplitudes_from_matrix(M: TransferMatrix) -> ScatteringAmplitudes:
    if M.m22 == 0:
        raise TransmissionSingularityError(
            "M22 = 0: transmission resonance / spectral singularity of the full-line problem")
    return ScatteringAmplitudes(-M.m21 / M.m22, M.m12 / M.m22, 1 / M.m22)


def matrix_from_amplitudes(amps: ScatteringAmplitudes) -> TransferMatrix:
    t = amps.t
    if t == 0:
        raise DomainError("transmission amplitude cannot vanish")
    return TransferMatrix(t - amps.r_left * amps.r_right / t, amps.r_right / t,
                          -amps.r_left / t, 1 / t)
