"""Random configuration generators shared by the test modules."""
import numpy as np

from halfscatter import Barrier, BoundaryCondition, Delta, PotentialSpec


def _value(rng, scale, real):
    v = rng.normal(scale=scale)
    if not real:
        v = v + 1j * rng.normal(scale=scale)
    return v


def random_potential(rng, real: bool = False, kind: str | None = None) -> PotentialSpec:
    """One delta, one barrier, or a composite of up to four pieces laid out left to right."""
    kind = kind or rng.choice(["delta", "barrier", "composite"])
    count = 1 if kind != "composite" else int(rng.integers(2, 5))
    pieces, x = [], float(rng.uniform(0.0, 0.5))
    for i in range(count):
        choice = kind if kind != "composite" else rng.choice(["delta", "barrier"])
        if choice == "delta":
            x += float(rng.uniform(0.1, 1.0))
            pieces.append(Delta(_value(rng, 1.5, real), x))
        else:
            L = float(rng.uniform(0.1, 1.5))
            if rng.random() < 0.5:
                n = complex(rng.uniform(1.1, 3.0), 0.0 if real else rng.normal(scale=0.2))
                pieces.append(Barrier(x, L, n=n))
            else:
                pieces.append(Barrier(x, L, v0=_value(rng, 2.0, real)))
            x += L + float(rng.uniform(0.05, 0.5))
    return PotentialSpec(tuple(pieces))


def random_bc(rng) -> BoundaryCondition:
    return BoundaryCondition(complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal()))


def random_real_phase_bc(rng) -> BoundaryCondition:
    """alpha and beta sharing one phase, so alpha* beta is real."""
    phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
    return BoundaryCondition(rng.normal() * phase, rng.normal() * phase)
