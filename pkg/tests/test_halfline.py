import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from halfscatter import (Barrier, BoundaryCondition, ComplexRegion, Delta, DomainError,
                         HalfLineProblem, PotentialSpec, SpectralKind,
                         SpectralSingularityAtRealK, absorption_residual, amplitudes_from_matrix,
                         boundary_from_external_reflection, find_perfect_absorption,
                         find_spectral_points, halfline_reflection, singularity_residual,
                         transfer_matrix)
from halfscatter.halfline import classify, reflection_from_amplitudes

from helpers import random_bc, random_potential, random_real_phase_bc

EMPTY = PotentialSpec.empty()
DIRICHLET = BoundaryCondition.dirichlet()
NEUMANN = BoundaryCondition.neumann()


def delta_problem(z, a=1.0, gamma=1):
    return HalfLineProblem(PotentialSpec((Delta(z, a),)), BoundaryCondition.from_gamma(gamma))


def shifted(pot: PotentialSpec, d: float) -> list:
    out = []
    for p in pot.pieces:
        if isinstance(p, Delta):
            out.append(Delta(p.z, p.a + d))
        else:
            out.append(Barrier(p.a + d, p.L, n=p.n, v0=p.v0))
    return out


def test_hard_walls():
    assert halfline_reflection(HalfLineProblem(EMPTY, DIRICHLET), 1.3) == -1
    assert halfline_reflection(HalfLineProblem(EMPTY, NEUMANN), 1.3) == 1


def test_spectral_singularity_raises():
    with pytest.raises(SpectralSingularityAtRealK) as info:
        halfline_reflection(delta_problem(1j * math.pi / 2), math.pi / 2)
    assert info.value.k == pytest.approx(math.pi / 2)


def test_nonpositive_k_rejected():
    with pytest.raises(DomainError):
        halfline_reflection(HalfLineProblem(EMPTY, DIRICHLET), 0.0)
    with pytest.raises(DomainError):
        halfline_reflection(HalfLineProblem(EMPTY, DIRICHLET), -1.0)


def test_negative_support_rejected():
    with pytest.raises(DomainError):
        PotentialSpec((Barrier(-0.5, 1.0, n=2),))


@pytest.mark.parametrize("gamma, k, z", [(1, math.pi / 2, 1j * math.pi / 2), (-1, math.pi, 1j * math.pi)])
def test_singularity_residual_vanishes(gamma, k, z):
    assert abs(singularity_residual(delta_problem(z, gamma=gamma), k)) < 1e-12


@pytest.mark.parametrize("gamma", [1, -1, 0.3 + 2j, 5])
def test_empty_residuals_never_vanish(gamma):
    prob = HalfLineProblem(EMPTY, BoundaryCondition.from_gamma(gamma))
    c_a, c_b = prob.bc.homogeneous()
    for k in (0.3, 1.0, 4.0):
        assert singularity_residual(prob, k) == pytest.approx(-c_a)
        assert absorption_residual(prob, k) == pytest.approx(c_b)


def test_absorption_residual_vanishes():
    assert abs(absorption_residual(delta_problem(-1j * math.pi / 2), math.pi / 2)) < 1e-12
    assert halfline_reflection(delta_problem(-1j * math.pi / 2), math.pi / 2) == pytest.approx(0, abs=1e-12)


def test_real_potential_dirichlet_never_absorbs():
    prob = delta_problem(1.7)
    for k in np.linspace(0.2, 6, 50):
        assert abs(absorption_residual(prob, k)) > 1e-3


def test_find_bound_state_point():
    # the z = -1 state sits exactly at threshold; kappa = 0.7968 belongs to z = -2
    points = find_spectral_points(delta_problem(-2.0), ComplexRegion(-0.5, 0.5, 0.1, 2.0))
    bound = [p for p in points if p.kind is SpectralKind.BOUND_STATE]
    assert len(bound) == 1
    assert bound[0].k == pytest.approx(0.7968121300200199j, abs=1e-9)
    assert bound[0].physical and bound[0].residual < 1e-10


def test_find_spectral_singularity_point():
    points = find_spectral_points(delta_problem(1j * math.pi / 2), ComplexRegion(0.5, 3.0, -0.5, 0.5))
    ss = [p for p in points if p.kind is SpectralKind.SPECTRAL_SINGULARITY]
    assert [p.k.real for p in ss] == pytest.approx([math.pi / 2], abs=1e-9)


def test_find_spectral_points_empty_potential():
    assert find_spectral_points(HalfLineProblem(EMPTY, DIRICHLET), ComplexRegion(-2, 2, -2, 2)) == []


def test_spectral_point_invariants():
    prob = HalfLineProblem(PotentialSpec((Delta(-2.0, 1.0), Barrier(1.5, 1.0, n=1.8 + 0.05j))), DIRICHLET)
    for p in find_spectral_points(prob, ComplexRegion(-4, 4, -2, 2)):
        k = p.k
        if p.kind is SpectralKind.BOUND_STATE:
            assert abs(k.real) < 1e-8 * abs(k) and k.imag > 0
        elif p.kind is SpectralKind.SPECTRAL_SINGULARITY:
            assert abs(k.imag) < 1e-8 * abs(k) and k.real > 0
        elif p.kind is SpectralKind.RESONANCE:
            assert (k * k).imag < 0
        elif p.kind is SpectralKind.ANTI_RESONANCE:
            assert (k * k).imag > 0
        else:
            assert not p.physical


@pytest.mark.parametrize("k, kind, physical", [
    (0.5j, SpectralKind.BOUND_STATE, True),
    (-0.5j, SpectralKind.NON_PHYSICAL, False),
    (2.0 + 0j, SpectralKind.SPECTRAL_SINGULARITY, True),
    (-2.0 + 0j, SpectralKind.NON_PHYSICAL, False),
    (1 - 0.2j, SpectralKind.RESONANCE, True),
    (-1 - 0.2j, SpectralKind.ANTI_RESONANCE, True),
    (0j, SpectralKind.NON_PHYSICAL, False),
])
def test_classify(k, kind, physical):
    assert classify(k) == (kind, physical)


def test_find_perfect_absorption():
    ks = find_perfect_absorption(delta_problem(-1j * math.pi / 2), 1, 2)
    assert ks == pytest.approx([math.pi / 2], abs=1e-10)
    assert find_perfect_absorption(delta_problem(2.5), 0.1, 6) == []
    gain = HalfLineProblem(PotentialSpec((Delta(0.3 + 0.8j, 1.2),)), BoundaryCondition.from_gamma(cmath.exp(0.7j)))
    assert find_perfect_absorption(gain, 0.05, 8) == []
    with pytest.raises(DomainError):
        find_perfect_absorption(gain, 0, 1)


def test_external_reflection_examples():
    assert boundary_from_external_reflection(-1).gamma() == pytest.approx(1)
    assert boundary_from_external_reflection(1).gamma() == pytest.approx(-1)
    # gamma = -1/R: a left scatterer with R = -0.9 acts as gamma = 1/0.9
    assert boundary_from_external_reflection(-0.9).gamma() == pytest.approx(1 / 0.9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.2, 5.0))
def test_two_reflection_forms_agree(seed, k):
    rng = np.random.default_rng(seed)
    prob = HalfLineProblem(random_potential(rng), random_bc(rng))
    try:
        R = halfline_reflection(prob, k, cross_check=True)
    except SpectralSingularityAtRealK:
        return
    alt = reflection_from_amplitudes(amplitudes_from_matrix(prob.matrix(k)), *prob.bc.homogeneous(k))
    assert abs(R - alt) < 1e-12 * max(1.0, abs(R))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_numerator_and_denominator_never_both_vanish(seed):
    rng = np.random.default_rng(seed)
    prob = HalfLineProblem(random_potential(rng), random_bc(rng))
    for k in np.linspace(0.05, 8, 400):
        assert max(abs(singularity_residual(prob, k)), abs(absorption_residual(prob, k))) > 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.2, 5.0))
def test_flux_conservation(seed, k):
    rng = np.random.default_rng(seed)
    prob = HalfLineProblem(random_potential(rng, real=True), random_real_phase_bc(rng))
    assert abs(abs(halfline_reflection(prob, k)) - 1) < 1e-8


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.2, 5.0))
def test_composite_scatterer(seed, k):
    rng = np.random.default_rng(seed)
    left, right = random_potential(rng), random_potential(rng)
    d = left.support[1] + float(rng.uniform(0.05, 1.0))
    # amplitudes referred to the new origin x = d pick up exp(2ikd)
    phase = cmath.exp(2j * k * d)
    R_left = amplitudes_from_matrix(transfer_matrix(left, k)).r_right * phase
    half = HalfLineProblem(right, boundary_from_external_reflection(R_left))
    full = amplitudes_from_matrix(transfer_matrix(list(left.pieces) + shifted(right, d), k))
    try:
        R = halfline_reflection(half, k)
    except SpectralSingularityAtRealK:
        return
    assert abs(R - full.r_right * phase) < 1e-8 * max(1.0, abs(R))
