import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellsim.errors import DomainError
from bellsim.quantum import (
    PRINTED_ANGLES,
    TSIRELSON_ANGLES,
    Direction,
    OutcomePair,
    angle_between,
    chsh_value,
    quantum_correlation,
    sample_pair,
    sample_pairs,
    singlet_joint_pmf,
)
from bellsim.rng import RandomStream

from oracles import singlet_pmf_by_solving

angles = st.floats(-20.0, 20.0, allow_nan=False)


def test_direction_normalised():
    assert Direction(2 * math.pi).angle == 0.0
    assert Direction(-math.pi / 2).angle == pytest.approx(3 * math.pi / 2)
    assert 0.0 <= Direction(-1e-300).angle < 2 * math.pi


@given(angles, angles)
def test_angle_between_range_and_symmetry(a, b):
    t = angle_between(a, b)
    assert 0.0 <= t <= math.pi
    assert t == pytest.approx(angle_between(b, a), abs=1e-12)


def test_correlation_examples():
    assert quantum_correlation(0.0, math.pi / 2) == pytest.approx(0.0, abs=1e-16)
    assert quantum_correlation(0.3, 0.3) == -0.25
    assert quantum_correlation(0.0, math.pi / 8) == pytest.approx(-0.23096988312782168, abs=1e-15)


@given(angles, angles)
def test_correlation_bounded(a, b):
    assert abs(quantum_correlation(a, b)) <= 0.25


@given(st.floats(0.0, math.pi))
def test_correlation_antisymmetric(theta):
    assert quantum_correlation(0.0, theta) == pytest.approx(
        -quantum_correlation(0.0, math.pi - theta), abs=1e-15)


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi, 0.3, 2.0])
def test_joint_pmf_matches_linear_solve(theta):
    pmf = singlet_joint_pmf(theta)
    ref = singlet_pmf_by_solving(theta)
    for (x, y), p in ref.items():
        assert pmf[OutcomePair(x, y)] == pytest.approx(p, abs=1e-12)


def test_joint_pmf_examples():
    assert singlet_joint_pmf(0.0).p_same == 0.0
    assert singlet_joint_pmf(math.pi).p_same == pytest.approx(1.0, abs=1e-15)
    quarter = singlet_joint_pmf(math.pi / 2)
    assert all(p == pytest.approx(0.25, abs=1e-15) for p in quarter.probabilities.values())


def test_joint_pmf_invariants_on_grid():
    for theta in np.linspace(0.0, math.pi, 2001):
        pmf = singlet_joint_pmf(theta)
        assert len(pmf.probabilities) == 4
        assert sum(pmf.probabilities.values()) == pytest.approx(1.0, abs=1e-12)
        for v in (0.5, -0.5):
            assert pmf.marginal_a(v) == pytest.approx(0.5, abs=1e-12)
            assert pmf.marginal_b(v) == pytest.approx(0.5, abs=1e-12)
        assert abs(pmf.expectation() - quantum_correlation(0.0, theta)) < 1e-12


def test_joint_pmf_rejects_bad_theta():
    with pytest.raises(DomainError):
        singlet_joint_pmf(-0.1)
    with pytest.raises(DomainError):
        singlet_joint_pmf(4.0)


def test_outcome_pair_range():
    with pytest.raises(DomainError):
        OutcomePair(1.0, 0.5)


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_sampling_extremes(seed):
    a, b = sample_pairs(0.0, RandomStream(seed), 10_000)
    assert np.all(a == -b)
    a, b = sample_pairs(math.pi, RandomStream(seed), 10_000)
    assert np.all(a == b)
    p = sample_pair(0.0, RandomStream(seed))
    assert p.a_outcome == -p.b_outcome


def test_sampling_orthogonal_rate():
    a, b = sample_pairs(math.pi / 2, RandomStream(2024), 10 ** 6)
    assert abs(np.mean(a == b) - 0.5) <= 0.002  # 3σ = 0.0015
    assert set(np.unique(a)) == {-0.5, 0.5}


def test_chsh_examples():
    assert chsh_value(quantum_correlation, *TSIRELSON_ANGLES) == pytest.approx(
        1 / math.sqrt(2), abs=1e-15)
    assert chsh_value(quantum_correlation, *PRINTED_ANGLES) == pytest.approx(
        0.5972387912921926, abs=1e-15)
    assert chsh_value(lambda a, b: 0.0, 0, 1, 2, 3) == 0.0


def test_tsirelson_ceiling_scan():
    rng = np.random.default_rng(5)
    grid = [rng.uniform(0, 2 * math.pi, 100) for _ in range(4)]
    a, b, a2, b2 = grid
    best = 0.0
    for x in a:  # 100 chunks of 10^6 quadruples
        e = lambda u, v: -0.25 * np.cos(u - v)
        i = (np.abs(e(x, b)[:, None, None] - e(x, b2)[None, None, :])
             + np.abs(e(a2[None, :, None], b[:, None, None]) + e(a2[None, :, None], b2[None, None, :])))
        best = max(best, float(i.max()))
    assert best <= 0.707107 + 1e-9


@given(angles, angles, angles, angles, angles)
@settings(max_examples=200)
def test_chsh_nonnegative_and_rotation_invariant(a, b, a2, b2, r):
    i = chsh_value(quantum_correlation, a, b, a2, b2)
    assert i >= 0
    assert chsh_value(quantum_correlation, a + r, b + r, a2 + r, b2 + r) == pytest.approx(i, abs=1e-12)
