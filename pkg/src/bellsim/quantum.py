"""Closed-form predictions for a spin-1/2 singlet pair measured in one plane.

Outcomes are ±1/2 (spin projections in units of ħ), so the correlation of
the two wings is -cos(θ)/4 and the CHSH combination is at most 1/2 for any
shared hidden-variable measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError
from .rng import RandomStream

TWO_PI = 2.0 * math.pi
HALF = 0.5
LHV_BOUND = 0.5
QUANTUM_TARGET = 1.0 / math.sqrt(2.0)

TSIRELSON_ANGLES = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4)
# Under -cos(θ)/4 this quadruple gives about 0.5972; it reaches 1/sqrt(2) only
# under a doubled-angle law -cos(2θ)/4.
PRINTED_ANGLES = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8)


@dataclass(frozen=True)
class Direction:
    """An analyser direction in the measurement plane, in radians."""

    angle: float

    def __post_init__(self):
        a = math.fmod(float(self.angle), TWO_PI)
        if a < 0.0:
            a += TWO_PI
        if a >= TWO_PI:  # fmod of a tiny negative can round up to 2π
            a = 0.0
        object.__setattr__(self, "angle", a)

    def unit_vector(self) -> np.ndarray:
        return np.array([math.cos(self.angle), math.sin(self.angle), 0.0])


DirectionLike = Union[Direction, float]


def as_direction(d: DirectionLike) -> Direction:
    return d if isinstance(d, Direction) else Direction(d)


def angle_between(a: DirectionLike, b: DirectionLike) -> float:
    """Unsigned angle between two directions, in [0, π]."""
    d = abs(as_direction(a).angle - as_direction(b).angle)
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class OutcomePair:
    a_outcome: float
    b_outcome: float

    def __post_init__(self):
        for v in (self.a_outcome, self.b_outcome):
            if v not in (-HALF, HALF):
                raise DomainError(f"outcome must be exactly ±1/2, got {v}")


OUTCOMES = tuple(OutcomePair(x, y) for x in (HALF, -HALF) for y in (HALF, -HALF))


@dataclass(frozen=True)
class JointPmf:
    probabilities: dict  # OutcomePair -> float

    def __getitem__(self, pair: OutcomePair) -> float:
        return self.probabilities[pair]

    @property
    def p_same(self) -> float:
        return sum(p for o, p in self.probabilities.items() if o.a_outcome == o.b_outcome)

    def expectation(self) -> float:
        return sum(o.a_outcome * o.b_outcome * p for o, p in self.probabilities.items())

    def marginal_a(self, value: float) -> float:
        return sum(p for o, p in self.probabilities.items() if o.a_outcome == value)

    def marginal_b(self, value: float) -> float:
        return sum(p for o, p in self.probabilities.items() if o.b_outcome == value)


def quantum_correlation(a: DirectionLike, b: DirectionLike) -> float:
    return -0.25 * math.cos(angle_between(a, b))


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"angle between analysers must lie in [0, π], got {theta}")
    return theta


def singlet_joint_pmf(theta: float) -> JointPmf:
    theta = _check_theta(theta)
    same = math.sin(theta / 2) ** 2 / 2
    opposite = math.cos(theta / 2) ** 2 / 2
    return JointPmf({o: same if o.a_outcome == o.b_outcome else opposite for o in OUTCOMES})


def sample_pairs(theta: float, rng: RandomStream, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` outcome pairs from the singlet law; returns the two outcome arrays."""
    theta = _check_theta(theta)
    p_same = math.sin(theta / 2) ** 2
    u = rng.generator.random((n, 2))
    a = np.where(u[:, 0] < 0.5, HALF, -HALF)
    b = np.where(u[:, 1] < p_same, a, -a)
    return a, b


def sample_pair(theta: float, rng: RandomStream) -> OutcomePair:
    a, b = sample_pairs(theta, rng, 1)
    return OutcomePair(float(a[0]), float(b[0]))


def chsh_from_terms(e_ab: float, e_ab2: float, e_a2b: float, e_a2b2: float) -> float:
    """|E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|."""
    return abs(e_ab - e_ab2) + abs(e_a2b + e_a2b2)


def chsh_value(correlation: Callable[[DirectionLike, DirectionLike], float],
               a: DirectionLike, b: DirectionLike,
               a2: DirectionLike, b2: DirectionLike) -> float:
    return chsh_from_terms(correlation(a, b), correlation(a, b2),
                           correlation(a2, b), correlation(a2, b2))
