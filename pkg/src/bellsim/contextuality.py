"""Noncontextual value assignments for spin-1 squared projections.

For spin 1 the squares of the projections on three orthogonal axes sum to
s(s+1) = 2, so each is 0 or 1 and every orthogonal triad takes the values
{1, 0, 1}. A noncontextual assignment gives every direction one value no
matter which triad it is read from. The search below works on the
combinatorics of the triad system only; orthogonality is the caller's
responsibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError
from .measure import CompatibilityRelation
from .rng import RandomStream

TRIAD_SUM = 2
DEFAULT_P_ONE = 2.0 / 3.0


@dataclass(frozen=True)
class Triad:
    directions: tuple[str, str, str]

    def __post_init__(self):
        d = tuple(self.directions)
        if len(d) != 3 or len(set(d)) != 3:
            raise DomainError(f"a triad needs three distinct directions, got {list(d)}")
        object.__setattr__(self, "directions", d)


@dataclass(frozen=True)
class Assignment:
    values: Mapping[str, int]

    def __getitem__(self, direction: str) -> int:
        return self.values[direction]

    def satisfies(self, triads: Iterable[Triad]) -> bool:
        return all(sum(self.values[d] for d in t.directions) == TRIAD_SUM for t in triads)


@dataclass(frozen=True)
class DeviceType:
    id: str
    observables: frozenset[str]

    def check(self, rel: CompatibilityRelation) -> None:
        obs = sorted(self.observables)
        for i, x in enumerate(obs):
            for y in obs[i + 1:]:
                if not rel.compatible(x, y):
                    raise DomainError(f"device {self.id!r} pairs incompatible {x!r} and {y!r}")


def _direction_order(triads: Sequence[Triad], directions: Sequence[str]) -> list[str]:
    degree = {d: 0 for d in directions}
    for t in triads:
        for d in t.directions:
            degree[d] += 1
    first = {d: i for i, d in enumerate(directions)}
    return sorted(directions, key=lambda d: (-degree[d], first[d]))


def find_noncontextual_assignment(triads: Sequence[Triad],
                                  directions: Sequence[str] | None = None) -> Assignment | None:
    """Backtracking search for a 0/1 assignment with every triad summing to 2.

    Returns ``None`` when the system admits no noncontextual assignment.
    Directions listed but in no triad get the value 1.
    """
    triads = [t if isinstance(t, Triad) else Triad(tuple(t)) for t in triads]
    if directions is None:
        directions = list(dict.fromkeys(d for t in triads for d in t.directions))
    else:
        directions = list(directions)
        if len(set(directions)) != len(directions):
            raise DomainError("direction names must be unique")
        known = set(directions)
        for t in triads:
            missing = [d for d in t.directions if d not in known]
            if missing:
                raise DomainError(f"triad {list(t.directions)} uses undeclared {missing}")

    member_of: dict[str, list[int]] = {d: [] for d in directions}
    for i, t in enumerate(triads):
        for d in t.directions:
            member_of[d].append(i)
    zeros = [0] * len(triads)
    free = [3] * len(triads)
    values: dict[str, int] = {}
    order = _direction_order(triads, directions)

    def consistent(d: str) -> bool:
        for i in member_of[d]:
            if zeros[i] > 1 or (free[i] == 0 and zeros[i] != 1):
                return False
        return True

    def place(d: str, v: int, sign: int) -> None:
        for i in member_of[d]:
            free[i] -= sign
            if v == 0:
                zeros[i] += sign

    def search(k: int) -> bool:
        if k == len(order):
            return True
        d = order[k]
        for v in ((0, 1) if member_of[d] else (1,)):
            place(d, v, 1)
            values[d] = v
            if consistent(d) and search(k + 1):
                return True
            place(d, v, -1)
            del values[d]
        return False

    if not search(0):
        return None
    return Assignment(dict(values))


def load_triad_document(doc: Mapping) -> tuple[list[str], list[Triad]]:
    """``{"directions": [...], "triads": [[x, y, z], ...]}``; directions optional."""
    try:
        raw = doc["triads"]
    except (KeyError, TypeError):
        raise DomainError("triad document needs a 'triads' list") from None
    triads = []
    for t in raw:
        if not isinstance(t, (list, tuple)):
            raise DomainError(f"malformed triad {t!r}")
        triads.append(Triad(tuple(str(x) for x in t)))
    if "directions" in doc:
        directions = [str(d) for d in doc["directions"]]
    else:
        directions = list(dict.fromkeys(d for t in triads for d in t.directions))
    known = set(directions)
    for t in triads:
        missing = [d for d in t.directions if d not in known]
        if missing:
            raise DomainError(f"triad {list(t.directions)} uses undeclared {missing}")
    return directions, triads


# ----------------------------------------------------- two-device experiment


@dataclass(frozen=True)
class AgreementStatistic:
    rate: float
    std_error: float
    n: int
    agreements: int


def simulate_spin1_agreement(flip_prob: float, n: int, rng: RandomStream,
                             p_one: float = DEFAULT_P_ONE) -> AgreementStatistic:
    """Compare S_x² read by two device types on the two particles of each decay.

    Both particles carry the same value v (P(v = 1) = ``p_one``). The device
    of the first type reports v; the second type reports v flipped with
    probability ``flip_prob``.
    """
    if not 0.0 <= flip_prob <= 1.0:
        raise DomainError(f"flip_prob must lie in [0, 1], got {flip_prob}")
    if not 0.0 <= p_one <= 1.0:
        raise DomainError(f"p_one must lie in [0, 1], got {p_one}")
    if n < 1:
        raise DomainError("need at least one decay")
    u = rng.generator.random((n, 2))
    v = u[:, 0] < p_one
    second = np.where(u[:, 1] < flip_prob, ~v, v)
    agreements = int(np.count_nonzero(second == v))
    rate = agreements / n
    return AgreementStatistic(rate, math.sqrt(rate * (1.0 - rate) / n), n, agreements)
