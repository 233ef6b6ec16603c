"""Hidden-variable response models and CHSH estimators.

Two sampling regimes are supported. In the shared regime one collection of
hidden states feeds all four correlations, which is exactly the situation in
which the CHSH bound of 1/2 is a theorem (it holds for the empirical measure
of any finite sample). In the per-context regime every measurement context
(a, b) draws its own states from its own substream and may use its own
measure, so no single state enters two correlations.

Hidden states are handled in bulk as ``(n, 3)`` arrays of unit vectors; a
state's identity is the pair ``(stream_id, draw index)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .errors import DomainError
from .quantum import (
    HALF,
    Direction,
    DirectionLike,
    angle_between,
    as_direction,
    chsh_from_terms,
    sample_pairs,
)
from .rng import RandomStream

CONTEXT_LABELS = ("ab", "ab'", "a'b", "a'b'")


@dataclass(frozen=True)
class PhysicalState:
    lam: tuple[float, float, float]
    id: tuple[int, int]  # (stream_id, draw index)

    def vector(self) -> np.ndarray:
        return np.asarray(self.lam, dtype=float)


@dataclass(frozen=True)
class MeasurementContext:
    a: Direction
    b: Direction
    device_type: str

    @classmethod
    def of(cls, a: DirectionLike, b: DirectionLike, device_type: str) -> MeasurementContext:
        return cls(as_direction(a), as_direction(b), device_type)

    @property
    def theta(self) -> float:
        return angle_between(self.a, self.b)


@dataclass
class ContextSample:
    context: MeasurementContext
    lambdas: np.ndarray
    ids: np.ndarray
    stream_id: int
    a_outcomes: np.ndarray
    b_outcomes: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)

    def state_ids(self) -> set[tuple[int, int]]:
        return {(self.stream_id, int(i)) for i in self.ids}


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    std_error: float
    n: int


@dataclass
class ChshReport:
    angles: tuple[float, float, float, float]
    correlations: dict[str, CorrelationEstimate]
    value: float
    std_error: float
    sampling: str
    disjoint: bool | None = None
    exact: bool = False


# ------------------------------------------------------------------ states


def sample_lambdas(rng: RandomStream, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``n`` states uniform on the unit sphere plus their draw indices."""
    v = rng.generator.standard_normal((n, 3))
    norms = np.linalg.norm(v, axis=1)
    while np.any(norms == 0.0):  # probability zero, but keep the contract
        bad = norms == 0.0
        v[bad] = rng.generator.standard_normal((int(bad.sum()), 3))
        norms = np.linalg.norm(v, axis=1)
    return v / norms[:, None], rng.take_ids(n)


def sample_lambda(rng: RandomStream) -> PhysicalState:
    lam, ids = sample_lambdas(rng, 1)
    return PhysicalState(tuple(float(x) for x in lam[0]), (rng.stream_id, int(ids[0])))


StatesLike = Union[np.ndarray, Sequence[PhysicalState], PhysicalState]


def as_lambda_array(states: StatesLike) -> np.ndarray:
    if isinstance(states, PhysicalState):
        return states.vector()[None, :]
    if isinstance(states, np.ndarray):
        arr = states
    else:
        arr = np.array([s.vector() for s in states], dtype=float).reshape(-1, 3)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DomainError(f"hidden states must be 3-vectors, got shape {arr.shape}")
    return arr


# ------------------------------------------------------------------ models

Response = Callable[[Direction, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ResponseModel:
    """Deterministic outcome functions of (direction, hidden state).

    ``respond_a``/``respond_b`` map a direction and an ``(n, 3)`` array of
    states to an array of ±1/2 outcomes.
    """

    respond_a: Response
    respond_b: Response
    label: str

    def a(self, direction: DirectionLike, states: StatesLike) -> np.ndarray:
        return self.respond_a(as_direction(direction), as_lambda_array(states))

    def b(self, direction: DirectionLike, states: StatesLike) -> np.ndarray:
        return self.respond_b(as_direction(direction), as_lambda_array(states))


def _sign_response(d: Direction, lambdas: np.ndarray) -> np.ndarray:
    # â·λ == 0 resolves to +1/2
    return np.where(lambdas @ d.unit_vector() >= 0.0, HALF, -HALF)


def bell_sign_model() -> ResponseModel:
    return ResponseModel(_sign_response,
                         lambda d, lam: -_sign_response(d, lam),
                         "lhv-sign")


def constant_model(a_value: float = HALF, b_value: float = HALF) -> ResponseModel:
    if a_value not in (HALF, -HALF) or b_value not in (HALF, -HALF):
        raise DomainError("constant outcomes must be ±1/2")
    return ResponseModel(lambda d, lam: np.full(len(lam), a_value),
                         lambda d, lam: np.full(len(lam), b_value),
                         "constant")


def sign_model_correlation(theta: float) -> float:
    """Population correlation of the sign model for λ uniform on the sphere."""
    return -0.25 * (1.0 - 2.0 * theta / math.pi)


# -------------------------------------------------------------- estimators


def _estimate(products: np.ndarray) -> CorrelationEstimate:
    n = len(products)
    if n == 0:
        raise DomainError("cannot estimate a correlation from an empty sample")
    value = float(products.sum() / n)  # products are ±1/4, so the sum is exact
    sd = float(products.std(ddof=1)) if n > 1 else 0.0
    return CorrelationEstimate(value, sd / math.sqrt(n), n)


def estimate_correlation(model: ResponseModel, a: DirectionLike, b: DirectionLike,
                         states: StatesLike) -> CorrelationEstimate:
    lam = as_lambda_array(states)
    if len(lam) == 0:
        raise DomainError("cannot estimate a correlation from an empty sample")
    return _estimate(model.a(a, lam) * model.b(b, lam))


def _rss(errors: Iterable[float]) -> float:
    return math.sqrt(sum(e * e for e in errors))


def chsh_shared_report(model: ResponseModel, a: DirectionLike, b: DirectionLike,
                       a2: DirectionLike, b2: DirectionLike,
                       states: StatesLike) -> ChshReport:
    lam = as_lambda_array(states)
    if len(lam) == 0:
        raise DomainError("cannot evaluate CHSH on an empty sample")
    pairs = ((a, b), (a, b2), (a2, b), (a2, b2))
    est = {label: estimate_correlation(model, x, y, lam)
           for label, (x, y) in zip(CONTEXT_LABELS, pairs)}
    value = chsh_from_terms(*(est[k].value for k in CONTEXT_LABELS))
    angles = tuple(as_direction(d).angle for d in (a, b, a2, b2))
    return ChshReport(angles, est, value, _rss(e.std_error for e in est.values()), "shared")


def chsh_shared(model: ResponseModel, a: DirectionLike, b: DirectionLike,
                a2: DirectionLike, b2: DirectionLike, states: StatesLike) -> float:
    """CHSH value with all four correlations taken over the same states."""
    return chsh_shared_report(model, a, b, a2, b2, states).value


def pointwise_bell_identity(model: ResponseModel, b: DirectionLike, b2: DirectionLike,
                            state: StatesLike) -> tuple[float, float]:
    """(|B_b - B_b'|, |B_b + B_b'|) for one state; one entry is 0, the other 1."""
    lam = as_lambda_array(state)
    if len(lam) != 1:
        raise DomainError("pointwise identity takes a single state")
    x, y = float(model.b(b, lam)[0]), float(model.b(b2, lam)[0])
    return abs(x - y), abs(x + y)


# ------------------------------------------------------- per-context regime

Sampler = Callable[[MeasurementContext, RandomStream, int], ContextSample]


def model_sampler(model: ResponseModel) -> Sampler:
    """Fresh hidden states per context, outcomes from a fixed response model."""

    def draw(context: MeasurementContext, rng: RandomStream, n: int) -> ContextSample:
        lam, ids = sample_lambdas(rng, n)
        return ContextSample(context, lam, ids, rng.stream_id,
                             model.a(context.a, lam), model.b(context.b, lam))

    return draw


def contextual_sampler(context: MeasurementContext, rng: RandomStream, n: int) -> ContextSample:
    """States labelled from the context's stream, outcomes from the singlet law of that context."""
    lam, ids = sample_lambdas(rng, n)
    a_out, b_out = sample_pairs(context.theta, rng, n)
    return ContextSample(context, lam, ids, rng.stream_id, a_out, b_out)


def disjointness_certificate(samples: Sequence[ContextSample]) -> bool:
    """True iff no state identity occurs in two of the samples."""
    by_stream: dict[int, list[np.ndarray]] = {}
    for s in samples:
        by_stream.setdefault(s.stream_id, []).append(s.ids)
    for id_lists in by_stream.values():
        for i, x in enumerate(id_lists):
            for y in id_lists[i + 1:]:
                if np.intersect1d(x, y).size:
                    return False
    return True


def worker_count() -> int:
    cap = os.environ.get("BELL_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise DomainError(f"BELL_THREADS must be an integer, got {cap!r}") from None
    return min(n, len(CONTEXT_LABELS))


def chsh_disjoint(sampler: Sampler, a: DirectionLike, b: DirectionLike,
                  a2: DirectionLike, b2: DirectionLike, n_per_context: int,
                  rng: RandomStream, workers: int | None = None) -> ChshReport:
    """CHSH with each correlation estimated on its own independent sample."""
    if n_per_context < 2:
        raise DomainError("per-context sampling needs at least 2 states per context")
    pairs = ((a, b), (a, b2), (a2, b), (a2, b2))
    contexts = [MeasurementContext.of(x, y, label) for label, (x, y) in zip(CONTEXT_LABELS, pairs)]
    streams = [rng.spawn(i) for i in range(len(contexts))]

    def run(i: int) -> ContextSample:
        return sampler(contexts[i], streams[i], n_per_context)

    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(run, range(len(contexts))))
    else:
        samples = [run(i) for i in range(len(contexts))]

    est = {s.context.device_type: _estimate(s.a_outcomes * s.b_outcomes) for s in samples}
    value = chsh_from_terms(*(est[k].value for k in CONTEXT_LABELS))
    angles = tuple(as_direction(d).angle for d in (a, b, a2, b2))
    return ChshReport(angles, est, value, _rss(e.std_error for e in est.values()),
                      "per-context", disjoint=disjointness_certificate(samples))
