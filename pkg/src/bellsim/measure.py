"""Finite Kolmogorov probability spaces.

Events are bitmasks over the positions of a :class:`SampleSpace`. An algebra
is stored through its atoms (the minimal nonempty events); every event is a
union of atoms, so an algebra with ``k`` atoms has exactly ``2**k`` events.
Probabilities are :class:`fractions.Fraction` throughout.

Events may carry observable tags naming the observables whose outcomes they
constrain. Tags are what the physical admissibility check inspects: an event
that pins down values of two incompatible observables cannot be singled out
by any device, so an algebra containing one has no physical measure.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import DomainError


@dataclass(frozen=True)
class SampleSpace:
    elements: tuple[Hashable, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise DomainError("a sample space needs at least one elementary event")
        if len(set(self.elements)) != len(self.elements):
            raise DomainError("elementary events must be distinct")

    @classmethod
    def of_size(cls, n: int) -> SampleSpace:
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.elements)) - 1

    def index(self, element: Hashable) -> int:
        try:
            return self.elements.index(element)
        except ValueError:
            raise DomainError(f"{element!r} is not an elementary event of this space") from None

    def event(self, members: Iterable[Hashable], tags: Iterable[str] = ()) -> Event:
        mask = 0
        for m in members:
            mask |= 1 << self.index(m)
        return Event(mask, frozenset(tags))

    def members(self, event: Event) -> frozenset:
        return frozenset(e for i, e in enumerate(self.elements) if event.mask >> i & 1)

    def sorted_members(self, event: Event) -> list:
        return [e for i, e in enumerate(self.elements) if event.mask >> i & 1]


@dataclass(frozen=True)
class Event:
    mask: int
    tags: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.mask < 0:
            raise DomainError("event mask must be non-negative")
        object.__setattr__(self, "tags", frozenset(self.tags))

    def __lt__(self, other):
        return (self.mask, sorted(self.tags)) < (other.mask, sorted(other.tags))

    def __contains__(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def is_subset(self, other: Event) -> bool:
        return self.mask & ~other.mask == 0

    def __len__(self) -> int:
        return self.mask.bit_count()


def _min_index(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _atoms_of(full: int, generator_masks: Iterable[int]) -> tuple[int, ...]:
    """Refine the partition {Ω} by every generator; atoms ordered by smallest member."""
    blocks = [full]
    for g in generator_masks:
        refined = []
        for b in blocks:
            inside, outside = b & g, b & ~g
            if inside:
                refined.append(inside)
            if outside:
                refined.append(outside)
        blocks = refined
    return tuple(sorted(blocks, key=_min_index))


def _is_union_of(mask: int, atoms: Sequence[int]) -> bool:
    return all(mask & a in (0, a) for a in atoms)


def _unions(atoms: Sequence[int]) -> list[int]:
    masks = [0]
    for a in atoms:
        masks += [m | a for m in masks]
    return sorted(masks)


@dataclass(frozen=True)
class SigmaAlgebra:
    space: SampleSpace
    atoms: tuple[int, ...]
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)

    def __contains__(self, item) -> bool:
        mask = item.mask if isinstance(item, Event) else item
        return 0 <= mask <= self.space.full_mask and _is_union_of(mask, self.atoms)

    def event_for(self, mask: int) -> Event:
        """The member event of this algebra with the given mask (carrying its tags)."""
        for e in self.events:
            if e.mask == mask:
                return e
        raise KeyError(mask)

    def atom_events(self) -> list[Event]:
        return [self.event_for(a) for a in self.atoms]

    def masks(self) -> frozenset[int]:
        return frozenset(e.mask for e in self.events)

    def describe(self, event: Event) -> list:
        return self.space.sorted_members(event)


def _tag_events(full: int, atoms: Sequence[int], generators: Sequence[Event]) -> tuple[Event, ...]:
    # An event's tags are the smallest set of observables whose generators
    # already produce it; ties broken by the sorted tag tuple.
    all_tags = sorted(set().union(*(g.tags for g in generators))) if generators else []
    candidates = []
    for r in range(len(all_tags) + 1):
        candidates.extend(itertools.combinations(all_tags, r))
    untagged = {m: None for m in _unions(atoms)}
    for combo in candidates:
        allowed = frozenset(combo)
        sub_atoms = _atoms_of(full, (g.mask for g in generators if g.tags <= allowed))
        for m, t in untagged.items():
            if t is None and _is_union_of(m, sub_atoms):
                untagged[m] = allowed
        if all(t is not None for t in untagged.values()):
            break
    return tuple(Event(m, t) for m, t in sorted(untagged.items()))


def generate_algebra(space: SampleSpace, generators: Iterable[Event]) -> SigmaAlgebra:
    """Smallest algebra on ``space`` containing every generator.

    Tags propagate: each event is tagged with the minimal set of generator
    observables needed to produce it, so ∅ and Ω are untagged, a generator's
    complement keeps its tags, and an intersection of events generated by
    different observables carries both.
    """
    generators = list(generators)
    full = space.full_mask
    for g in generators:
        if g.mask & ~full:
            raise DomainError(f"generator {g.mask:#b} lies outside the sample space")
    atoms = _atoms_of(full, (g.mask for g in generators))
    return SigmaAlgebra(space, atoms, _tag_events(full, atoms, generators))


def verify_closure(f: SigmaAlgebra) -> bool:
    """Exhaustively check complement, union and intersection closure."""
    masks = f.masks()
    full = f.space.full_mask
    if 0 not in masks or full not in masks or len(masks) != 2 ** len(f.atoms):
        return False
    if any(full & ~m not in masks for m in masks):
        return False
    ordered = sorted(masks)
    for i, m1 in enumerate(ordered):
        for m2 in ordered[i + 1:]:
            if m1 | m2 not in masks or m1 & m2 not in masks:
                return False
    return True


def trivial_algebra(space: SampleSpace) -> SigmaAlgebra:
    return generate_algebra(space, [])


def algebra_from_partition(space: SampleSpace, blocks: Iterable[Iterable[Hashable]],
                           tags: Iterable[str] = ()) -> SigmaAlgebra:
    tags = frozenset(tags)
    return generate_algebra(space, [space.event(b, tags) for b in blocks])


def join_algebras(f1: SigmaAlgebra, f2: SigmaAlgebra) -> SigmaAlgebra:
    """The algebra generated by ``f1`` and ``f2`` together."""
    if f1.space != f2.space:
        raise DomainError("cannot join algebras on different sample spaces")
    return generate_algebra(f1.space, f1.events + f2.events)


# ---------------------------------------------------------------- measures


@dataclass(frozen=True)
class ProbabilityMeasure:
    algebra: SigmaAlgebra
    weights: tuple[Fraction, ...]  # aligned with algebra.atoms

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != len(self.algebra.atoms):
            raise DomainError(
                f"expected {len(self.algebra.atoms)} atom weights, got {len(w)}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, algebra: SigmaAlgebra) -> ProbabilityMeasure:
        k = len(algebra.atoms)
        return cls(algebra, (Fraction(1, k),) * k)

    @classmethod
    def from_elements(cls, algebra: SigmaAlgebra,
                      element_weights: Sequence) -> ProbabilityMeasure:
        """Push per-element weights onto the atoms that contain them."""
        n = len(algebra.space)
        if len(element_weights) != n:
            raise DomainError(f"expected {n} element weights, got {len(element_weights)}")
        return cls(algebra, tuple(
            sum((Fraction(element_weights[i]) for i in range(n) if a >> i & 1), Fraction(0))
            for a in algebra.atoms))

    def weight_of_atom(self, atom: int) -> Fraction:
        return self.weights[self.algebra.atoms.index(atom)]

    def __call__(self, event) -> Fraction:
        mask = event.mask if isinstance(event, Event) else event
        if mask not in self.algebra:
            raise DomainError("probability is only defined on events of the algebra")
        return sum((w for a, w in zip(self.algebra.atoms, self.weights) if a & mask),
                   Fraction(0))


@dataclass(frozen=True)
class AxiomFailure:
    axiom: str
    events: tuple[Event, ...]
    detail: str


@dataclass
class MeasureReport:
    ok: bool
    checks: int
    failures: list[AxiomFailure]

    def to_dict(self, space: SampleSpace) -> dict:
        return {
            "ok": self.ok,
            "checks": self.checks,
            "failures": [{"axiom": f.axiom, "detail": f.detail,
                          "events": [space.sorted_members(e) for e in f.events]}
                         for f in self.failures],
        }


def verify_measure(p: ProbabilityMeasure) -> MeasureReport:
    """Check the measure axioms exactly over every event and disjoint pair."""
    alg = p.algebra
    full = alg.space.full_mask
    failures = []
    checks = 0
    probs = {e.mask: p(e) for e in alg.events}
    named = {e.mask: e for e in alg.events}

    checks += 1
    if probs[0] != 0:
        failures.append(AxiomFailure("empty", (named[0],), f"P(∅) = {probs[0]}"))
    checks += 1
    if probs[full] != 1:
        failures.append(AxiomFailure("normalization", (named[full],),
                                     f"P(Ω) = {probs[full]}, expected 1"))
    for m, pr in probs.items():
        checks += 1
        if not 0 <= pr <= 1:
            failures.append(AxiomFailure("range", (named[m],), f"P = {pr} outside [0, 1]"))
    masks = sorted(probs)
    for i, m1 in enumerate(masks):
        for m2 in masks[i + 1:]:
            if m1 & m2:
                continue
            checks += 1
            if probs[m1 | m2] != probs[m1] + probs[m2]:
                failures.append(AxiomFailure(
                    "additivity", (named[m1], named[m2]),
                    f"P(F∪G) = {probs[m1 | m2]} != {probs[m1]} + {probs[m2]}"))
    return MeasureReport(not failures, checks, failures)


# ---------------------------------------------------------- random quantities


@dataclass(frozen=True)
class RandomQuantity:
    space: SampleSpace
    values: tuple[float, ...]  # aligned with space.elements
    observable: str | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(self.space):
            raise DomainError("a random quantity must be defined on every elementary event")
        if any(math.isnan(v) for v in vals):
            raise DomainError("random quantity values must lie in the extended reals")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, space: SampleSpace, mapping: Mapping[Hashable, float],
                     observable: str | None = None) -> RandomQuantity:
        missing = [e for e in space.elements if e not in mapping]
        if missing:
            raise DomainError(f"random quantity undefined at {missing}")
        return cls(space, tuple(mapping[e] for e in space.elements), observable)

    def __call__(self, element: Hashable) -> float:
        return self.values[self.space.index(element)]

    def level_set(self, value: float) -> int:
        return sum(1 << i for i, v in enumerate(self.values) if v == value)


def is_measurable(x: RandomQuantity, f: SigmaAlgebra) -> tuple[bool, float | None]:
    """Whether every level set of ``x`` is an event of ``f``.

    Returns ``(True, None)`` or ``(False, v)`` where ``v`` is the smallest
    value whose preimage splits an atom.
    """
    if x.space != f.space:
        raise DomainError("random quantity and algebra live on different spaces")
    for v in sorted(set(x.values)):
        if not _is_union_of(x.level_set(v), f.atoms):
            return False, v
    return True, None


def preimage_event(x: RandomQuantity, lo: float, hi: float) -> Event:
    """The event {ω : lo < X(ω) <= hi}."""
    if not lo < hi:
        raise DomainError(f"empty or reversed interval ({lo}, {hi}]")
    mask = sum(1 << i for i, v in enumerate(x.values) if lo < v <= hi)
    return Event(mask, frozenset([x.observable]) if x.observable else frozenset())


# ------------------------------------------------------------- admissibility


@dataclass(frozen=True)
class CompatibilityRelation:
    observables: frozenset[str]
    compatible_pairs: frozenset[frozenset[str]]

    def __post_init__(self):
        object.__setattr__(self, "observables", frozenset(self.observables))
        pairs = frozenset(frozenset(p) for p in self.compatible_pairs)
        for p in pairs:
            if not p <= self.observables:
                raise DomainError(f"pair {sorted(p)} names unknown observables")
        object.__setattr__(self, "compatible_pairs", pairs)

    @classmethod
    def from_incompatible(cls, observables: Iterable[str],
                          incompatible: Iterable[Iterable[str]]) -> CompatibilityRelation:
        obs = frozenset(observables)
        bad = {frozenset(p) for p in incompatible}
        pairs = {frozenset(p) for p in itertools.combinations(sorted(obs), 2)} - bad
        return cls(obs, frozenset(pairs))

    def compatible(self, a: str, b: str) -> bool:
        for o in (a, b):
            if o not in self.observables:
                raise DomainError(f"unknown observable {o!r}")
        return a == b or frozenset((a, b)) in self.compatible_pairs


def is_physically_admissible(f: SigmaAlgebra,
                             rel: CompatibilityRelation) -> tuple[bool, list[Event]]:
    """Whether every event only constrains mutually compatible observables."""
    offending = []
    for e in f.events:
        tags = sorted(e.tags)
        for t in tags:
            if t not in rel.observables:
                raise DomainError(f"event tag {t!r} is not in the compatibility relation")
        if not all(rel.compatible(s, t) for s, t in itertools.combinations(tags, 2)):
            offending.append(e)
    return not offending, offending


# ---------------------------------------------------------------- documents


def load_algebra_document(doc: Mapping) -> tuple[SigmaAlgebra, ProbabilityMeasure | None]:
    """Build an algebra (and optional measure) from a parsed JSON document.

    ``{"space_size": n, "generators": [[i, ...], ...], "tags": [[...], ...],
    "weights": ["p/q", ...]}``; indices are 0-based positions, ``tags`` is
    optional and parallel to ``generators``, ``weights`` (optional) are per
    atom in atom order.
    """
    try:
        n = int(doc["space_size"])
        gens = doc.get("generators", [])
        tags = doc.get("tags") or [[] for _ in gens]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed algebra document: {exc}") from None
    if n < 1:
        raise DomainError("space_size must be at least 1")
    if len(tags) != len(gens):
        raise DomainError("tags must be parallel to generators")
    space = SampleSpace.of_size(n)
    events = []
    for members, t in zip(gens, tags):
        for i in members:
            if not isinstance(i, int) or not 0 <= i < n:
                raise DomainError(f"generator index {i!r} out of range 0..{n - 1}")
        events.append(space.event(members, t))
    algebra = generate_algebra(space, events)
    measure = None
    if doc.get("weights") is not None:
        try:
            weights = [Fraction(w) for w in doc["weights"]]
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise DomainError(f"bad weight: {exc}") from None
        measure = ProbabilityMeasure(algebra, weights)
    return algebra, measure


def load_compatibility_document(doc: Mapping) -> CompatibilityRelation:
    """``{"observables": [...], "incompatible": [[a, b], ...]}`` or ``"compatible"``."""
    if "observables" not in doc:
        raise DomainError("compatibility document needs an 'observables' list")
    if "compatible" in doc:
        return CompatibilityRelation(frozenset(doc["observables"]),
                                     frozenset(frozenset(p) for p in doc["compatible"]))
    return CompatibilityRelation.from_incompatible(doc["observables"], doc.get("incompatible", []))


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise DomainError(f"{path}: not valid JSON ({exc})") from None
