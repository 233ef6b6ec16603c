import itertools
import json
import random
from pathlib import Path

import numpy as np
import pytest

from bellsim.contextuality import (
    Assignment,
    DeviceType,
    Triad,
    find_noncontextual_assignment,
    load_triad_document,
    simulate_spin1_agreement,
)
from bellsim.errors import DomainError
from bellsim.measure import CompatibilityRelation
from bellsim.rng import RandomStream

from oracles import brute_force_assignments

FIXTURES = Path(__file__).parent / "fixtures" / "triads"


def load(name):
    doc = json.loads((FIXTURES / name).read_text())
    return doc, *load_triad_document(doc)


def test_single_triad():
    found = find_noncontextual_assignment([Triad(("x", "y", "z"))])
    assert dict(found.values) == {"x": 0, "y": 1, "z": 1}


def test_shared_x_configuration():
    triads = [Triad(("x", "y", "z")), Triad(("x", "y2", "z2"))]
    found = find_noncontextual_assignment(triads)
    assert dict(found.values) == {"x": 0, "y": 1, "z": 1, "y2": 1, "z2": 1}
    assert found.satisfies(triads)


def test_malformed_triads_rejected():
    with pytest.raises(DomainError):
        Triad(("x", "x", "y"))
    with pytest.raises(DomainError):
        Triad(("x", "y"))
    with pytest.raises(DomainError):
        find_noncontextual_assignment([Triad(("x", "y", "z"))], directions=["x", "y"])
    with pytest.raises(DomainError):
        load_triad_document({"triads": ["xyz"]})
    with pytest.raises(DomainError):
        load_triad_document({"directions": ["x"], "triads": [["x", "y", "z"]]})


def test_isolated_directions_default_to_one():
    found = find_noncontextual_assignment([Triad(("x", "y", "z"))], ["w", "x", "y", "z"])
    assert found["w"] == 1


@pytest.mark.parametrize("name", sorted(p.name for p in FIXTURES.glob("*.json")
                                        if p.name != "peres57.json"))
def test_fixture_agrees_with_brute_force(name):
    doc, directions, triads = load(name)
    solutions = brute_force_assignments(directions, [t.directions for t in triads])
    found = find_noncontextual_assignment(triads, directions)
    assert (found is not None) == (len(solutions) > 0) == doc["expect"]
    if found is not None:
        code = sum(found[d] << i for i, d in enumerate(directions))
        assert code in set(solutions.tolist())


def test_peres57_is_orthogonal_and_uncolourable():
    doc, directions, triads = load("peres57.json")
    vec = {d: np.array(v) for d, v in zip(directions, doc["vectors"])}
    for t in triads:
        for x, y in itertools.combinations(t.directions, 2):
            assert abs(vec[x] @ vec[y]) < 1e-9
    assert len(directions) == 57 and len(triads) == 40
    assert find_noncontextual_assignment(triads, directions) is None


def random_system(rng, d, t):
    names = [f"d{i}" for i in range(d)]
    return names, [Triad(tuple(rng.sample(names, 3))) for _ in range(t)]


@pytest.mark.parametrize("seed", range(40))
def test_random_systems_agree_with_brute_force(seed):
    rng = random.Random(seed)
    d = rng.randint(3, 16)
    names, triads = random_system(rng, d, rng.randint(1, 2 * d))
    solutions = brute_force_assignments(names, [t.directions for t in triads])
    found = find_noncontextual_assignment(triads, names)
    assert (found is not None) == (len(solutions) > 0)
    if found is not None:
        assert found.satisfies(triads)
        assert set(found.values) == set(names)


def test_assignment_is_single_valued_per_direction():
    doc, directions, triads = load("chain.json")
    found = find_noncontextual_assignment(triads, directions)
    reads = {}
    for t in triads:
        for d in t.directions:
            reads.setdefault(d, set()).add(found[d])
    assert all(len(v) == 1 for v in reads.values())


def test_device_type_compatibility():
    rel = CompatibilityRelation.from_incompatible(["Sx2", "Sy2", "Sy'2"], [("Sy2", "Sy'2")])
    DeviceType("xyz", frozenset({"Sx2", "Sy2"})).check(rel)
    with pytest.raises(DomainError):
        DeviceType("bad", frozenset({"Sy2", "Sy'2"})).check(rel)


# ------------------------------------------------------------ spin-1 pairs


def test_agreement_no_flip_exact():
    stat = simulate_spin1_agreement(0.0, 10 ** 6, RandomStream(1))
    assert stat.rate == 1.0 and stat.agreements == 10 ** 6


def test_agreement_full_flip_exact():
    assert simulate_spin1_agreement(1.0, 10 ** 5, RandomStream(1)).rate == 0.0


def test_agreement_quarter_flip():
    stat = simulate_spin1_agreement(0.25, 10 ** 6, RandomStream(2))
    assert abs(stat.rate - 0.75) <= 0.0013


@pytest.mark.parametrize("flip", [0.1, 0.5, 0.9])
def test_agreement_expectation(flip):
    stat = simulate_spin1_agreement(flip, 200_000, RandomStream(int(flip * 10)))
    sigma = (flip * (1 - flip) / stat.n) ** 0.5
    assert abs(stat.rate - (1 - flip)) <= 3 * sigma


def test_marginal_parameter():
    # agreement does not depend on p_one; the shared value is drawn independently per decay
    stat = simulate_spin1_agreement(0.25, 100_000, RandomStream(3), p_one=0.1)
    assert abs(stat.rate - 0.75) <= 3 * (0.1875 / 100_000) ** 0.5


def test_agreement_domain():
    for bad in (-0.1, 1.1):
        with pytest.raises(DomainError):
            simulate_spin1_agreement(bad, 10, RandomStream(0))
    with pytest.raises(DomainError):
        simulate_spin1_agreement(0.5, 0, RandomStream(0))
