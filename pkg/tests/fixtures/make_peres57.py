"""Regenerate triads/peres57.json.

Peres' 33 rays (signed permutations of (0,0,1), (0,1,1), (0,1,√2),
(1,1,√2)) give 16 orthogonal triads and 24 orthogonal pairs outside them.
Completing each pair with its cross product gives 57 rays and 40 triads.
"""

import itertools
import json
from pathlib import Path

import numpy as np


def canon(v):
    v = np.asarray(v, float)
    v = v / np.linalg.norm(v)
    i = np.flatnonzero(np.abs(v) > 1e-9)[0]
    return -v if v[i] < 0 else v


def index_of(rays, v):
    for k, r in enumerate(rays):
        if np.allclose(r, v):
            return k
    rays.append(v)
    return len(rays) - 1


def main():
    r2 = np.sqrt(2.0)
    rays = []
    for b in [(0, 0, 1), (0, 1, 1), (0, 1, r2), (1, 1, r2)]:
        for p in itertools.permutations(b):
            for s in itertools.product((1, -1), repeat=3):
                index_of(rays, canon(np.array(p) * s))
    n = len(rays)
    orth = lambda i, j: abs(rays[i] @ rays[j]) < 1e-9
    triads = [t for t in itertools.combinations(range(n), 3)
              if orth(t[0], t[1]) and orth(t[0], t[2]) and orth(t[1], t[2])]
    covered = {frozenset(p) for t in triads for p in itertools.combinations(t, 2)}
    for i, j in itertools.combinations(range(n), 2):
        if orth(i, j) and frozenset((i, j)) not in covered:
            triads.append((i, j, index_of(rays, canon(np.cross(rays[i], rays[j])))))
    doc = {
        "directions": [f"r{k}" for k in range(len(rays))],
        "triads": [[f"r{k}" for k in t] for t in triads],
        "vectors": [[round(float(x), 15) for x in r] for r in rays],
    }
    out = Path(__file__).parent / "triads" / "peres57.json"
    out.write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
