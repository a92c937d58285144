"""Shared samplers and constants for the test suite.

All samplers take an explicit numpy Generator so every test pins its own
seed.  Stratum samplers keep a collar away from neighbouring strata; the
collar sizes are test choices, not library tolerances.
"""

import math

import numpy as np

from qbody import (
    AngleTuple,
    Correlation,
    Oracle,
    extreme_from_angles,
    member,
    symmetry_group,
)

SQRT2 = math.sqrt(2.0)
CHSH_POINT = Correlation(1 / SQRT2, 1 / SQRT2, 1 / SQRT2, -1 / SQRT2)
CHSH_ANGLES = AngleTuple(math.pi / 4, math.pi / 4, math.pi / 4,
                         -3 * math.pi / 4)
EVEN_VERTEX_TUPLES = [
    (1, 1, 1, 1), (1, 1, -1, -1), (1, -1, 1, -1), (1, -1, -1, 1),
    (-1, -1, 1, 1), (-1, 1, -1, 1), (-1, 1, 1, -1), (-1, -1, -1, -1),
]


def tetra_angles(rng: np.random.Generator, n: int, collar: float = 0.05,
                 k_min: float = 0.0) -> list[AngleTuple]:
    """Angle tuples in the prototype tetrahedron with a sine collar.

    ``k_min`` additionally rejects tuples whose cotangent sum is small,
    which keeps exposing functionals bounded.
    """
    out = []
    while len(out) < n:
        a, b, g = rng.uniform(collar, math.pi - collar, size=3)
        s = a + b + g
        if not collar < s < math.pi - collar:
            continue
        t = AngleTuple(a, b, g, -s)
        if k_min:
            K = sum(math.cos(x) / math.sin(x) for x in t.as_tuple())
            if abs(K) < k_min:
                continue
        out.append(t)
    return out


def random_symmetry(rng: np.random.Generator) -> np.ndarray:
    group = symmetry_group()
    return group[int(rng.integers(0, len(group)))]


def q1_point(rng: np.random.Generator) -> Correlation:
    return Correlation(*EVEN_VERTEX_TUPLES[int(rng.integers(0, 8))])


def q2_point(rng: np.random.Generator) -> Correlation:
    t = float(rng.uniform(-0.95, 0.95))
    base = np.array([1.0, t, t, 1.0])
    return Correlation.from_sequence(random_symmetry(rng) @ base)


def q3_point(rng: np.random.Generator) -> Correlation:
    while True:
        b, g = rng.uniform(0.05, math.pi - 0.05, size=2)
        if 0.05 < b + g < math.pi - 0.05 or math.pi + 0.05 < b + g:
            if abs(math.sin(b + g)) > 0.05:
                break
    t = AngleTuple(0.0, b, g, -(b + g))
    c = extreme_from_angles(t).c
    return Correlation.from_sequence(random_symmetry(rng) @ c.as_array())


def q4_point(rng: np.random.Generator, collar: float = 0.05) -> Correlation:
    t = tetra_angles(rng, 1, collar)[0]
    c = extreme_from_angles(t).c
    return Correlation.from_sequence(random_symmetry(rng) @ c.as_array())


def q5_point(rng: np.random.Generator) -> Correlation:
    while True:
        x, y, z = rng.uniform(-0.95, 0.95, size=3)
        if 1.0 - x * x - y * y - z * z + 2.0 * x * y * z > 1e-3:
            break
    base = np.array([1.0, x, y, z])
    return Correlation.from_sequence(random_symmetry(rng) @ base)


def deep_interior_point(rng: np.random.Generator,
                        depth: float = 1e-3) -> Correlation:
    while True:
        c = Correlation.from_sequence(rng.uniform(-1.0, 1.0, size=4))
        if member(c, Oracle.SEMIALG).margin > depth:
            return c


def boundary_cl_points(rng: np.random.Generator, n: int) -> list[Correlation]:
    """Points on the boundary of the classical polytope, both facet kinds."""
    chsh_facet = np.array([
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [-1.0, 1.0, 1.0, -1.0],
    ])
    n_facet = np.array([
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ])
    out = []
    for i in range(n):
        verts = chsh_facet if i % 2 == 0 else n_facet
        w = rng.dirichlet(np.ones(4))
        point = w @ verts
        out.append(Correlation.from_sequence(random_symmetry(rng) @ point))
    return out
